use expdom::lpmodel::{assemble_main, ModelMode};
use expdom::solver::solve_lp_exact_pivoting;
use std::time::Instant;

fn main() {
    for r in [3u32, 5, 7, 9, 11, 13] {
        let inst = assemble_main(r, &ModelMode::Asymptotic).unwrap();
        let t = Instant::now();
        let sol = solve_lp_exact_pivoting(&inst).unwrap();
        println!(
            "r={r}: {} in {:.2}s ({} pivots)",
            sol.value_decimal(10).unwrap(),
            t.elapsed().as_secs_f64(),
            sol.pivots()
        );
    }
}
