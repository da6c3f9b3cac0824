//! Bound-calculus integration: theorem pipelines in both modes, adjustment
//! validation across window sizes, genbound linearity, and the alpha
//! threshold round trip.

use expdom::bounds::{
    alpha_threshold_from, clamped_adjustment, density_lower_bound, run_genbound,
    run_main_theorem, run_main_theorem_at, validate_adjustment, BoundsError,
};
use expdom::dyadic::DyadicRational;
use expdom::lpmodel::{assemble_main, window_for, ModelMode};
use expdom::solver::{solve_lp, ArithmeticMode, Rational};
use expdom::torus::{epsilon_row_bound, partition, TorusDims};

fn exact() -> ArithmeticMode {
    ArithmeticMode::Exact
}

#[test]
fn main_theorem_asymptotic() {
    let report = run_main_theorem(&ModelMode::Asymptotic, &exact()).unwrap();
    assert!((report.k - 4.2381080608).abs() < 1e-9);
    assert!((report.denominator - 13.7618919392).abs() < 1e-9);
    assert_eq!(report.epsilon, 0.0);
    assert_eq!(report.clamped_adjustments, 0);
    assert!(report.rho_is_standard);
    // the lower bound must stay below the tiling upper bound
    assert!(report.denominator > 13.0);
    assert!((report.density_lower_bound - 1.0 / report.denominator).abs() < 1e-15);
}

#[test]
fn main_theorem_finite_odd_torus_matches_asymptotic() {
    let dims = TorusDims::new(31, 31).unwrap();
    let report = run_main_theorem(&ModelMode::Finite(dims), &exact()).unwrap();
    assert_eq!(report.epsilon, 0.0);
    assert_eq!(report.clamped_adjustments, 0);
    assert!((report.denominator - 13.7618919392).abs() < 1e-9);
}

#[test]
fn main_theorem_finite_even_torus_carries_epsilon() {
    // on a small even torus the remainder-set bound swamps k entirely and
    // the method collapses, which must surface as an error
    let dims = TorusDims::new(32, 32).unwrap();
    match run_main_theorem(&ModelMode::Finite(dims), &exact()) {
        Err(BoundsError::NonpositiveK { epsilon, .. }) => {
            assert!((epsilon - 169.0 * 63.0 / 512.0).abs() < 1e-12);
        }
        other => panic!("expected NonpositiveK at 32x32, got {other:?}"),
    }

    // far enough out the epsilon is small and the bound survives
    let dims = TorusDims::new(40, 40).unwrap();
    let report = run_main_theorem(&ModelMode::Finite(dims), &exact()).unwrap();
    let eps = 169.0 * 79.0 / 8192.0; // 169 (m+n-1) (1/2)^13
    assert!((report.epsilon - eps).abs() < 1e-12);
    // looser caps can only lower the LP value, so the denominator is at
    // least the asymptotic one plus epsilon
    assert!(report.denominator >= 13.7618919392 + eps - 1e-9);
    // rows at the domination floor forced clamping under the finite epsilon
    assert!(report.clamped_adjustments > 0);
    assert!(report.density_lower_bound > 0.0);
}

#[test]
fn adjustment_profile_validates_for_all_window_sizes() {
    for r in [5u32, 7, 9, 13] {
        let mode = ModelMode::Asymptotic;
        let w = window_for(r, &mode).unwrap();
        let inst = assemble_main(r, &mode).unwrap();
        let sol = solve_lp(&inst, &exact()).unwrap();
        let eps = vec![DyadicRational::zero(); w.interior_size()];
        let profile = validate_adjustment(&sol, &w, &eps).unwrap();
        // sum of adjustments equals the exact k = value - |I|
        let value = sol.exact().unwrap().value.clone().unwrap();
        let interior = Rational::from_integer((w.interior_size() as i64).into());
        assert_eq!(profile.k, &value - &interior, "r = {r}");
        assert!(profile.clamped.is_empty());
        // caps are the center weights: spot-check positivity
        for (y, cap) in profile.y.iter().zip(&profile.caps) {
            assert!(*y >= Rational::from_integer(0.into()));
            assert!(y <= cap);
        }
    }
}

#[test]
fn adjustment_rejects_tampered_solution() {
    let mode = ModelMode::Asymptotic;
    let w = window_for(5, &mode).unwrap();
    let inst = assemble_main(5, &mode).unwrap();
    let sol = solve_lp(&inst, &exact()).unwrap();
    let eps = vec![DyadicRational::zero(); w.interior_size()];
    // inflate one variable: some interior row blows past its cap
    let mut tampered = match sol {
        expdom::solver::LpSolution::Exact(s) => s,
        _ => unreachable!(),
    };
    tampered.primal[0] = &tampered.primal[0] + &Rational::from_integer(8.into());
    let err = validate_adjustment(&expdom::solver::LpSolution::Exact(tampered), &w, &eps);
    assert!(matches!(err, Err(BoundsError::AdjustmentViolation { .. })));
}

#[test]
fn clamped_profile_only_raises_negative_entries() {
    let dims = TorusDims::new(32, 32).unwrap();
    let mode = ModelMode::Finite(dims);
    let w = window_for(13, &mode).unwrap();
    let inst = assemble_main(13, &mode).unwrap();
    let sol = solve_lp(&inst, &exact()).unwrap();
    let p = partition(&w);
    let eps_row = epsilon_row_bound(&w, &p);
    let eps = vec![eps_row; w.interior_size()];
    // strict validation fails below zero only
    match validate_adjustment(&sol, &w, &eps) {
        Err(BoundsError::AdjustmentViolation { defects }) => {
            assert!(defects.iter().all(|d| d.kind == "below_zero"));
        }
        other => panic!("expected below-zero violations, got {other:?}"),
    }
    let profile = clamped_adjustment(&sol, &w, &eps).unwrap();
    assert!(!profile.clamped.is_empty());
    for y in &profile.y {
        assert!(*y >= Rational::from_integer(0.into()));
    }
}

#[test]
fn genbound_is_linear_in_alpha() {
    let mode = ModelMode::Asymptotic;
    let arith = ArithmeticMode::float_default();
    let d0 = run_genbound(0.0, &mode, &arith).unwrap().denominator;
    let d_half = run_genbound(0.5, &mode, &arith).unwrap().denominator;
    let d1 = run_genbound(1.0, &mode, &arith).unwrap().denominator;
    assert!((d0 + d1 - 2.0 * d_half).abs() < 1e-9, "not collinear");
    // alpha = 0 reduces to the main theorem
    let main = run_main_theorem(&mode, &arith).unwrap();
    assert!((d0 - main.denominator).abs() < 1e-9);
    assert!(run_genbound(1.5, &mode, &arith).is_err());
}

#[test]
fn alpha_threshold_substitutes_back() {
    let mode = ModelMode::Asymptotic;
    let arith = ArithmeticMode::float_default();
    let main = run_main_theorem(&mode, &arith).unwrap();
    let iso_report = run_genbound(1.0, &mode, &arith).unwrap();
    let k_main = main.k;
    let k_iso = iso_report.k;
    let alpha = alpha_threshold_from(k_main, k_iso, 1.0 / 13.0).unwrap();
    let back = run_genbound(alpha, &mode, &arith).unwrap();
    assert!(
        (back.denominator - 13.0).abs() < 1e-9,
        "substituted denominator {}",
        back.denominator
    );
    // an upper bound equal to the main denominator demands no isolation
    let zero = alpha_threshold_from(k_main, k_iso, 1.0 / (18.0 - k_main)).unwrap();
    assert!(zero.abs() < 1e-12);
}

#[test]
fn density_bound_monotone_in_k() {
    let mut last = 0.0;
    for i in 1..100 {
        let k = i as f64 * 0.1;
        let d = density_lower_bound(18.0, k).unwrap();
        assert!(d > last);
        last = d;
    }
}

#[test]
fn nonstandard_window_sizes_run() {
    let report = run_main_theorem_at(5, &ModelMode::Asymptotic, &exact()).unwrap();
    // r=5 value 298/25 -> k = 298/25 - 9 = 73/25 = 2.92
    assert!((report.k - 2.92).abs() < 1e-9);
    assert!((report.denominator - 15.08).abs() < 1e-9);
}
