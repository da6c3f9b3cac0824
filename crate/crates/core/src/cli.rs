//! Command-line front end: bound certification, set verification, brute
//! force, instance export, and file solving. Errors map to stable exit codes
//! and are mirrored as JSON on stderr.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::bounds::{
    self, alpha_threshold, reference_bounds, run_genbound, run_main_theorem, BoundReport,
    BoundsError,
};
use crate::domination::{
    min_expdom_bruteforce, verify, CandidateSet,
    DominationError,
};
use crate::lpmodel::{assemble_isolated, assemble_main, assemble_milp, LPInstance, ModelMode};
use crate::solver::{
    check_certificate, solve_lp, solve_milp, ArithmeticMode, BranchBudget, SolveStatus,
    SolverError,
};
use crate::torus::TorusDims;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_DOMINATING: i32 = 1;
pub const EXIT_PARSE_OR_SOLVER: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_SIZE_LIMIT: i32 = 4;
pub const EXIT_NOT_FOUND: i32 = 5;

#[derive(Parser)]
#[command(
    name = "expdom",
    about = "Exponential domination bounds on torus graphs",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compute a certified density lower bound.
    Bound(BoundArgs),
    /// Verify a candidate dominating set from a JSON file.
    Verify(VerifyArgs),
    /// Exact minimum dominating set by exhaustive search.
    Bruteforce(BruteArgs),
    /// Write an assembled problem instance as JSON.
    Export(ExportArgs),
    /// Solve a problem file and emit the solution JSON.
    Solve(SolveArgs),
}

#[derive(Args)]
pub struct BoundArgs {
    /// Window size (odd, >= 3).
    #[arg(long, default_value_t = 13)]
    pub r: u32,
    /// Isolated-vertex fraction; selects the mixed bound.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Use the mixed bound with the isolated-variant program (alpha
    /// defaults to 1 when not given).
    #[arg(long)]
    pub isolated: bool,
    /// Compute at finite torus dimensions MxN instead of asymptotically.
    #[arg(long, value_parser = parse_dims)]
    pub finite: Option<TorusDims>,
    /// Report the isolated fraction threshold for this density upper bound
    /// denominator (e.g. 13).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Candidate set JSON file: {"m":..,"n":..,"vertices":[[r,c],..]}.
    pub set_file: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct BruteArgs {
    /// Torus dimensions MxN.
    #[arg(long, value_parser = parse_dims)]
    pub dims: TorusDims,
    /// Largest set size to try (defaults to m*n).
    #[arg(long)]
    pub cap: Option<u32>,
    /// Override the m*n <= 36 tractability guard.
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct ExportArgs {
    /// Which program to assemble.
    #[arg(long, value_parser = ["main", "isolated", "milp"], default_value = "main")]
    pub variant: String,
    /// Window size for the main variant.
    #[arg(long, default_value_t = 13)]
    pub r: u32,
    /// Assemble at finite torus dimensions MxN.
    #[arg(long, value_parser = parse_dims)]
    pub finite: Option<TorusDims>,
    /// Output path.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Problem JSON file.
    pub problem_file: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_nodes: u64,
    /// Wall-clock limit in seconds for branch and bound.
    #[arg(long, default_value_t = 300)]
    pub max_time: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct CommonArgs {
    /// Arithmetic: exact rationals or tolerance-checked floating point.
    #[arg(long, value_parser = ["exact", "float"], default_value = "exact")]
    pub arith: String,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
    /// Write the main output to a file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_dims(s: &str) -> Result<TorusDims, String> {
    let (m, n) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected MxN, got {s:?}"))?;
    let m: u32 = m.trim().parse().map_err(|e| format!("bad M: {e}"))?;
    let n: u32 = n.trim().parse().map_err(|e| format!("bad N: {e}"))?;
    TorusDims::new(m, n).map_err(|e| e.to_string())
}

impl CommonArgs {
    fn arithmetic(&self) -> ArithmeticMode {
        match self.arith.as_str() {
            "float" => ArithmeticMode::float_default(),
            _ => ArithmeticMode::Exact,
        }
    }

    fn emit(&self, text: &str) -> std::io::Result<()> {
        match &self.output {
            Some(path) => std::fs::write(path, text),
            None => {
                println!("{text}");
                Ok(())
            }
        }
    }
}

/// A failure with its process exit code; also serialized to stderr as JSON.
#[derive(Debug)]
pub struct CliFailure {
    pub code: i32,
    pub message: String,
}

impl CliFailure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliFailure {
            code,
            message: message.into(),
        }
    }
}

fn classify_bounds(e: BoundsError) -> CliFailure {
    let code = match &e {
        BoundsError::AdjustmentViolation { .. } => EXIT_VALIDATION,
        BoundsError::Domain(_) | BoundsError::NonpositiveK { .. } => EXIT_VALIDATION,
        _ => EXIT_PARSE_OR_SOLVER,
    };
    CliFailure::new(code, e.to_string())
}

fn classify_domination(e: DominationError) -> CliFailure {
    let code = match &e {
        DominationError::SizeLimit { .. } => EXIT_SIZE_LIMIT,
        _ => EXIT_PARSE_OR_SOLVER,
    };
    CliFailure::new(code, e.to_string())
}

fn classify_solver(e: SolverError) -> CliFailure {
    let code = match &e {
        SolverError::SizeLimit { .. } => EXIT_SIZE_LIMIT,
        _ => EXIT_PARSE_OR_SOLVER,
    };
    CliFailure::new(code, e.to_string())
}

fn io_failure(e: std::io::Error) -> CliFailure {
    CliFailure::new(EXIT_PARSE_OR_SOLVER, e.to_string())
}

pub fn run(cli: Cli) -> Result<(), CliFailure> {
    match cli.command {
        Command::Bound(args) => cmd_bound(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bruteforce(args) => cmd_bruteforce(args),
        Command::Export(args) => cmd_export(args),
        Command::Solve(args) => cmd_solve(args),
    }
}

fn mode_from(finite: Option<TorusDims>) -> ModelMode {
    match finite {
        Some(dims) => ModelMode::Finite(dims),
        None => ModelMode::Asymptotic,
    }
}

fn render_report(report: &BoundReport, threshold: Option<(f64, f64)>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "density lower bound certification");
    let _ = writeln!(out, "  rho (weight budget): {}", report.rho);
    let _ = writeln!(out, "  k (certified excess): {:.10}", report.k);
    let _ = writeln!(out, "  epsilon: {:.10}", report.epsilon);
    if report.alpha > 0.0 {
        let _ = writeln!(out, "  alpha (isolated fraction): {}", report.alpha);
    }
    let _ = writeln!(out, "  denominator: {:.10}", report.denominator);
    let _ = writeln!(
        out,
        "  density lower bound: 1/{:.10} = {:.10}",
        report.denominator, report.density_lower_bound
    );
    if report.clamped_adjustments > 0 {
        let _ = writeln!(
            out,
            "  note: {} interior adjustments clamped to zero (finite remainder set)",
            report.clamped_adjustments
        );
    }
    if let Some((upper_denom, alpha)) = threshold {
        let _ = writeln!(
            out,
            "  isolated fraction threshold vs 1/{upper_denom}: {alpha:.6}"
        );
    }
    let _ = writeln!(out, "  comparison ladder (density):");
    for rung in reference_bounds(Some(report.denominator)) {
        let _ = writeln!(
            out,
            "    {:>12}  {:.10}  {}",
            rung.key, rung.density, rung.description
        );
    }
    let _ = writeln!(out, "  runs:");
    for r in &report.provenance {
        let _ = writeln!(
            out,
            "    {} [{} | {}] value {} (exact {}) pivots {} hash {}",
            r.label,
            r.mode,
            r.arithmetic,
            r.value_decimal,
            r.value_exact.as_deref().unwrap_or("-"),
            r.pivots,
            &r.instance_hash[..16]
        );
    }
    out
}

fn cmd_bound(args: BoundArgs) -> Result<(), CliFailure> {
    if args.r.is_multiple_of(2) || args.r < 3 {
        return Err(CliFailure::new(
            EXIT_PARSE_OR_SOLVER,
            format!("window size r must be odd and >= 3, got {}", args.r),
        ));
    }
    let mode = mode_from(args.finite);
    let arith = args.common.arithmetic();

    let report = if args.alpha.is_some() || args.isolated {
        let alpha = args.alpha.unwrap_or(1.0);
        run_genbound(alpha, &mode, &arith).map_err(classify_bounds)?
    } else if args.r == 13 {
        run_main_theorem(&mode, &arith).map_err(classify_bounds)?
    } else {
        // same pipeline at a nonstandard window size
        bounds::run_main_theorem_at(args.r, &mode, &arith).map_err(classify_bounds)?
    };

    let threshold = match args.threshold {
        Some(upper_denom) => {
            let alpha = alpha_threshold(1.0 / upper_denom, &mode, &arith)
                .map_err(classify_bounds)?;
            Some((upper_denom, alpha))
        }
        None => None,
    };

    let text = if args.common.json {
        let mut v = serde_json::to_value(&report).expect("report serializes");
        if let Some((upper_denom, alpha)) = threshold {
            v["alpha_threshold"] = serde_json::json!({
                "upper_denominator": upper_denom,
                "alpha": alpha,
            });
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    } else {
        render_report(&report, threshold)
    };
    args.common.emit(&text).map_err(io_failure)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliFailure> {
    let content = std::fs::read_to_string(&args.set_file).map_err(io_failure)?;
    let set = CandidateSet::from_json(&content)
        .map_err(|e| CliFailure::new(EXIT_PARSE_OR_SOLVER, format!("bad set file: {e}")))?;
    let report = verify(&set);
    let text = if args.common.json {
        serde_json::to_string_pretty(&serde_json::json!({
            "dominating": report.dominating,
            "min_received": report.min_received.to_string(),
            "min_received_decimal": report.min_received.to_f64(),
            "set_size": set.len(),
            "density": set.density(),
            "deficient": report.deficient.iter().map(|(v, w)| {
                serde_json::json!({"vertex": [v.row(), v.col()], "received": w.to_string()})
            }).collect::<Vec<_>>(),
        }))
        .expect("report serializes")
    } else {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "set of {} vertices on {}x{} (density {:.6})",
            set.len(),
            set.dims().m(),
            set.dims().n(),
            set.density()
        );
        let _ = writeln!(
            out,
            "dominating: {} (min received weight {})",
            report.dominating, report.min_received
        );
        for (v, w) in &report.deficient {
            let _ = writeln!(out, "  deficient ({}, {}): {}", v.row(), v.col(), w);
        }
        out
    };
    args.common.emit(&text).map_err(io_failure)?;
    if report.dominating {
        Ok(())
    } else {
        Err(CliFailure {
            code: EXIT_NOT_DOMINATING,
            message: String::new(),
        })
    }
}

fn cmd_bruteforce(args: BruteArgs) -> Result<(), CliFailure> {
    let cap = args
        .cap
        .unwrap_or_else(|| args.dims.vertex_count().min(u32::MAX as u64) as u32);
    let start = std::time::Instant::now();
    let result =
        min_expdom_bruteforce(args.dims, cap, args.force).map_err(classify_domination)?;
    let elapsed = start.elapsed();
    let text = if args.common.json {
        serde_json::to_string_pretty(&serde_json::json!({
            "gamma": result.gamma,
            "witness": result.witness.as_ref().map(|w| {
                w.vertices().map(|v| (v.row(), v.col())).collect::<Vec<_>>()
            }),
            "subsets_checked": result.subsets_checked,
            "seconds": elapsed.as_secs_f64(),
        }))
        .expect("serializes")
    } else {
        match (&result.gamma, &result.witness) {
            (Some(g), Some(w)) => {
                let verts: Vec<String> = w
                    .vertices()
                    .map(|v| format!("({},{})", v.row(), v.col()))
                    .collect();
                format!(
                    "gamma = {} with witness {{{}}} ({} subsets, {:.3}s)",
                    g,
                    verts.join(", "),
                    result.subsets_checked,
                    elapsed.as_secs_f64()
                )
            }
            _ => format!(
                "no dominating set of size <= {cap} ({} subsets, {:.3}s)",
                result.subsets_checked,
                elapsed.as_secs_f64()
            ),
        }
    };
    args.common.emit(&text).map_err(io_failure)?;
    if result.gamma.is_none() {
        return Err(CliFailure {
            code: EXIT_NOT_FOUND,
            message: String::new(),
        });
    }
    Ok(())
}

fn assemble_variant(
    variant: &str,
    r: u32,
    mode: &ModelMode,
) -> Result<LPInstance, CliFailure> {
    let inst = match variant {
        "isolated" => assemble_isolated(mode),
        "milp" => assemble_milp(mode),
        _ => assemble_main(r, mode),
    };
    inst.map_err(|e| CliFailure::new(EXIT_PARSE_OR_SOLVER, e.to_string()))
}

fn cmd_export(args: ExportArgs) -> Result<(), CliFailure> {
    if args.r.is_multiple_of(2) || args.r < 3 {
        return Err(CliFailure::new(
            EXIT_PARSE_OR_SOLVER,
            format!("window size r must be odd and >= 3, got {}", args.r),
        ));
    }
    let mode = mode_from(args.finite);
    let inst = assemble_variant(&args.variant, args.r, &mode)?;
    std::fs::write(&args.output, inst.to_json()).map_err(io_failure)?;
    println!(
        "wrote {} ({} variables, hash {})",
        args.output.display(),
        inst.num_vars,
        &inst.hash()[..16]
    );
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliFailure> {
    let content = std::fs::read_to_string(&args.problem_file).map_err(io_failure)?;
    let inst = LPInstance::from_json(&content)
        .map_err(|e| CliFailure::new(EXIT_PARSE_OR_SOLVER, format!("bad problem file: {e}")))?;
    let arith = args.common.arithmetic();
    let solution = if inst.integer_marks.is_some() {
        let budget = BranchBudget {
            max_nodes: args.max_nodes,
            max_time: Duration::from_secs(args.max_time),
        };
        solve_milp(&inst, &arith, &budget).map_err(classify_solver)?
    } else {
        solve_lp(&inst, &arith).map_err(classify_solver)?
    };
    let mut json = solution.to_json_value();
    if solution.status() == SolveStatus::Optimal && inst.integer_marks.is_none() {
        let cert = check_certificate(&inst, &solution);
        json["certificate"] = serde_json::json!({
            "ok": cert.ok,
            "violations": cert.violations,
        });
    }
    let text = serde_json::to_string_pretty(&json).expect("solution serializes");
    args.common.emit(&text).map_err(io_failure)?;
    match solution.status() {
        SolveStatus::Optimal | SolveStatus::BudgetExceeded => Ok(()),
        SolveStatus::Infeasible | SolveStatus::Unbounded => Err(CliFailure {
            code: EXIT_PARSE_OR_SOLVER,
            message: format!("solver finished with status {:?}", solution.status()),
        }),
    }
}
