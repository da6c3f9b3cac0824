//! LP/MILP solving: a dense two-phase simplex over exact rationals or
//! floating point, exact certification of float bases, branch and bound for
//! {0,2}-marked variables, and an independent vertex-enumeration oracle.

mod arith;
mod branch;
mod crossover;
mod enumerate;
mod simplex;

pub use arith::{rational_decimal, rational_to_f64, Rational};
pub use branch::BranchBudget;
pub use enumerate::{vertex_enumeration_oracle, OracleOutcome, ORACLE_VAR_LIMIT};

use arith::Scalar;
use num_traits::Zero;
use branch::{branch_and_bound, Relaxed};
use serde::Serialize;
use simplex::{EngineResult, EngineStatus, SimplexEngine};

use crate::lpmodel::LPInstance;

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("instance has {vars} variables, oracle limit is {limit}")]
    SizeLimit { vars: usize, limit: usize },
    #[error("instance carries integer marks; use solve_milp")]
    UnexpectedMarks,
    #[error("instance has no integer marks; use solve_lp")]
    MissingMarks,
    #[error("a relaxation is unbounded; the integer program cannot be bounded")]
    UnboundedRelaxation,
    #[error("malformed instance: {0}")]
    Model(String),
}

/// Arithmetic backing a solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArithmeticMode {
    /// Arbitrary-precision rationals; every comparison is exact.
    Exact,
    /// f64 with a feasibility/optimality tolerance.
    Float { tolerance: f64 },
}

impl ArithmeticMode {
    pub fn float_default() -> Self {
        ArithmeticMode::Float { tolerance: 1e-9 }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ArithmeticMode::Exact => "exact",
            ArithmeticMode::Float { .. } => "float",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    BudgetExceeded,
}

/// A constraint active at the solution point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TightBound {
    RowLower(usize),
    RowUpper(usize),
    VarLower(usize),
    VarUpper(usize),
}

/// Solver result in one arithmetic. Vectors are empty unless a solution
/// point exists (optimal, or a budgeted incumbent).
#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub status: SolveStatus,
    pub value: Option<T>,
    pub primal: Vec<T>,
    pub dual: Vec<T>,
    pub reduced: Vec<T>,
    pub row_activity: Vec<T>,
    pub tight: Vec<TightBound>,
    pub pivots: u64,
    pub nodes: u64,
    /// Proven lower bound on the optimum (branch and bound).
    pub bound: Option<T>,
}

/// Mode-erased solver result.
#[derive(Debug, Clone)]
pub enum LpSolution {
    Exact(Solution<Rational>),
    Float(Solution<f64>),
}

impl LpSolution {
    pub fn status(&self) -> SolveStatus {
        match self {
            LpSolution::Exact(s) => s.status,
            LpSolution::Float(s) => s.status,
        }
    }

    pub fn value_f64(&self) -> Option<f64> {
        match self {
            LpSolution::Exact(s) => s.value.as_ref().map(|v| v.to_f64()),
            LpSolution::Float(s) => s.value,
        }
    }

    pub fn bound_f64(&self) -> Option<f64> {
        match self {
            LpSolution::Exact(s) => s.bound.as_ref().map(|v| v.to_f64()),
            LpSolution::Float(s) => s.bound,
        }
    }

    pub fn primal_f64(&self) -> Vec<f64> {
        match self {
            LpSolution::Exact(s) => s.primal.iter().map(|v| v.to_f64()).collect(),
            LpSolution::Float(s) => s.primal.clone(),
        }
    }

    pub fn exact(&self) -> Option<&Solution<Rational>> {
        match self {
            LpSolution::Exact(s) => Some(s),
            LpSolution::Float(_) => None,
        }
    }

    pub fn pivots(&self) -> u64 {
        match self {
            LpSolution::Exact(s) => s.pivots,
            LpSolution::Float(s) => s.pivots,
        }
    }

    pub fn nodes(&self) -> u64 {
        match self {
            LpSolution::Exact(s) => s.nodes,
            LpSolution::Float(s) => s.nodes,
        }
    }

    /// Exact value as a `numerator/denominator` string, exact mode only.
    pub fn value_exact_string(&self) -> Option<String> {
        match self {
            LpSolution::Exact(s) => s.value.as_ref().map(|v| v.to_string()),
            LpSolution::Float(_) => None,
        }
    }

    /// Decimal rendering of the value (exact rounding in exact mode).
    pub fn value_decimal(&self, digits: u32) -> Option<String> {
        match self {
            LpSolution::Exact(s) => s.value.as_ref().map(|v| rational_decimal(v, digits)),
            LpSolution::Float(s) => s.value.map(|v| format!("{v:.*}", digits as usize)),
        }
    }

    /// Solution JSON: status, value (decimal and exact), primal, dual,
    /// nodes_explored, pivots.
    pub fn to_json_value(&self) -> serde_json::Value {
        let value = serde_json::json!({
            "decimal": self.value_decimal(12),
            "exact": self.value_exact_string(),
        });
        let (primal, dual): (Vec<String>, Vec<String>) = match self {
            LpSolution::Exact(s) => (
                s.primal.iter().map(|v| v.to_string()).collect(),
                s.dual.iter().map(|v| v.to_string()).collect(),
            ),
            LpSolution::Float(s) => (
                s.primal.iter().map(|v| format!("{v:.12}")).collect(),
                s.dual.iter().map(|v| format!("{v:.12}")).collect(),
            ),
        };
        serde_json::json!({
            "status": self.status(),
            "arithmetic": match self { LpSolution::Exact(_) => "exact", LpSolution::Float(_) => "float" },
            "value": value,
            "bound": self.bound_f64(),
            "primal": primal,
            "dual": dual,
            "nodes_explored": self.nodes(),
            "pivots": self.pivots(),
        })
    }
}

fn tight_set<T: Scalar>(p: &LPInstance, r: &EngineResult<T>, tol: &T) -> Vec<TightBound> {
    let mut tight = Vec::new();
    let close = |a: &T, b: &T| -> bool { a.sub_ref(b).abs_ref() <= *tol };
    for i in 0..p.num_rows() {
        let lo = T::from_dyadic(&p.row_lower[i]);
        let up = T::from_dyadic(&p.row_upper[i]);
        if close(&r.row_activity[i], &lo) {
            tight.push(TightBound::RowLower(i));
        }
        if close(&r.row_activity[i], &up) {
            tight.push(TightBound::RowUpper(i));
        }
    }
    for j in 0..p.num_vars {
        let lo = T::from_dyadic(&p.var_lower[j]);
        if close(&r.x[j], &lo) {
            tight.push(TightBound::VarLower(j));
        }
        if let Some(u) = &p.var_upper[j] {
            if close(&r.x[j], &T::from_dyadic(u)) {
                tight.push(TightBound::VarUpper(j));
            }
        }
    }
    tight
}

fn solution_from_engine<T: Scalar>(
    p: &LPInstance,
    r: EngineResult<T>,
    tol: &T,
) -> Solution<T> {
    let status = match r.status {
        EngineStatus::Optimal => SolveStatus::Optimal,
        EngineStatus::Infeasible => SolveStatus::Infeasible,
        EngineStatus::Unbounded => SolveStatus::Unbounded,
    };
    if status != SolveStatus::Optimal {
        return Solution {
            status,
            value: None,
            primal: Vec::new(),
            dual: Vec::new(),
            reduced: Vec::new(),
            row_activity: Vec::new(),
            tight: Vec::new(),
            pivots: r.pivots,
            nodes: 0,
            bound: None,
        };
    }
    let tight = tight_set(p, &r, tol);
    Solution {
        status,
        value: Some(r.value.clone()),
        bound: Some(r.value.clone()),
        primal: r.x,
        dual: r.y,
        reduced: r.reduced,
        row_activity: r.row_activity,
        tight,
        pivots: r.pivots,
        nodes: 0,
    }
}

fn run_float(p: &LPInstance, tolerance: f64) -> EngineResult<f64> {
    SimplexEngine::<f64>::new(p, tolerance).solve(p)
}

fn run_exact(p: &LPInstance) -> EngineResult<Rational> {
    SimplexEngine::<Rational>::new(p, Rational::zero()).solve(p)
}

/// Exact solve: a float run locates the basis, exact reconstruction
/// certifies it; any failure falls back to from-scratch exact pivoting.
fn exact_result(p: &LPInstance) -> EngineResult<Rational> {
    let float = run_float(p, 1e-9);
    if float.status == EngineStatus::Optimal {
        if let Some(exact) = crossover::certify_basis(p, &float) {
            return exact;
        }
    }
    run_exact(p)
}

/// Two-phase simplex over a pure LP (no integer marks).
pub fn solve_lp(p: &LPInstance, mode: &ArithmeticMode) -> Result<LpSolution, SolverError> {
    if p.integer_marks.is_some() {
        return Err(SolverError::UnexpectedMarks);
    }
    p.validate().map_err(|e| SolverError::Model(e.to_string()))?;
    Ok(match mode {
        ArithmeticMode::Float { tolerance } => {
            let r = run_float(p, *tolerance);
            LpSolution::Float(solution_from_engine(p, r, tolerance))
        }
        ArithmeticMode::Exact => {
            let r = exact_result(p);
            LpSolution::Exact(solution_from_engine(p, r, &Rational::zero()))
        }
    })
}

/// From-scratch exact pivoting (no float crossover); used to exercise the
/// exact engine directly.
pub fn solve_lp_exact_pivoting(p: &LPInstance) -> Result<LpSolution, SolverError> {
    if p.integer_marks.is_some() {
        return Err(SolverError::UnexpectedMarks);
    }
    p.validate().map_err(|e| SolverError::Model(e.to_string()))?;
    let r = run_exact(p);
    Ok(LpSolution::Exact(solution_from_engine(p, r, &Rational::zero())))
}

/// Branch and bound over the {0,2}-marked variables.
pub fn solve_milp(
    p: &LPInstance,
    mode: &ArithmeticMode,
    budget: &BranchBudget,
) -> Result<LpSolution, SolverError> {
    p.validate().map_err(|e| SolverError::Model(e.to_string()))?;
    match mode {
        ArithmeticMode::Float { tolerance } => {
            let tol = *tolerance;
            let outcome = branch_and_bound::<f64, _>(p, false, budget, |inst| {
                let r = run_float(inst, tol);
                match r.status {
                    EngineStatus::Optimal => Ok(Relaxed::Optimal(r)),
                    EngineStatus::Infeasible => Ok(Relaxed::Infeasible),
                    EngineStatus::Unbounded => Err(SolverError::UnboundedRelaxation),
                }
            })?;
            Ok(LpSolution::Float(milp_solution(p, outcome, &tol)))
        }
        ArithmeticMode::Exact => {
            let outcome = branch_and_bound::<Rational, _>(p, true, budget, |inst| {
                let r = exact_result(inst);
                match r.status {
                    EngineStatus::Optimal => Ok(Relaxed::Optimal(r)),
                    EngineStatus::Infeasible => Ok(Relaxed::Infeasible),
                    EngineStatus::Unbounded => Err(SolverError::UnboundedRelaxation),
                }
            })?;
            Ok(LpSolution::Exact(milp_solution(p, outcome, &Rational::zero())))
        }
    }
}

fn milp_solution<T: Scalar>(
    p: &LPInstance,
    outcome: branch::BranchOutcome<T>,
    tol: &T,
) -> Solution<T> {
    let status = if outcome.budget_exceeded {
        SolveStatus::BudgetExceeded
    } else if outcome.incumbent.is_some() {
        SolveStatus::Optimal
    } else {
        SolveStatus::Infeasible
    };
    match outcome.incumbent {
        Some(inc) => {
            let tight = tight_set(p, &inc, tol);
            Solution {
                status,
                value: Some(inc.value.clone()),
                primal: inc.x,
                dual: inc.y,
                reduced: inc.reduced,
                row_activity: inc.row_activity,
                tight,
                pivots: outcome.pivots,
                nodes: outcome.nodes,
                bound: outcome.bound,
            }
        }
        None => Solution {
            status,
            value: None,
            primal: Vec::new(),
            dual: Vec::new(),
            reduced: Vec::new(),
            row_activity: Vec::new(),
            tight: Vec::new(),
            pivots: outcome.pivots,
            nodes: outcome.nodes,
            bound: outcome.bound,
        },
    }
}

/// One certificate defect.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub kind: String,
    pub index: usize,
    pub amount: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Verify primal feasibility, dual signs, complementary slackness, and the
/// primal/dual objective match of an OPTIMAL solution. Exact solutions are
/// checked with zero tolerance.
pub fn check_certificate(p: &LPInstance, s: &LpSolution) -> CertificateReport {
    match s {
        LpSolution::Exact(sol) => check_generic(p, sol, Rational::zero(), Rational::zero()),
        LpSolution::Float(sol) => check_generic(p, sol, 1e-9, 1e-6),
    }
}

fn check_generic<T: Scalar>(
    p: &LPInstance,
    s: &Solution<T>,
    tol: T,
    obj_tol: T,
) -> CertificateReport {
    let mut violations = Vec::new();
    let mut push = |kind: &str, index: usize, amount: f64| {
        violations.push(Violation {
            kind: kind.to_owned(),
            index,
            amount,
        });
    };
    if s.status != SolveStatus::Optimal || s.value.is_none() {
        push("not_optimal", 0, 0.0);
        return CertificateReport {
            ok: false,
            violations,
        };
    }
    let n = p.num_vars;
    let m = p.num_rows();
    let x = &s.primal;
    let y = &s.dual;
    if x.len() != n || y.len() != m {
        push("shape_mismatch", 0, 0.0);
        return CertificateReport {
            ok: false,
            violations,
        };
    }

    // recompute activities and reduced costs from scratch
    let activity: Vec<T> = (0..m)
        .map(|i| {
            let mut acc = T::zero();
            for j in 0..n {
                acc = acc.add_ref(&T::from_dyadic(&p.matrix[i][j]).mul_ref(&x[j]));
            }
            acc
        })
        .collect();
    let reduced: Vec<T> = (0..n)
        .map(|j| {
            let mut d = T::from_dyadic(&p.objective[j]);
            for i in 0..m {
                d = d.sub_ref(&T::from_dyadic(&p.matrix[i][j]).mul_ref(&y[i]));
            }
            d
        })
        .collect();

    let neg_tol = tol.neg_ref();
    for i in 0..m {
        let lo = T::from_dyadic(&p.row_lower[i]);
        let up = T::from_dyadic(&p.row_upper[i]);
        if activity[i].sub_ref(&lo) < neg_tol {
            push("row_lower", i, lo.sub_ref(&activity[i]).to_f64());
        }
        if up.sub_ref(&activity[i]) < neg_tol {
            push("row_upper", i, activity[i].sub_ref(&up).to_f64());
        }
        // complementary slackness on rows
        if y[i] > tol && activity[i].sub_ref(&lo).abs_ref() > tol {
            push("row_slackness", i, y[i].to_f64());
        }
        if y[i] < neg_tol && activity[i].sub_ref(&up).abs_ref() > tol {
            push("row_slackness", i, y[i].to_f64());
        }
    }
    for j in 0..n {
        let lo = T::from_dyadic(&p.var_lower[j]);
        let up = p.var_upper[j].as_ref().map(T::from_dyadic);
        if x[j].sub_ref(&lo) < neg_tol {
            push("var_lower", j, lo.sub_ref(&x[j]).to_f64());
        }
        if let Some(u) = &up {
            if u.sub_ref(&x[j]) < neg_tol {
                push("var_upper", j, x[j].sub_ref(u).to_f64());
            }
        }
        let pinned = matches!(&up, Some(u) if *u == lo);
        if pinned {
            continue;
        }
        if reduced[j] > tol && x[j].sub_ref(&lo).abs_ref() > tol {
            push("var_slackness", j, reduced[j].to_f64());
        }
        if reduced[j] < neg_tol {
            match &up {
                Some(u) if x[j].sub_ref(u).abs_ref() <= tol => {}
                _ => push("var_slackness", j, reduced[j].to_f64()),
            }
        }
    }

    // strong duality via the bound form of the dual objective
    let mut dual_obj = T::zero();
    for i in 0..m {
        if y[i] > tol {
            dual_obj = dual_obj.add_ref(&y[i].mul_ref(&T::from_dyadic(&p.row_lower[i])));
        } else if y[i] < neg_tol {
            dual_obj = dual_obj.add_ref(&y[i].mul_ref(&T::from_dyadic(&p.row_upper[i])));
        }
    }
    for j in 0..n {
        if reduced[j] > tol {
            dual_obj = dual_obj.add_ref(&reduced[j].mul_ref(&T::from_dyadic(&p.var_lower[j])));
        } else if reduced[j] < neg_tol {
            if let Some(u) = &p.var_upper[j] {
                dual_obj = dual_obj.add_ref(&reduced[j].mul_ref(&T::from_dyadic(u)));
            }
        }
    }
    let primal_obj = {
        let mut acc = T::zero();
        for j in 0..n {
            acc = acc.add_ref(&T::from_dyadic(&p.objective[j]).mul_ref(&x[j]));
        }
        acc
    };
    if primal_obj.sub_ref(&dual_obj).abs_ref() > obj_tol {
        push(
            "objective_mismatch",
            0,
            primal_obj.sub_ref(&dual_obj).to_f64(),
        );
    }
    let reported = s.value.clone().expect("checked optimal");
    if primal_obj.sub_ref(&reported).abs_ref() > obj_tol {
        push("value_mismatch", 0, primal_obj.sub_ref(&reported).to_f64());
    }

    CertificateReport {
        ok: violations.is_empty(),
        violations,
    }
}
