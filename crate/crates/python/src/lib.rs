//! Python bindings: the main torus/domination operations and the LP-backed
//! bound pipelines, exposed as plain functions returning tuples and dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use expdom::bounds::{self, BoundsError};
use expdom::domination;
use expdom::lpmodel::{self, ModelMode};
use expdom::solver::{self, ArithmeticMode, BranchBudget, SolveStatus};
use expdom::torus::{self, TorusDims, Vertex};

fn dims(m: u32, n: u32) -> PyResult<TorusDims> {
    TorusDims::new(m, n).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn arith_mode(arith: &str) -> PyResult<ArithmeticMode> {
    match arith {
        "exact" => Ok(ArithmeticMode::Exact),
        "float" => Ok(ArithmeticMode::float_default()),
        other => Err(PyValueError::new_err(format!(
            "arith must be 'exact' or 'float', got {other:?}"
        ))),
    }
}

fn model_mode(finite: Option<(u32, u32)>) -> PyResult<ModelMode> {
    Ok(match finite {
        Some((m, n)) => ModelMode::Finite(dims(m, n)?),
        None => ModelMode::Asymptotic,
    })
}

fn bounds_err(e: BoundsError) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        serde_json::Value::Null => py.None().into_bound(py),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.into_any(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_any()
        }
    })
}

/// Shortest-path distance on the torus C_m x C_n.
#[pyfunction]
fn distance(m: u32, n: u32, u: (u32, u32), v: (u32, u32)) -> PyResult<u32> {
    let d = dims(m, n)?;
    Ok(torus::distance(
        d,
        Vertex::new(d, u.0, u.1),
        Vertex::new(d, v.0, v.1),
    ))
}

/// Weight (1/2)^(dist-1) as (float, exact dyadic string).
#[pyfunction]
fn weight(m: u32, n: u32, u: (u32, u32), v: (u32, u32)) -> PyResult<(f64, String)> {
    let d = dims(m, n)?;
    let w = torus::weight(d, Vertex::new(d, u.0, u.1), Vertex::new(d, v.0, v.1));
    Ok((w.to_f64(), w.to_string()))
}

/// Total weight one vertex assigns to the whole torus.
#[pyfunction]
fn total_weight(m: u32, n: u32) -> PyResult<(f64, String)> {
    let d = dims(m, n)?;
    let w = torus::total_weight(d, Vertex::new(d, 0, 0));
    Ok((w.to_f64(), w.to_string()))
}

/// Exact verification of a candidate dominating set.
#[pyfunction]
fn verify_set<'py>(
    py: Python<'py>,
    m: u32,
    n: u32,
    vertices: Vec<(u32, u32)>,
) -> PyResult<Bound<'py, PyDict>> {
    let d = dims(m, n)?;
    let set = domination::CandidateSet::new(
        d,
        vertices.into_iter().map(|(r, c)| Vertex::new(d, r, c)),
    );
    let report = domination::verify(&set);
    let dict = PyDict::new(py);
    dict.set_item("dominating", report.dominating)?;
    dict.set_item("min_received", report.min_received.to_f64())?;
    dict.set_item("min_received_exact", report.min_received.to_string())?;
    let deficient = PyList::empty(py);
    for (v, w) in &report.deficient {
        deficient.append(((v.row(), v.col()), w.to_string()))?;
    }
    dict.set_item("deficient", deficient)?;
    Ok(dict)
}

/// Exhaustive minimum search; returns (gamma or None, witness or None).
#[pyfunction]
#[pyo3(signature = (m, n, cap=None, force=false))]
fn bruteforce(
    m: u32,
    n: u32,
    cap: Option<u32>,
    force: bool,
) -> PyResult<(Option<u32>, Option<Vec<(u32, u32)>>)> {
    let d = dims(m, n)?;
    let cap = cap.unwrap_or((d.vertex_count()).min(u32::MAX as u64) as u32);
    let res = domination::min_expdom_bruteforce(d, cap, force)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let witness = res
        .witness
        .map(|w| w.vertices().map(|v| (v.row(), v.col())).collect());
    Ok((res.gamma, witness))
}

/// The diagonal selection tiled over C_{13a} x C_{13b}.
#[pyfunction]
fn diagonal_tiling(step: u32, a: u32, b: u32) -> PyResult<Vec<(u32, u32)>> {
    let set = domination::diagonal_tiling(step, a, b)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(set.vertices().map(|v| (v.row(), v.col())).collect())
}

/// Steps whose diagonal selection dominates C_13 x C_13.
#[pyfunction]
fn find_tiling_steps() -> PyResult<Vec<u32>> {
    domination::find_tiling_steps().map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn solution_dict<'py>(
    py: Python<'py>,
    sol: &solver::LpSolution,
) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item(
        "status",
        match sol.status() {
            SolveStatus::Optimal => "OPTIMAL",
            SolveStatus::Infeasible => "INFEASIBLE",
            SolveStatus::Unbounded => "UNBOUNDED",
            SolveStatus::BudgetExceeded => "BUDGET_EXCEEDED",
        },
    )?;
    dict.set_item("value", sol.value_f64())?;
    dict.set_item("value_exact", sol.value_exact_string())?;
    dict.set_item("bound", sol.bound_f64())?;
    dict.set_item("pivots", sol.pivots())?;
    dict.set_item("nodes_explored", sol.nodes())?;
    Ok(dict)
}

/// Assemble and solve the main window program.
#[pyfunction]
#[pyo3(signature = (r, arith="float", finite=None))]
fn solve_main<'py>(
    py: Python<'py>,
    r: u32,
    arith: &str,
    finite: Option<(u32, u32)>,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = model_mode(finite)?;
    let inst = lpmodel::assemble_main(r, &mode).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let sol = solver::solve_lp(&inst, &arith_mode(arith)?)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    solution_dict(py, &sol)
}

/// Assemble and solve the isolated-vertex variant (r = 9).
#[pyfunction]
#[pyo3(signature = (arith="float", finite=None))]
fn solve_isolated<'py>(
    py: Python<'py>,
    arith: &str,
    finite: Option<(u32, u32)>,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = model_mode(finite)?;
    let inst = lpmodel::assemble_isolated(&mode).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let sol = solver::solve_lp(&inst, &arith_mode(arith)?)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    solution_dict(py, &sol)
}

/// Assemble and solve the {0,2}-marked variant by branch and bound.
#[pyfunction]
#[pyo3(signature = (arith="float", finite=None, max_nodes=1_000_000, max_time=300.0))]
fn solve_milp_program<'py>(
    py: Python<'py>,
    arith: &str,
    finite: Option<(u32, u32)>,
    max_nodes: u64,
    max_time: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = model_mode(finite)?;
    let inst = lpmodel::assemble_milp(&mode).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let budget = BranchBudget {
        max_nodes,
        max_time: std::time::Duration::from_secs_f64(max_time),
    };
    let sol = solver::solve_milp(&inst, &arith_mode(arith)?, &budget)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    solution_dict(py, &sol)
}

/// Full bound report: the main pipeline, or the mixed bound when alpha is
/// given. Returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (alpha=None, arith="float", finite=None))]
fn bound_report<'py>(
    py: Python<'py>,
    alpha: Option<f64>,
    arith: &str,
    finite: Option<(u32, u32)>,
) -> PyResult<Bound<'py, PyAny>> {
    let mode = model_mode(finite)?;
    let am = arith_mode(arith)?;
    let report = match alpha {
        Some(a) => bounds::run_genbound(a, &mode, &am).map_err(bounds_err)?,
        None => bounds::run_main_theorem(&mode, &am).map_err(bounds_err)?,
    };
    let json = serde_json::to_value(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &json)
}

/// Isolated-fraction threshold compatible with a density upper bound.
#[pyfunction]
#[pyo3(signature = (upper_density, arith="float"))]
fn alpha_threshold(upper_density: f64, arith: &str) -> PyResult<f64> {
    bounds::alpha_threshold(upper_density, &ModelMode::Asymptotic, &arith_mode(arith)?)
        .map_err(bounds_err)
}

#[pymodule]
fn expdom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(weight, m)?)?;
    m.add_function(wrap_pyfunction!(total_weight, m)?)?;
    m.add_function(wrap_pyfunction!(verify_set, m)?)?;
    m.add_function(wrap_pyfunction!(bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(diagonal_tiling, m)?)?;
    m.add_function(wrap_pyfunction!(find_tiling_steps, m)?)?;
    m.add_function(wrap_pyfunction!(solve_main, m)?)?;
    m.add_function(wrap_pyfunction!(solve_isolated, m)?)?;
    m.add_function(wrap_pyfunction!(solve_milp_program, m)?)?;
    m.add_function(wrap_pyfunction!(bound_report, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_threshold, m)?)?;
    Ok(())
}
