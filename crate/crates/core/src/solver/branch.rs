//! Best-first branch and bound for {0,2}-valued marked variables.
//!
//! The relaxation caps every marked variable to the interval spanned by its
//! allowed values; branching fixes the most-fractional marked variable to
//! each allowed value in turn. The incumbent and the best open bound are
//! carried so a budgeted run still certifies a gap.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::dyadic::DyadicRational;
use crate::lpmodel::{IntegerMarks, LPInstance};

use super::arith::Scalar;
use super::simplex::EngineResult;
use super::SolverError;

/// Node and wall-clock limits for a branch-and-bound run.
#[derive(Debug, Clone)]
pub struct BranchBudget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl Default for BranchBudget {
    fn default() -> Self {
        BranchBudget {
            max_nodes: 1_000_000,
            max_time: Duration::from_secs(300),
        }
    }
}

/// Float-mode integrality tolerance for branching decisions.
const INT_TOL: f64 = 1e-7;

/// Relaxation outcome handed back by the per-node solver closure.
pub(crate) enum Relaxed<T> {
    Optimal(EngineResult<T>),
    Infeasible,
}

pub(crate) struct BranchOutcome<T> {
    pub incumbent: Option<EngineResult<T>>,
    /// Best proven lower bound over the whole tree; `None` only when the
    /// budget ran out before the root relaxation finished.
    pub bound: Option<T>,
    pub nodes: u64,
    pub budget_exceeded: bool,
    pub pivots: u64,
}

struct Node<T> {
    fixings: Vec<(usize, DyadicRational)>,
    /// Parent relaxation value; `None` at the root.
    bound: Option<T>,
    key: f64,
    seq: u64,
}

impl<T> PartialEq for Node<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.seq == other.seq
    }
}
impl<T> Eq for Node<T> {}
impl<T> PartialOrd for Node<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Node<T> {
    // max-heap: invert so the smallest bound pops first; sequence breaks ties
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn relaxation(p: &LPInstance, marks: &IntegerMarks) -> LPInstance {
    let lo = marks.values.iter().min().expect("nonempty values").clone();
    let hi = marks.values.iter().max().expect("nonempty values").clone();
    let mut relaxed = p.clone();
    relaxed.integer_marks = None;
    for &j in &marks.indices {
        if relaxed.var_lower[j] < lo {
            relaxed.var_lower[j] = lo.clone();
        }
        let cap = match &relaxed.var_upper[j] {
            Some(u) if *u < hi => u.clone(),
            _ => hi.clone(),
        };
        relaxed.var_upper[j] = Some(cap);
    }
    relaxed
}

fn apply_fixings(base: &LPInstance, fixings: &[(usize, DyadicRational)]) -> LPInstance {
    let mut p = base.clone();
    for (j, v) in fixings {
        p.var_lower[*j] = v.clone();
        p.var_upper[*j] = Some(v.clone());
    }
    p
}

/// Distance from a value to the nearest allowed mark value.
fn fractionality<T: Scalar>(x: &T, values: &[DyadicRational]) -> f64 {
    let xf = x.to_f64();
    values
        .iter()
        .map(|v| (xf - v.to_f64()).abs())
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn branch_and_bound<T, F>(
    p: &LPInstance,
    int_exact: bool,
    budget: &BranchBudget,
    mut solve: F,
) -> Result<BranchOutcome<T>, SolverError>
where
    T: Scalar,
    F: FnMut(&LPInstance) -> Result<Relaxed<T>, SolverError>,
{
    let marks = p
        .integer_marks
        .as_ref()
        .ok_or(SolverError::MissingMarks)?
        .clone();
    let base = relaxation(p, &marks);
    let start = Instant::now();
    let int_tol = if int_exact { 0.0 } else { INT_TOL };

    let mut heap: BinaryHeap<Node<T>> = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Node {
        fixings: Vec::new(),
        bound: None,
        key: f64::NEG_INFINITY,
        seq,
    });

    let mut nodes = 0u64;
    let mut pivots = 0u64;
    let mut incumbent: Option<EngineResult<T>> = None;

    while let Some(node) = heap.pop() {
        if nodes >= budget.max_nodes || start.elapsed() > budget.max_time {
            // the tree bound is the weakest bound among open nodes and the
            // incumbent's own value
            let mut open: Option<T> = node.bound.clone();
            let mut unknown = node.bound.is_none();
            for other in heap.iter() {
                match &other.bound {
                    None => unknown = true,
                    Some(b) => {
                        open = Some(match open {
                            Some(o) if o <= *b => o,
                            _ => b.clone(),
                        })
                    }
                }
            }
            let bound = if unknown { None } else { open };
            return Ok(BranchOutcome {
                incumbent,
                bound,
                nodes,
                budget_exceeded: true,
                pivots,
            });
        }
        // prune against an incumbent found after this node was queued
        if let (Some(b), Some(inc)) = (&node.bound, &incumbent) {
            if *b >= inc.value {
                continue;
            }
        }
        nodes += 1;

        let sub = apply_fixings(&base, &node.fixings);
        let relaxed = match solve(&sub)? {
            Relaxed::Optimal(r) => r,
            Relaxed::Infeasible => continue,
        };
        pivots += relaxed.pivots;
        if let Some(inc) = &incumbent {
            if relaxed.value >= inc.value {
                continue;
            }
        }

        // most fractional marked variable, ties to the lowest index
        let mut branch_var: Option<(usize, f64)> = None;
        for &j in &marks.indices {
            let frac = fractionality(&relaxed.x[j], &marks.values);
            if frac > int_tol {
                match branch_var {
                    Some((_, f)) if f >= frac => {}
                    _ => branch_var = Some((j, frac)),
                }
            }
        }

        match branch_var {
            None => incumbent = Some(relaxed),
            Some((j, _)) => {
                for v in &marks.values {
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, v.clone()));
                    seq += 1;
                    heap.push(Node {
                        fixings,
                        bound: Some(relaxed.value.clone()),
                        key: relaxed.value.to_f64(),
                        seq,
                    });
                }
            }
        }
    }

    let bound = incumbent.as_ref().map(|inc| inc.value.clone());
    Ok(BranchOutcome {
        incumbent,
        bound,
        nodes,
        budget_exceeded: false,
        pivots,
    })
}
