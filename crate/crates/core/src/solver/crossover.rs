//! Exact reconstruction of a simplex basis: given the final basis and
//! nonbasic statuses of a floating-point run, rebuild the basic solution and
//! duals in big-rational arithmetic and verify optimality exactly. Succeeds
//! only when the rounded run identified a genuinely optimal basis.

use num_traits::{One, Zero};

use super::arith::Rational;
use super::simplex::{EngineResult, EngineStatus};
use crate::lpmodel::LPInstance;

/// Dense exact linear solve `a x = rhs` by Gaussian elimination with
/// smallest-representation pivoting. Returns `None` on singularity.
fn solve_dense(mut a: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        // pick the nonzero pivot with the smallest representation
        let mut pick: Option<(usize, u64)> = None;
        for (r, &pr) in perm.iter().enumerate().skip(col) {
            let v = &a[pr][col];
            if v.is_zero() {
                continue;
            }
            let size = v.numer().bits() + v.denom().bits();
            match pick {
                Some((_, s)) if s <= size => {}
                _ => pick = Some((r, size)),
            }
        }
        let (r, _) = pick?;
        perm.swap(col, r);
        let prow = perm[col];
        let pivot = a[prow][col].clone();
        for &orow in perm.iter().skip(col + 1) {
            if a[orow][col].is_zero() {
                continue;
            }
            let f = &a[orow][col] / &pivot;
            for j in col..n {
                let t = &a[prow][j] * &f;
                a[orow][j] = &a[orow][j] - &t;
            }
            let t = &rhs[prow] * &f;
            rhs[orow] = &rhs[orow] - &t;
        }
    }
    // back substitution
    let mut x = vec![Rational::zero(); n];
    for col in (0..n).rev() {
        let prow = perm[col];
        let mut acc = rhs[prow].clone();
        for j in col + 1..n {
            if !a[prow][j].is_zero() {
                acc = &acc - &(&a[prow][j] * &x[j]);
            }
        }
        x[col] = &acc / &a[prow][col];
    }
    Some(x)
}

/// Column `j` of `[A | -I]` in exact arithmetic.
fn column(p: &LPInstance, j: usize) -> Vec<Rational> {
    let m = p.num_rows();
    let n = p.num_vars;
    if j < n {
        (0..m).map(|i| p.matrix[i][j].to_rational()).collect()
    } else {
        let mut e = vec![Rational::zero(); m];
        e[j - n] = -Rational::one();
        e
    }
}

/// Try to certify the basis of a finished floating-point run exactly.
pub(crate) fn certify_basis(
    p: &LPInstance,
    float_result: &EngineResult<f64>,
) -> Option<EngineResult<Rational>> {
    let m = p.num_rows();
    let n = p.num_vars;
    let mut basis = Vec::with_capacity(m);
    for b in &float_result.basis {
        basis.push((*b)?); // a leftover artificial defeats reconstruction
    }

    let lower = |j: usize| -> Rational {
        if j < n {
            p.var_lower[j].to_rational()
        } else {
            p.row_lower[j - n].to_rational()
        }
    };
    let upper = |j: usize| -> Option<Rational> {
        if j < n {
            p.var_upper[j].as_ref().map(|u| u.to_rational())
        } else {
            Some(p.row_upper[j - n].to_rational())
        }
    };

    let mut is_basic = vec![false; n + m];
    for &b in &basis {
        is_basic[b] = true;
    }

    // nonbasic values from the recorded statuses
    let mut nb_value = vec![Rational::zero(); n + m];
    for j in 0..n + m {
        if is_basic[j] {
            continue;
        }
        nb_value[j] = if float_result.at_upper[j] {
            upper(j)?
        } else {
            lower(j)
        };
    }

    // rhs = -(sum of nonbasic columns times their values)
    let mut rhs = vec![Rational::zero(); m];
    for j in 0..n + m {
        if is_basic[j] || nb_value[j].is_zero() {
            continue;
        }
        let col = column(p, j);
        for i in 0..m {
            if !col[i].is_zero() {
                rhs[i] = &rhs[i] - &(&col[i] * &nb_value[j]);
            }
        }
    }

    let b_cols: Vec<Vec<Rational>> = basis.iter().map(|&b| column(p, b)).collect();
    let b_mat: Vec<Vec<Rational>> = (0..m)
        .map(|i| (0..m).map(|k| b_cols[k][i].clone()).collect())
        .collect();
    let beta = solve_dense(b_mat.clone(), rhs)?;

    // primal feasibility of the basic variables
    for (slot, &b) in basis.iter().enumerate() {
        if beta[slot] < lower(b) {
            return None;
        }
        if let Some(u) = upper(b) {
            if beta[slot] > u {
                return None;
            }
        }
    }

    // duals: B^T y = c_B
    let cost = |j: usize| -> Rational {
        if j < n {
            p.objective[j].to_rational()
        } else {
            Rational::zero()
        }
    };
    let bt: Vec<Vec<Rational>> = (0..m)
        .map(|i| (0..m).map(|k| b_mat[k][i].clone()).collect())
        .collect();
    let c_b: Vec<Rational> = basis.iter().map(|&b| cost(b)).collect();
    let y = solve_dense(bt, c_b)?;

    // dual feasibility at every nonbasic column
    let mut reduced_full = vec![Rational::zero(); n + m];
    for j in 0..n + m {
        if is_basic[j] {
            continue;
        }
        let col = column(p, j);
        let mut d = cost(j);
        for i in 0..m {
            if !col[i].is_zero() {
                d = &d - &(&y[i] * &col[i]);
            }
        }
        let fixed = matches!(upper(j), Some(u) if u == lower(j));
        if !fixed {
            if float_result.at_upper[j] {
                if d > Rational::zero() {
                    return None;
                }
            } else if d < Rational::zero() {
                return None;
            }
        }
        reduced_full[j] = d;
    }

    // assemble the exact solution
    let mut value_of = vec![Rational::zero(); n + m];
    for j in 0..n + m {
        value_of[j] = nb_value[j].clone();
    }
    for (slot, &b) in basis.iter().enumerate() {
        value_of[b] = beta[slot].clone();
    }
    let x: Vec<Rational> = (0..n).map(|j| value_of[j].clone()).collect();

    let row_activity: Vec<Rational> = (0..m)
        .map(|i| {
            let mut acc = Rational::zero();
            for j in 0..n {
                if !x[j].is_zero() {
                    acc = &acc + &(&p.matrix[i][j].to_rational() * &x[j]);
                }
            }
            acc
        })
        .collect();
    // the slack slots must agree with the recomputed activities
    for i in 0..m {
        if row_activity[i] != value_of[n + i] {
            return None;
        }
        if row_activity[i] < p.row_lower[i].to_rational()
            || row_activity[i] > p.row_upper[i].to_rational()
        {
            return None;
        }
    }

    let value = {
        let mut acc = Rational::zero();
        for j in 0..n {
            if !x[j].is_zero() {
                acc = &acc + &(&p.objective[j].to_rational() * &x[j]);
            }
        }
        acc
    };
    let reduced: Vec<Rational> = (0..n).map(|j| reduced_full[j].clone()).collect();

    Some(EngineResult {
        status: EngineStatus::Optimal,
        x,
        y,
        reduced,
        row_activity,
        value,
        pivots: float_result.pivots,
        basis: basis.into_iter().map(Some).collect(),
        at_upper: float_result.at_upper.clone(),
    })
}
