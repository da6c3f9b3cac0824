//! Exhaustive vertex enumeration for tiny instances: an oracle that is
//! independent of the simplex path. Every candidate basic point (a choice of
//! tight variable bounds and tight row sides totalling the variable count)
//! is solved exactly and filtered for feasibility.

use num_traits::Zero;

use super::arith::Rational;
use super::SolverError;
use crate::lpmodel::LPInstance;

pub const ORACLE_VAR_LIMIT: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Optimal { value: Rational },
    Infeasible,
}

struct Lu {
    /// Row-reduced matrix, row-permuted.
    a: Vec<Vec<Rational>>,
    perm: Vec<usize>,
    /// Elimination multipliers keyed by (eliminated row, pivot column).
    mults: Vec<Vec<Rational>>,
}

fn factor(cols: &[Vec<Rational>]) -> Option<Lu> {
    let k = cols.len();
    let mut a: Vec<Vec<Rational>> = (0..k)
        .map(|i| (0..k).map(|j| cols[j][i].clone()).collect())
        .collect();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut mults = vec![vec![Rational::zero(); k]; k];
    for col in 0..k {
        let pivot_pos = (col..k).find(|&r| !a[perm[r]][col].is_zero())?;
        perm.swap(col, pivot_pos);
        let prow = perm[col];
        let pivot = a[prow][col].clone();
        for r in col + 1..k {
            let orow = perm[r];
            if a[orow][col].is_zero() {
                continue;
            }
            let f = &a[orow][col] / &pivot;
            for j in col..k {
                let t = &a[prow][j] * &f;
                a[orow][j] = &a[orow][j] - &t;
            }
            mults[orow][col] = f;
        }
    }
    Some(Lu { a, perm, mults })
}

impl Lu {
    fn solve(&self, rhs: &[Rational]) -> Vec<Rational> {
        let k = rhs.len();
        let mut b: Vec<Rational> = rhs.to_vec();
        for col in 0..k {
            let prow = self.perm[col];
            for r in col + 1..k {
                let orow = self.perm[r];
                if !self.mults[orow][col].is_zero() {
                    let t = &self.mults[orow][col] * &b[prow];
                    b[orow] = &b[orow] - &t;
                }
            }
        }
        let mut x = vec![Rational::zero(); k];
        for col in (0..k).rev() {
            let prow = self.perm[col];
            let mut acc = b[prow].clone();
            for j in col + 1..k {
                if !self.a[prow][j].is_zero() {
                    acc = &acc - &(&self.a[prow][j] * &x[j]);
                }
            }
            x[col] = &acc / &self.a[prow][col];
        }
        x
    }
}

/// Enumerate all basic candidate points and return the exact minimum.
pub fn vertex_enumeration_oracle(p: &LPInstance) -> Result<OracleOutcome, SolverError> {
    if p.num_vars > ORACLE_VAR_LIMIT {
        return Err(SolverError::SizeLimit {
            vars: p.num_vars,
            limit: ORACLE_VAR_LIMIT,
        });
    }
    if p.integer_marks.is_some() {
        return Err(SolverError::UnexpectedMarks);
    }
    p.validate()
        .map_err(|e| SolverError::Model(e.to_string()))?;

    let n = p.num_vars;
    let m = p.num_rows();
    let a: Vec<Vec<Rational>> = p
        .matrix
        .iter()
        .map(|row| row.iter().map(|d| d.to_rational()).collect())
        .collect();
    let c: Vec<Rational> = p.objective.iter().map(|d| d.to_rational()).collect();
    let lo: Vec<Rational> = p.var_lower.iter().map(|d| d.to_rational()).collect();
    let up: Vec<Option<Rational>> = p
        .var_upper
        .iter()
        .map(|u| u.as_ref().map(|d| d.to_rational()))
        .collect();
    let row_lo: Vec<Rational> = p.row_lower.iter().map(|d| d.to_rational()).collect();
    let row_up: Vec<Rational> = p.row_upper.iter().map(|d| d.to_rational()).collect();

    // variables pinned by equal bounds are always fixed
    let pinned: Vec<bool> = (0..n)
        .map(|j| matches!(&up[j], Some(u) if *u == lo[j]))
        .collect();
    let movable: Vec<usize> = (0..n).filter(|&j| !pinned[j]).collect();

    let feasible = |x: &[Rational]| -> bool {
        for j in 0..n {
            if x[j] < lo[j] {
                return false;
            }
            if let Some(u) = &up[j] {
                if x[j] > *u {
                    return false;
                }
            }
        }
        for i in 0..m {
            let mut act = Rational::zero();
            for j in 0..n {
                if !x[j].is_zero() {
                    act = &act + &(&a[i][j] * &x[j]);
                }
            }
            if act < row_lo[i] || act > row_up[i] {
                return false;
            }
        }
        true
    };

    let objective = |x: &[Rational]| -> Rational {
        let mut acc = Rational::zero();
        for j in 0..n {
            if !x[j].is_zero() {
                acc = &acc + &(&c[j] * &x[j]);
            }
        }
        acc
    };

    let mut best: Option<Rational> = None;
    let mut consider = |x: &[Rational]| {
        if feasible(x) {
            let v = objective(x);
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
    };

    // choose the subset of movable variables fixed at a bound
    let mv = movable.len();
    for fix_mask in 0u32..(1u32 << mv) {
        let free: Vec<usize> = (0..mv)
            .filter(|&t| fix_mask & (1 << t) == 0)
            .map(|t| movable[t])
            .collect();
        let fixed: Vec<usize> = (0..mv)
            .filter(|&t| fix_mask & (1 << t) != 0)
            .map(|t| movable[t])
            .collect();
        let k = free.len();
        if k > m {
            continue;
        }

        // every assignment of bound values to the fixed variables
        let mut bound_choice = vec![0u8; fixed.len()];
        'assign: loop {
            let mut x = vec![Rational::zero(); n];
            let mut valid = true;
            for j in 0..n {
                if pinned[j] {
                    x[j] = lo[j].clone();
                }
            }
            for (t, &j) in fixed.iter().enumerate() {
                x[j] = if bound_choice[t] == 0 {
                    lo[j].clone()
                } else {
                    match &up[j] {
                        Some(u) => u.clone(),
                        None => {
                            valid = false;
                            break;
                        }
                    }
                };
            }

            if valid {
                if k == 0 {
                    consider(&x);
                } else {
                    enumerate_tight_rows(&a, &row_lo, &row_up, &free, &x, m, k, &mut consider);
                }
            }

            // advance the bound assignment odometer
            let mut t = 0;
            loop {
                if t == fixed.len() {
                    break 'assign;
                }
                bound_choice[t] += 1;
                if bound_choice[t] <= 1 {
                    break;
                }
                bound_choice[t] = 0;
                t += 1;
            }
            if fixed.is_empty() {
                break;
            }
        }
    }

    Ok(match best {
        Some(value) => OracleOutcome::Optimal { value },
        None => OracleOutcome::Infeasible,
    })
}

/// For a set of free variables, try every k-subset of rows held tight at
/// either side and solve for the free values.
#[allow(clippy::too_many_arguments)]
fn enumerate_tight_rows(
    a: &[Vec<Rational>],
    row_lo: &[Rational],
    row_up: &[Rational],
    free: &[usize],
    x_base: &[Rational],
    m: usize,
    k: usize,
    consider: &mut impl FnMut(&[Rational]),
) {
    let n = x_base.len();
    let mut rows: Vec<usize> = (0..k).collect();
    loop {
        // factor A[rows][free] once, reuse for every side assignment
        let cols: Vec<Vec<Rational>> = free
            .iter()
            .map(|&j| rows.iter().map(|&i| a[i][j].clone()).collect())
            .collect();
        if let Some(lu) = factor(&cols) {
            // base contribution of the fixed variables to each tight row
            let base: Vec<Rational> = rows
                .iter()
                .map(|&i| {
                    let mut acc = Rational::zero();
                    for j in 0..n {
                        if !x_base[j].is_zero() && !free.contains(&j) {
                            acc = &acc + &(&a[i][j] * &x_base[j]);
                        }
                    }
                    acc
                })
                .collect();
            let mut sides = vec![0u8; k];
            'sides: loop {
                let rhs: Vec<Rational> = (0..k)
                    .map(|t| {
                        let target = if sides[t] == 0 {
                            &row_lo[rows[t]]
                        } else {
                            &row_up[rows[t]]
                        };
                        target - &base[t]
                    })
                    .collect();
                let sol = lu.solve(&rhs);
                let mut x = x_base.to_vec();
                for (t, &j) in free.iter().enumerate() {
                    x[j] = sol[t].clone();
                }
                consider(&x);

                let mut t = 0;
                loop {
                    if t == k {
                        break 'sides;
                    }
                    sides[t] += 1;
                    if sides[t] <= 1 {
                        // skip the duplicate side when the row is an equality
                        if row_lo[rows[t]] == row_up[rows[t]] {
                            sides[t] = 0;
                            t += 1;
                            continue;
                        }
                        break;
                    }
                    sides[t] = 0;
                    t += 1;
                }
            }
        }

        // next k-combination of rows
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if rows[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        rows[i] += 1;
        for j in i + 1..k {
            rows[j] = rows[j - 1] + 1;
        }
    }
}
