//! Dense two-phase primal simplex over bounded variables.
//!
//! Range rows `L <= Ax <= U` are held natively as bounded slack variables
//! (`Ax - s = 0`), so the basis never grows past one slot per row. Pricing is
//! Dantzig's rule, switching permanently to Bland's least-index rule after a
//! run of non-improving pivots, which guarantees termination in exact
//! arithmetic.


use super::arith::Scalar;
use crate::lpmodel::LPInstance;

/// Consecutive non-improving pivots tolerated before switching to Bland.
const DEGENERACY_SWITCH: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EngineStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

#[derive(Debug, Clone)]
pub(crate) struct EngineResult<T> {
    pub status: EngineStatus,
    /// Structural variable values.
    pub x: Vec<T>,
    /// Row duals (sign convention: >= 0 when the row binds at its lower
    /// bound, <= 0 at its upper bound).
    pub y: Vec<T>,
    /// Structural reduced costs c - A^T y.
    pub reduced: Vec<T>,
    /// Row activities A x.
    pub row_activity: Vec<T>,
    pub value: T,
    pub pivots: u64,
    /// Basis column per row over [structural | slack] indices; `None` when a
    /// redundant-row artificial could not be pivoted out.
    pub basis: Vec<Option<usize>>,
    /// Nonbasic columns sitting at their upper bound, over [struct | slack].
    pub at_upper: Vec<bool>,
}

pub(crate) struct SimplexEngine<T: Scalar> {
    m: usize,
    n: usize,
    total: usize, // n structural + m slack + m artificial
    tab: Vec<Vec<T>>,
    lo: Vec<T>,
    up: Vec<Option<T>>,
    fixed: Vec<bool>,
    cost: Vec<T>,
    z: Vec<T>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    beta: Vec<T>,
    tol: T,
    neg_tol: T,
    pivots: u64,
    stalled: u32,
    bland: bool,
}

impl<T: Scalar> SimplexEngine<T> {
    pub fn new(p: &LPInstance, tol: T) -> Self {
        let m = p.num_rows();
        let n = p.num_vars;
        let total = n + 2 * m;

        let mut lo = Vec::with_capacity(total);
        let mut up = Vec::with_capacity(total);
        for j in 0..n {
            lo.push(T::from_dyadic(&p.var_lower[j]));
            up.push(p.var_upper[j].as_ref().map(T::from_dyadic));
        }
        for i in 0..m {
            lo.push(T::from_dyadic(&p.row_lower[i]));
            up.push(Some(T::from_dyadic(&p.row_upper[i])));
        }
        for _ in 0..m {
            lo.push(T::zero());
            up.push(None);
        }

        let fixed = (0..total)
            .map(|j| matches!(&up[j], Some(u) if *u == lo[j]))
            .collect::<Vec<_>>();

        // structural columns start at their lower bound
        let mut state = vec![VarState::AtLower; total];

        // row activity at the initial point
        let x0: Vec<T> = (0..n).map(|j| lo[j].clone()).collect();
        let activity: Vec<T> = (0..m)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..n {
                    if !x0[j].is_zero() {
                        acc = acc.add_ref(&T::from_dyadic(&p.matrix[i][j]).mul_ref(&x0[j]));
                    }
                }
                acc
            })
            .collect();

        let mut tab = vec![vec![T::zero(); total]; m];
        let mut basis = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        for i in 0..m {
            let slack = n + i;
            let art = n + m + i;
            let row_lo = lo[slack].clone();
            let row_up = up[slack].clone().expect("rows are two-sided");
            // B^{-1} row scaling: -1 for a basic slack, sign for an artificial
            let (basic_col, basic_val, scale) = if activity[i] < row_lo {
                // violation below: artificial = row_lo - activity > 0
                state[slack] = VarState::AtLower;
                (art, row_lo.sub_ref(&activity[i]), T::one())
            } else if matches!(&up[slack], Some(u) if activity[i] > *u) {
                state[slack] = VarState::AtUpper;
                (art, activity[i].sub_ref(&row_up), T::one().neg_ref())
            } else {
                (slack, activity[i].clone(), T::one().neg_ref())
            };
            for j in 0..n {
                tab[i][j] = T::from_dyadic(&p.matrix[i][j]).mul_ref(&scale);
            }
            tab[i][slack] = scale.neg_ref();
            // artificial column: + or - identity so its value is nonnegative
            tab[i][art] = T::one();
            state[basic_col] = VarState::Basic(i);
            basis.push(basic_col);
            beta.push(basic_val);
        }

        let neg_tol = tol.neg_ref();
        SimplexEngine {
            m,
            n,
            total,
            tab,
            lo,
            up,
            fixed,
            cost: vec![T::zero(); total],
            z: vec![T::zero(); total],
            state,
            basis,
            beta,
            tol,
            neg_tol,
            pivots: 0,
            stalled: 0,
            bland: false,
        }
    }

    fn is_pos(&self, v: &T) -> bool {
        *v > self.tol
    }

    fn is_neg(&self, v: &T) -> bool {
        *v < self.neg_tol
    }

    fn nonbasic_value(&self, j: usize) -> T {
        match self.state[j] {
            VarState::AtUpper => self.up[j].clone().expect("at-upper needs a bound"),
            _ => self.lo[j].clone(),
        }
    }

    fn recompute_reduced_costs(&mut self) {
        for j in 0..self.total {
            self.z[j] = self.cost[j].clone();
        }
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.total {
                if !self.tab[i][j].is_zero() {
                    self.z[j] = self.z[j].sub_ref(&cb.mul_ref(&self.tab[i][j]));
                }
            }
        }
        for i in 0..self.m {
            self.z[self.basis[i]] = T::zero();
        }
    }

    /// Entering column, or `None` at optimality for the current costs.
    /// Artificials never re-enter the basis.
    fn choose_entering(&self) -> Option<usize> {
        let limit = self.n + self.m;
        let mut best: Option<(usize, T)> = None;
        for j in 0..limit {
            if self.fixed[j] {
                continue;
            }
            let improving = match self.state[j] {
                VarState::Basic(_) => false,
                VarState::AtLower => self.is_neg(&self.z[j]),
                VarState::AtUpper => self.is_pos(&self.z[j]),
            };
            if !improving {
                continue;
            }
            if self.bland {
                return Some(j);
            }
            let score = self.z[j].abs_ref();
            match &best {
                Some((_, s)) if *s >= score => {}
                _ => best = Some((j, score)),
            }
        }
        best.map(|(j, _)| j)
    }

    /// Ratio test for entering column `q`. Returns (delta, leaving row) where
    /// a `None` row means the entering variable flips to its other bound.
    /// `None` overall means the problem is unbounded in this direction.
    fn ratio_test(&self, q: usize, increasing: bool) -> Option<(T, Option<usize>)> {
        // bound-flip span of the entering variable itself
        let mut best: Option<(T, Option<usize>)> = self.up[q]
            .as_ref()
            .map(|u| (u.sub_ref(&self.lo[q]), None));

        for i in 0..self.m {
            let t = &self.tab[i][q];
            if t.is_zero() {
                continue;
            }
            // effect on basic i per unit of entering movement
            let eff_pos = if increasing {
                self.is_neg(t) // beta_i grows when tab is negative
            } else {
                self.is_pos(t)
            };
            let eff_abs = t.abs_ref();
            if eff_abs <= self.tol {
                continue;
            }
            let b = self.basis[i];
            let margin = if eff_pos {
                match &self.up[b] {
                    Some(u) => u.sub_ref(&self.beta[i]),
                    None => continue,
                }
            } else {
                self.beta[i].sub_ref(&self.lo[b])
            };
            let margin = if margin < T::zero() { T::zero() } else { margin };
            let ratio = margin.div_ref(&eff_abs);
            let better = match &best {
                None => true,
                Some((r, leaving)) => {
                    ratio < *r
                        || (ratio == *r
                            && match leaving {
                                // deterministic tie-break: smallest basis column
                                Some(li) => self.basis[i] < self.basis[*li],
                                None => false,
                            })
                }
            };
            if better {
                best = Some((ratio, Some(i)));
            }
        }
        best
    }

    fn pivot(&mut self, r: usize, q: usize, delta: &T, increasing: bool) {
        let leaving = self.basis[r];
        // move all basic values
        if !delta.is_zero() {
            for i in 0..self.m {
                let t = &self.tab[i][q];
                if t.is_zero() {
                    continue;
                }
                let step = t.mul_ref(delta);
                self.beta[i] = if increasing {
                    self.beta[i].sub_ref(&step)
                } else {
                    self.beta[i].add_ref(&step)
                };
            }
        }
        let entering_value = if increasing {
            self.nonbasic_value(q).add_ref(delta)
        } else {
            self.nonbasic_value(q).sub_ref(delta)
        };

        // leaving variable exits at the bound it ran into
        let t_rq = self.tab[r][q].clone();
        let leaving_state = {
            let grew = if increasing {
                self.is_neg(&t_rq)
            } else {
                self.is_pos(&t_rq)
            };
            if grew { VarState::AtUpper } else { VarState::AtLower }
        };

        // eliminate column q from every other row
        let pivot_row: Vec<T> = self.tab[r].iter().map(|v| v.div_ref(&t_rq)).collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.tab[i][q].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..self.total {
                if !pivot_row[j].is_zero() {
                    self.tab[i][j] = self.tab[i][j].sub_ref(&f.mul_ref(&pivot_row[j]));
                }
            }
            self.tab[i][q] = T::zero();
        }
        let zq = self.z[q].clone();
        if !zq.is_zero() {
            for j in 0..self.total {
                if !pivot_row[j].is_zero() {
                    self.z[j] = self.z[j].sub_ref(&zq.mul_ref(&pivot_row[j]));
                }
            }
        }
        self.tab[r] = pivot_row;
        self.z[q] = T::zero();

        self.state[leaving] = leaving_state;
        self.state[q] = VarState::Basic(r);
        self.basis[r] = q;
        self.beta[r] = entering_value;
        self.pivots += 1;
    }

    fn bound_flip(&mut self, q: usize, delta: &T, increasing: bool) {
        for i in 0..self.m {
            let t = &self.tab[i][q];
            if t.is_zero() {
                continue;
            }
            let step = t.mul_ref(delta);
            self.beta[i] = if increasing {
                self.beta[i].sub_ref(&step)
            } else {
                self.beta[i].add_ref(&step)
            };
        }
        self.state[q] = if increasing {
            VarState::AtUpper
        } else {
            VarState::AtLower
        };
        self.pivots += 1;
    }

    /// Price-and-pivot loop for the current cost vector.
    fn optimize(&mut self) -> EngineStatus {
        loop {
            let Some(q) = self.choose_entering() else {
                return EngineStatus::Optimal;
            };
            let increasing = matches!(self.state[q], VarState::AtLower);
            let Some((delta, row)) = self.ratio_test(q, increasing) else {
                return EngineStatus::Unbounded;
            };
            let improving = !delta.is_zero() && !self.z[q].is_zero();
            match row {
                Some(r) => self.pivot(r, q, &delta, increasing),
                None => self.bound_flip(q, &delta, increasing),
            }
            if !self.bland {
                if improving {
                    self.stalled = 0;
                } else {
                    self.stalled += 1;
                    if self.stalled >= DEGENERACY_SWITCH {
                        self.bland = true;
                    }
                }
            }
        }
    }

    /// Pivot out artificials still basic after phase 1 (degenerate swaps).
    fn evict_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.n + self.m {
                continue;
            }
            let mut chosen: Option<usize> = None;
            let mut best_mag = T::zero();
            for j in 0..self.n + self.m {
                if self.fixed[j] || matches!(self.state[j], VarState::Basic(_)) {
                    continue;
                }
                let mag = self.tab[r][j].abs_ref();
                if mag > self.tol && mag > best_mag {
                    best_mag = mag;
                    chosen = Some(j);
                }
            }
            if let Some(q) = chosen {
                let increasing = matches!(self.state[q], VarState::AtLower);
                self.pivot(r, q, &T::zero(), increasing);
            }
        }
    }

    pub fn solve(mut self, p: &LPInstance) -> EngineResult<T> {
        // phase 1: minimize the total artificial infeasibility
        let needs_phase1 = self.basis.iter().any(|&b| b >= self.n + self.m);
        if needs_phase1 {
            for j in self.n + self.m..self.total {
                self.cost[j] = T::one();
            }
            self.recompute_reduced_costs();
            let status = self.optimize();
            debug_assert!(status != EngineStatus::Unbounded);
            let infeasibility = {
                let mut acc = T::zero();
                for i in 0..self.m {
                    if self.basis[i] >= self.n + self.m {
                        acc = acc.add_ref(&self.beta[i]);
                    }
                }
                acc
            };
            if self.is_pos(&infeasibility) {
                return self.finish(p, EngineStatus::Infeasible);
            }
            self.evict_artificials();
        }
        // retire the artificials entirely
        for j in self.n + self.m..self.total {
            self.fixed[j] = true;
            self.up[j] = Some(T::zero());
            self.cost[j] = T::zero();
        }

        // phase 2: the real objective
        for j in 0..self.n {
            self.cost[j] = T::from_dyadic(&p.objective[j]);
        }
        self.recompute_reduced_costs();
        self.stalled = 0;
        let status = self.optimize();
        self.finish(p, status)
    }

    fn value_of(&self, j: usize) -> T {
        match self.state[j] {
            VarState::Basic(i) => self.beta[i].clone(),
            VarState::AtLower => self.lo[j].clone(),
            VarState::AtUpper => self.up[j].clone().expect("at-upper needs a bound"),
        }
    }

    fn finish(self, p: &LPInstance, status: EngineStatus) -> EngineResult<T> {
        let x: Vec<T> = (0..self.n).map(|j| self.value_of(j)).collect();
        // duals read off the slack reduced costs: z_{s_i} = y_i
        let y: Vec<T> = (0..self.m).map(|i| self.z[self.n + i].clone()).collect();
        let reduced: Vec<T> = (0..self.n).map(|j| self.z[j].clone()).collect();
        let row_activity: Vec<T> = (0..self.m)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.n {
                    if !x[j].is_zero() {
                        acc = acc.add_ref(&T::from_dyadic(&p.matrix[i][j]).mul_ref(&x[j]));
                    }
                }
                acc
            })
            .collect();
        let value = {
            let mut acc = T::zero();
            for j in 0..self.n {
                if !x[j].is_zero() {
                    acc = acc.add_ref(&T::from_dyadic(&p.objective[j]).mul_ref(&x[j]));
                }
            }
            acc
        };
        let basis: Vec<Option<usize>> = self
            .basis
            .iter()
            .map(|&b| if b < self.n + self.m { Some(b) } else { None })
            .collect();
        let at_upper: Vec<bool> = (0..self.n + self.m)
            .map(|j| matches!(self.state[j], VarState::AtUpper))
            .collect();
        EngineResult {
            status,
            x,
            y,
            reduced,
            row_activity,
            value,
            pivots: self.pivots,
            basis,
            at_upper,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicRational;
    use crate::solver::arith::Rational;
    use num_traits::{One, Zero};

    fn dy(v: i64) -> DyadicRational {
        DyadicRational::from_integer(v)
    }

    fn toy(
        objective: Vec<i64>,
        matrix: Vec<Vec<i64>>,
        row_lower: Vec<i64>,
        row_upper: Vec<i64>,
    ) -> LPInstance {
        let n = objective.len();
        LPInstance {
            num_vars: n,
            objective: objective.into_iter().map(dy).collect(),
            matrix: matrix
                .into_iter()
                .map(|r| r.into_iter().map(dy).collect())
                .collect(),
            row_lower: row_lower.into_iter().map(dy).collect(),
            row_upper: row_upper.into_iter().map(dy).collect(),
            var_lower: vec![DyadicRational::zero(); n],
            var_upper: vec![None; n],
            integer_marks: None,
        }
    }

    #[test]
    fn one_var_floor() {
        // min x s.t. 1 <= x <= 10
        let p = toy(vec![1], vec![vec![1]], vec![1], vec![10]);
        let r = SimplexEngine::<f64>::new(&p, 1e-9).solve(&p);
        assert_eq!(r.status, EngineStatus::Optimal);
        assert!((r.value - 1.0).abs() < 1e-9);

        let re = SimplexEngine::<Rational>::new(&p, Rational::zero()).solve(&p);
        assert_eq!(re.status, EngineStatus::Optimal);
        assert_eq!(re.value, Rational::one());
    }

    #[test]
    fn two_var_blend() {
        // min x + 2y s.t. 2 <= x + y <= 5, 1 <= x - y <= 1  (x - y = 1)
        // optimum: x + y = 2 with x - y = 1 -> x = 1.5, y = 0.5, value 2.5
        let p = toy(
            vec![1, 2],
            vec![vec![1, 1], vec![1, -1]],
            vec![2, 1],
            vec![5, 1],
        );
        let r = SimplexEngine::<Rational>::new(&p, Rational::zero()).solve(&p);
        assert_eq!(r.status, EngineStatus::Optimal);
        assert_eq!(r.value, Rational::new(5.into(), 2.into()));
        assert_eq!(r.x[0], Rational::new(3.into(), 2.into()));
        assert_eq!(r.x[1], Rational::new(1.into(), 2.into()));
    }

    #[test]
    fn infeasible_toy() {
        // x >= 0 with row x in [-5, -1]
        let p = toy(vec![1], vec![vec![1]], vec![-5], vec![-1]);
        let r = SimplexEngine::<f64>::new(&p, 1e-9).solve(&p);
        assert_eq!(r.status, EngineStatus::Infeasible);
        let re = SimplexEngine::<Rational>::new(&p, Rational::zero()).solve(&p);
        assert_eq!(re.status, EngineStatus::Infeasible);
    }

    #[test]
    fn unbounded_toy() {
        // min -x s.t. x >= 1 (row cap enormous)
        let p = toy(vec![-1], vec![vec![1]], vec![1], vec![1_000_000_000]);
        // cap keeps it bounded; loosen by removing the structural path: use
        // a second variable that the row ignores
        let p2 = LPInstance {
            num_vars: 2,
            objective: vec![dy(0), dy(-1)],
            matrix: vec![vec![dy(1), dy(0)]],
            row_lower: vec![dy(1)],
            row_upper: vec![dy(2)],
            var_lower: vec![DyadicRational::zero(); 2],
            var_upper: vec![None, None],
            integer_marks: None,
        };
        let r = SimplexEngine::<f64>::new(&p2, 1e-9).solve(&p2);
        assert_eq!(r.status, EngineStatus::Unbounded);
        let r1 = SimplexEngine::<f64>::new(&p, 1e-9).solve(&p);
        assert_eq!(r1.status, EngineStatus::Optimal);
    }

    #[test]
    fn fixed_variable_respected() {
        // min x + y with y pinned to 2, row x + y in [3, 8]
        let p = LPInstance {
            num_vars: 2,
            objective: vec![dy(1), dy(1)],
            matrix: vec![vec![dy(1), dy(1)]],
            row_lower: vec![dy(3)],
            row_upper: vec![dy(8)],
            var_lower: vec![DyadicRational::zero(), dy(2)],
            var_upper: vec![None, Some(dy(2))],
            integer_marks: None,
        };
        let r = SimplexEngine::<Rational>::new(&p, Rational::zero()).solve(&p);
        assert_eq!(r.status, EngineStatus::Optimal);
        assert_eq!(r.x[1], Rational::from_integer(2.into()));
        assert_eq!(r.value, Rational::from_integer(3.into()));
    }

    #[test]
    fn var_upper_bounds_bind() {
        // min -x - y, x <= 1, y <= 2, row x + y <= 2.5 (lower 0)
        let p = LPInstance {
            num_vars: 2,
            objective: vec![dy(-1), dy(-1)],
            matrix: vec![vec![dy(1), dy(1)]],
            row_lower: vec![dy(0)],
            row_upper: vec![DyadicRational::new(5, 1)],
            var_lower: vec![DyadicRational::zero(); 2],
            var_upper: vec![Some(dy(1)), Some(dy(2))],
            integer_marks: None,
        };
        let r = SimplexEngine::<Rational>::new(&p, Rational::zero()).solve(&p);
        assert_eq!(r.status, EngineStatus::Optimal);
        assert_eq!(r.value, Rational::new((-5).into(), 2.into()));
    }
}
