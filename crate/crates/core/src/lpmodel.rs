//! Assembly of the window linear programs: the distance-kernel matrix A,
//! interior-sum objective c, two-sided row bounds, variable bounds, and the
//! {0,2} integrality marks of the mixed-integer variant.
//!
//! All entries are exact dyadic rationals. Instances serialize to a JSON
//! problem format (rationals as `"p/2^q"` strings) for export and round-trip
//! solving.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dyadic::DyadicRational;
use crate::torus::{distance, weight, TorusDims, TorusError, Vertex, Window};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error("instance is structurally inconsistent: {0}")]
    Inconsistent(String),
}

/// Distance semantics for a window program.
///
/// `Asymptotic` treats the window as a block of an arbitrarily large torus
/// (all Γ terms vanish); `Finite` uses true torus distances and the computed
/// per-row ε bounds of the given dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelMode {
    Asymptotic,
    Finite(TorusDims),
}

impl ModelMode {
    pub fn label(&self) -> String {
        match self {
            ModelMode::Asymptotic => "asymptotic".to_owned(),
            ModelMode::Finite(d) => format!("finite {}x{}", d.m(), d.n()),
        }
    }
}

/// Window geometry realizing a mode: a finite torus uses its own dimensions,
/// the asymptotic mode a virtual torus large enough that window distances
/// coincide with block Manhattan distances.
pub fn window_for(r: u32, mode: &ModelMode) -> Result<Window, TorusError> {
    match mode {
        ModelMode::Asymptotic => {
            let dims = TorusDims::new(2 * r + 1, 2 * r + 1)?;
            Window::new(dims, Vertex::new(dims, r, r), r)
        }
        ModelMode::Finite(dims) => {
            let center = Vertex::new(*dims, dims.m() / 2, dims.n() / 2);
            Window::new(*dims, center, r)
        }
    }
}

/// Integrality marks: the listed variables may only take the listed values
/// (always {0, 2} in this problem family).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerMarks {
    pub indices: BTreeSet<usize>,
    pub values: Vec<DyadicRational>,
}

impl IntegerMarks {
    pub fn zero_or_two(indices: impl IntoIterator<Item = usize>) -> Self {
        IntegerMarks {
            indices: indices.into_iter().collect(),
            values: vec![DyadicRational::zero(), DyadicRational::from_integer(2)],
        }
    }
}

/// A dense LP/MILP instance over exact dyadic data.
///
/// Row constraints are two-sided: `row_lower <= A x <= row_upper`.
/// `var_upper` entries of `None` mean unbounded above.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPInstance {
    pub num_vars: usize,
    pub objective: Vec<DyadicRational>,
    pub matrix: Vec<Vec<DyadicRational>>,
    pub row_lower: Vec<DyadicRational>,
    pub row_upper: Vec<DyadicRational>,
    pub var_lower: Vec<DyadicRational>,
    pub var_upper: Vec<Option<DyadicRational>>,
    pub integer_marks: Option<IntegerMarks>,
}

impl LPInstance {
    pub fn num_rows(&self) -> usize {
        self.matrix.len()
    }

    /// Structural consistency of dimensions and bounds (applies to any
    /// instance, including hand-built toys and loaded files).
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.num_vars;
        let bad = |msg: String| Err(ModelError::Inconsistent(msg));
        if self.objective.len() != n {
            return bad(format!("objective has {} entries, expected {n}", self.objective.len()));
        }
        if self.var_lower.len() != n || self.var_upper.len() != n {
            return bad("variable bound vectors do not match num_vars".into());
        }
        let m = self.matrix.len();
        if self.row_lower.len() != m || self.row_upper.len() != m {
            return bad("row bound vectors do not match the matrix".into());
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return bad(format!("matrix row {i} has {} entries, expected {n}", row.len()));
            }
        }
        for i in 0..m {
            if self.row_lower[i] > self.row_upper[i] {
                return bad(format!("row {i} has lower > upper"));
            }
        }
        for j in 0..n {
            if let Some(up) = &self.var_upper[j] {
                if &self.var_lower[j] > up {
                    return bad(format!("variable {j} has lower > upper"));
                }
            }
        }
        if let Some(marks) = &self.integer_marks {
            if marks.values.is_empty() {
                return bad("integer marks carry no allowed values".into());
            }
            if let Some(&i) = marks.indices.iter().next_back() {
                if i >= n {
                    return bad(format!("integer mark index {i} out of range"));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ModelError> {
        let inst: LPInstance =
            serde_json::from_str(s).map_err(|e| ModelError::Inconsistent(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    /// SHA-256 of the canonical JSON form; ties solver reports to inputs.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}

/// [A]_ij = (1/2)^dist(v_i, v_j): symmetric with unit diagonal.
pub fn build_matrix(w: &Window) -> Vec<Vec<DyadicRational>> {
    let verts = w.vertices();
    let n = verts.len();
    let mut m = vec![vec![DyadicRational::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let e = DyadicRational::half_pow(distance(w.dims(), verts[i], verts[j]));
            m[i][j] = e.clone();
            m[j][i] = e;
        }
    }
    m
}

/// c_s = Σ_{i in interior} (1/2)^dist(v_s, v_i), i.e. the interior row sums
/// of A; minimizing c^T x minimizes the total weight the interior receives.
pub fn build_objective(w: &Window) -> Vec<DyadicRational> {
    let verts = w.vertices();
    let interior = w.interior();
    verts
        .iter()
        .map(|&vs| {
            let mut c = DyadicRational::zero();
            for &i in &interior {
                c += &DyadicRational::half_pow(distance(w.dims(), vs, verts[i]));
            }
            c
        })
        .collect()
}

/// Two-sided row bounds: every row needs at least 1; interior rows are capped
/// at `1 + w(center, v_i) + ε_i` (the centered dominating vertex's own
/// contribution is the most that can later be removed there), boundary rows
/// at the generic per-vertex budget 18.
pub fn build_row_caps(w: &Window, eps_row: &DyadicRational) -> Vec<DyadicRational> {
    let verts = w.vertices();
    let interior: BTreeSet<usize> = w.interior().into_iter().collect();
    let eighteen = DyadicRational::from_integer(18);
    let one = DyadicRational::one();
    verts
        .iter()
        .enumerate()
        .map(|(i, &vi)| {
            if interior.contains(&i) {
                &(&one + &weight(w.dims(), w.center(), vi)) + eps_row
            } else {
                eighteen.clone()
            }
        })
        .collect()
}

/// Per-row ε for a mode: zero in asymptotic mode, the conservative
/// `(m+n-1) (1/2)^(dist(Γ, V(G_v)) - 1)` bound for a finite torus.
pub fn epsilon_row_for(w: &Window, mode: &ModelMode) -> DyadicRational {
    match mode {
        ModelMode::Asymptotic => DyadicRational::zero(),
        ModelMode::Finite(_) => {
            let p = crate::torus::partition(w);
            crate::torus::epsilon_row_bound(w, &p)
        }
    }
}

/// Variable caps of the isolated variant: interior cells hold no other
/// dominating vertex (0), the center holds exactly its own vertex (2), and
/// each boundary cell's aggregated weight is geometrically bounded by 4.
pub fn build_var_caps(w: &Window) -> Vec<Option<DyadicRational>> {
    let interior: BTreeSet<usize> = w.interior().into_iter().collect();
    let center = w.center_index();
    (0..w.size())
        .map(|i| {
            if i == center {
                Some(DyadicRational::from_integer(2))
            } else if interior.contains(&i) {
                Some(DyadicRational::zero())
            } else {
                Some(DyadicRational::from_integer(4))
            }
        })
        .collect()
}

fn base_instance(w: &Window, eps_row: &DyadicRational) -> LPInstance {
    let n = w.size();
    let center = w.center_index();
    let mut var_lower = vec![DyadicRational::zero(); n];
    let mut var_upper: Vec<Option<DyadicRational>> = vec![None; n];
    // the window is centered at a dominating vertex; its own cell weight is
    // exactly w(d, d) = 2
    var_lower[center] = DyadicRational::from_integer(2);
    var_upper[center] = Some(DyadicRational::from_integer(2));
    LPInstance {
        num_vars: n,
        objective: build_objective(w),
        matrix: build_matrix(w),
        row_lower: vec![DyadicRational::one(); n],
        row_upper: build_row_caps(w, eps_row),
        var_lower,
        var_upper,
        integer_marks: None,
    }
}

/// The main window program for odd r: minimize the interior weight subject to
/// domination floors and per-row adjustability caps.
pub fn assemble_main(r: u32, mode: &ModelMode) -> Result<LPInstance, ModelError> {
    let w = window_for(r, mode)?;
    let eps = epsilon_row_for(&w, mode);
    Ok(base_instance(&w, &eps))
}

/// The isolated variant (r = 9): no other dominating vertex inside the 7x7
/// interior, boundary cells capped at 4. The tight interior row caps of the
/// main program contradict the interior pins, so rows here carry only the
/// domination floor and the generic 18 budget.
pub fn assemble_isolated(mode: &ModelMode) -> Result<LPInstance, ModelError> {
    let w = window_for(9, mode)?;
    let mut inst = base_instance(&w, &DyadicRational::zero());
    inst.row_upper = vec![DyadicRational::from_integer(18); inst.num_rows()];
    let caps = build_var_caps(&w);
    let center = w.center_index();
    for (j, cap) in caps.iter().enumerate() {
        inst.var_upper[j] = cap.clone();
        if j != center {
            inst.var_lower[j] = DyadicRational::zero();
        }
    }
    Ok(inst)
}

/// The mixed-integer variant (r = 9): every interior cell weight is 0 or 2
/// (a cell of the interior either holds a dominating vertex or not); row caps
/// follow the isolated variant for the same feasibility reason.
pub fn assemble_milp(mode: &ModelMode) -> Result<LPInstance, ModelError> {
    let w = window_for(9, mode)?;
    let mut inst = base_instance(&w, &DyadicRational::zero());
    inst.row_upper = vec![DyadicRational::from_integer(18); inst.num_rows()];
    inst.integer_marks = Some(IntegerMarks::zero_or_two(w.interior()));
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn asym_window(r: u32) -> Window {
        window_for(r, &ModelMode::Asymptotic).unwrap()
    }

    #[test]
    fn matrix_shape_and_entries() {
        let w = asym_window(3);
        let m = build_matrix(&w);
        assert_eq!(m.len(), 9);
        for (i, row) in m.iter().enumerate() {
            assert_eq!(row[i], DyadicRational::one());
            for (j, e) in row.iter().enumerate() {
                assert_eq!(*e, m[j][i]);
                assert!(*e > DyadicRational::zero() && *e <= DyadicRational::one());
            }
        }
        // adjacent window vertices
        assert_eq!(m[0][1], DyadicRational::half_pow(1));
        // opposite corners of a 3x3 block: Manhattan distance 4
        assert_eq!(m[0][8], DyadicRational::half_pow(4));
    }

    #[test]
    fn asymptotic_matches_finite_on_large_torus() {
        for r in [3, 5, 9, 13] {
            let asym = build_matrix(&asym_window(r));
            let dims = TorusDims::new(2 * r + 3, 2 * r + 5).unwrap();
            let fin = build_matrix(&window_for(r, &ModelMode::Finite(dims)).unwrap());
            assert_eq!(asym, fin, "r = {r}");
        }
    }

    #[test]
    fn objective_examples() {
        let w = asym_window(3);
        let c = build_objective(&w);
        assert_eq!(c[w.center_index()], DyadicRational::one());
        assert_eq!(c[0], DyadicRational::half_pow(2)); // corner, distance 2
        // r = 13 center coefficient: frozen interior kernel sum
        let w13 = asym_window(13);
        let c13 = build_objective(&w13);
        assert_eq!(c13[w13.center_index()], DyadicRational::new(2209, 8));
    }

    #[test]
    fn objective_equals_interior_row_sums() {
        for r in [3, 5, 9] {
            let w = asym_window(r);
            let m = build_matrix(&w);
            let c = build_objective(&w);
            let interior = w.interior();
            for s in 0..w.size() {
                let mut sum = DyadicRational::zero();
                for &i in &interior {
                    sum += &m[i][s];
                }
                assert_eq!(c[s], sum, "r={r} col={s}");
            }
        }
    }

    #[test]
    fn row_caps_examples() {
        let w = asym_window(13);
        let caps = build_row_caps(&w, &DyadicRational::zero());
        // center row: 1 + w(center, center) = 3
        assert_eq!(caps[w.center_index()], DyadicRational::from_integer(3));
        // boundary row
        assert_eq!(caps[0], DyadicRational::from_integer(18));
        // interior corner at Manhattan distance 10 from the center
        let idx = 1 * 13 + 1;
        assert_eq!(
            caps[idx],
            &DyadicRational::one() + &DyadicRational::half_pow(9)
        );
    }

    #[test]
    fn var_caps_counts() {
        let w = asym_window(9);
        let caps = build_var_caps(&w);
        let zeros = caps.iter().filter(|c| **c == Some(DyadicRational::zero())).count();
        let fours = caps
            .iter()
            .filter(|c| **c == Some(DyadicRational::from_integer(4)))
            .count();
        let twos = caps
            .iter()
            .filter(|c| **c == Some(DyadicRational::from_integer(2)))
            .count();
        assert_eq!((zeros, twos, fours), (48, 1, 32));
    }

    #[test]
    fn assemble_main_shapes() {
        for (r, nv) in [(3u32, 9usize), (9, 81), (13, 169)] {
            let inst = assemble_main(r, &ModelMode::Asymptotic).unwrap();
            inst.validate().unwrap();
            assert_eq!(inst.num_vars, nv);
            assert_eq!(inst.num_rows(), nv);
            assert!(inst.integer_marks.is_none());
            let center = (nv - 1) / 2;
            assert_eq!(inst.var_lower[center], DyadicRational::from_integer(2));
            assert_eq!(inst.var_upper[center], Some(DyadicRational::from_integer(2)));
        }
    }

    #[test]
    fn assemble_isolated_shape() {
        let inst = assemble_isolated(&ModelMode::Asymptotic).unwrap();
        inst.validate().unwrap();
        assert_eq!(inst.num_vars, 81);
        assert!(inst.var_upper.iter().all(|u| u.is_some()));
        assert!(inst
            .row_upper
            .iter()
            .all(|u| *u == DyadicRational::from_integer(18)));
    }

    #[test]
    fn assemble_milp_shape() {
        let inst = assemble_milp(&ModelMode::Asymptotic).unwrap();
        inst.validate().unwrap();
        let marks = inst.integer_marks.as_ref().unwrap();
        assert_eq!(marks.indices.len(), 49);
        assert_eq!(
            marks.values,
            vec![DyadicRational::zero(), DyadicRational::from_integer(2)]
        );
    }

    #[test]
    fn finite_mode_requires_fitting_window() {
        let dims = TorusDims::new(11, 11).unwrap();
        assert!(assemble_main(13, &ModelMode::Finite(dims)).is_err());
        assert!(assemble_main(11, &ModelMode::Finite(dims)).is_ok());
    }

    #[test]
    fn json_round_trip_is_bit_identical() {
        let inst = assemble_main(5, &ModelMode::Asymptotic).unwrap();
        let json = inst.to_json();
        let back = LPInstance::from_json(&json).unwrap();
        assert_eq!(inst, back);
        assert_eq!(json, back.to_json());
        assert_eq!(inst.hash(), back.hash());
    }

    #[test]
    fn assembled_instance_invariant_under_dihedral_symmetry() {
        // transpose and quarter-turn of the block permute the enumeration;
        // the assembled data must be fixed by both
        for r in [5u32, 9] {
            let inst = assemble_main(r, &ModelMode::Asymptotic).unwrap();
            let n = r as usize;
            let transpose = |i: usize| -> usize { (i % n) * n + i / n };
            let rotate = |i: usize| -> usize { (i % n) * n + (n - 1 - i / n) };
            let perms: [&dyn Fn(usize) -> usize; 2] = [&transpose, &rotate];
            for perm in perms {
                for i in 0..inst.num_vars {
                    assert_eq!(inst.objective[i], inst.objective[perm(i)]);
                    assert_eq!(inst.row_upper[i], inst.row_upper[perm(i)]);
                    assert_eq!(inst.var_lower[i], inst.var_lower[perm(i)]);
                    for j in 0..inst.num_vars {
                        assert_eq!(inst.matrix[i][j], inst.matrix[perm(i)][perm(j)]);
                    }
                }
            }
        }
    }

    #[test]
    fn finite_row_caps_carry_epsilon() {
        let dims = TorusDims::new(32, 32).unwrap();
        let mode = ModelMode::Finite(dims);
        let w = window_for(13, &mode).unwrap();
        let eps = epsilon_row_for(&w, &mode);
        assert_eq!(eps, DyadicRational::new(63, 9));
        let caps = build_row_caps(&w, &eps);
        assert_eq!(
            caps[w.center_index()],
            &DyadicRational::from_integer(3) + &eps
        );
    }
}
