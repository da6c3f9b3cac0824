//! Exponential-domination verification, exact brute-force minima on small
//! tori, and the diagonal 13x13 tiling behind the 1/13 density upper bound.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicRational;
use crate::torus::{weight, TorusDims, TorusError, Vertex};

/// Brute force is exponential in m*n; larger instances need an explicit override.
pub const BRUTE_FORCE_GUARD: u64 = 36;

#[derive(Debug, thiserror::Error)]
pub enum DominationError {
    #[error("torus has {vertices} vertices, above the brute-force guard of {guard} (use force to override)")]
    SizeLimit { vertices: u64, guard: u64 },
    #[error("tiling step must lie in [1, 12], got {0}")]
    BadStep(u32),
    #[error("no diagonal tiling step dominates C_13 x C_13; the upper-bound construction is broken")]
    NoStep,
    #[error(transparent)]
    Torus(#[from] TorusError),
}

/// A candidate dominating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    dims: TorusDims,
    vertices: BTreeSet<Vertex>,
}

/// JSON form: {"m": .., "n": .., "vertices": [[r, c], ..]}
#[derive(Serialize, Deserialize)]
struct CandidateSetJson {
    m: u32,
    n: u32,
    vertices: Vec<(u32, u32)>,
}

impl CandidateSet {
    pub fn new(dims: TorusDims, vertices: impl IntoIterator<Item = Vertex>) -> Self {
        CandidateSet {
            dims,
            vertices: vertices.into_iter().collect(),
        }
    }

    pub fn dims(&self) -> TorusDims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.vertices.contains(v)
    }

    /// Density |D| / (m n) as a float, for reporting.
    pub fn density(&self) -> f64 {
        self.len() as f64 / self.dims.vertex_count() as f64
    }

    pub fn to_json(&self) -> String {
        let j = CandidateSetJson {
            m: self.dims.m(),
            n: self.dims.n(),
            vertices: self.vertices.iter().map(|v| (v.row(), v.col())).collect(),
        };
        serde_json::to_string_pretty(&j).expect("candidate set serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        let j: CandidateSetJson = serde_json::from_str(s)?;
        let dims = TorusDims::new(j.m, j.n)
            .map_err(|e| serde::de::Error::custom(e.to_string()))?;
        Ok(CandidateSet::new(
            dims,
            j.vertices.into_iter().map(|(r, c)| Vertex::new(dims, r, c)),
        ))
    }
}

/// Verification outcome: exact minimum received weight and every vertex
/// receiving less than 1, sorted by (row, col).
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub dominating: bool,
    pub min_received: DyadicRational,
    pub deficient: Vec<(Vertex, DyadicRational)>,
}

/// Exact Σ_{d in D} w(d, v).
pub fn weight_received(set: &CandidateSet, v: Vertex) -> DyadicRational {
    let mut sum = DyadicRational::zero();
    for &d in &set.vertices {
        sum += &weight(set.dims, d, v);
    }
    sum
}

/// Checks w(D, v) >= 1 for every vertex, in exact arithmetic with no tolerance.
pub fn verify(set: &CandidateSet) -> VerificationReport {
    let one = DyadicRational::one();
    let mut min_received: Option<DyadicRational> = None;
    let mut deficient = Vec::new();
    for v in set.dims.vertices() {
        let w = weight_received(set, v);
        if w < one {
            deficient.push((v, w.clone()));
        }
        if min_received.as_ref().is_none_or(|m| w < *m) {
            min_received = Some(w);
        }
    }
    deficient.sort_by_key(|(v, _)| (v.row(), v.col()));
    VerificationReport {
        dominating: deficient.is_empty(),
        min_received: min_received.unwrap_or_else(DyadicRational::zero),
        deficient,
    }
}

/// Result of an exhaustive minimum search.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    /// Smallest dominating size found, or `None` if nothing within `size_cap`.
    pub gamma: Option<u32>,
    /// Lexicographically least witness of that size.
    pub witness: Option<CandidateSet>,
    pub subsets_checked: u64,
}

/// Exhaustive search for the exponential domination number.
///
/// Iterates sizes s = 1..=size_cap, enumerating subsets in lexicographic
/// order with the first vertex pinned to (0,0) (any dominating set can be
/// translated there), so the first hit is the lexicographically least
/// witness of minimal size.
pub fn min_expdom_bruteforce(
    dims: TorusDims,
    size_cap: u32,
    force: bool,
) -> Result<BruteForceResult, DominationError> {
    let nv = dims.vertex_count();
    if nv > BRUTE_FORCE_GUARD && !force {
        return Err(DominationError::SizeLimit {
            vertices: nv,
            guard: BRUTE_FORCE_GUARD,
        });
    }
    let all: Vec<Vertex> = dims.vertices().collect();
    let origin = all[0];
    let rest = &all[1..];
    let mut checked = 0u64;
    for s in 1..=size_cap.min(nv as u32) {
        let k = (s - 1) as usize;
        let mut found: Option<CandidateSet> = None;
        for_each_combination(rest.len(), k, &mut |idxs| {
            checked += 1;
            let set = CandidateSet::new(
                dims,
                std::iter::once(origin).chain(idxs.iter().map(|&i| rest[i])),
            );
            if verify(&set).dominating {
                found = Some(set);
                true // stop: lexicographically least by enumeration order
            } else {
                false
            }
        });
        if let Some(witness) = found {
            return Ok(BruteForceResult {
                gamma: Some(s),
                witness: Some(witness),
                subsets_checked: checked,
            });
        }
    }
    Ok(BruteForceResult {
        gamma: None,
        witness: None,
        subsets_checked: checked,
    })
}

/// Calls `f` on each k-combination of 0..n in lexicographic order until it
/// returns true.
fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idxs: Vec<usize> = (0..k).collect();
    loop {
        if f(&idxs) {
            return;
        }
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idxs[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idxs[i] += 1;
        for j in i + 1..k {
            idxs[j] = idxs[j - 1] + 1;
        }
    }
}

/// The diagonal selection {(i, step*i mod 13)} tiled a x b times over
/// C_{13a} x C_{13b}; one vertex per row and column of each 13x13 block,
/// density exactly 1/13.
pub fn diagonal_tiling(step: u32, a: u32, b: u32) -> Result<CandidateSet, DominationError> {
    if !(1..=12).contains(&step) {
        return Err(DominationError::BadStep(step));
    }
    let dims = TorusDims::new(13 * a.max(1), 13 * b.max(1))?;
    let mut verts = Vec::new();
    for p in 0..a.max(1) {
        for q in 0..b.max(1) {
            for i in 0..13 {
                verts.push(Vertex::new(dims, 13 * p + i, 13 * q + (step * i) % 13));
            }
        }
    }
    Ok(CandidateSet::new(dims, verts))
}

/// All steps whose diagonal selection dominates C_13 x C_13.
///
/// The upper-bound construction guarantees at least one; an empty result is
/// reported as a hard error rather than being swallowed.
pub fn find_tiling_steps() -> Result<Vec<u32>, DominationError> {
    let steps: Vec<u32> = (1..=12)
        .filter(|&s| {
            let set = diagonal_tiling(s, 1, 1).expect("step in range");
            verify(&set).dominating
        })
        .collect();
    if steps.is_empty() {
        return Err(DominationError::NoStep);
    }
    Ok(steps)
}
