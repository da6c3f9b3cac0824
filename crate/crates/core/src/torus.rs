//! Geometry of the torus C_m x C_n: distances, the exponential weight kernel,
//! r x r windows with their interiors, and the nearest-window-vertex partition
//! with its remainder set Γ.

use serde::{Deserialize, Serialize};

pub use crate::dyadic::DyadicRational;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TorusError {
    #[error("torus dimensions must satisfy m, n >= 3, got {m}x{n}")]
    InvalidDims { m: u32, n: u32 },
    #[error("window size r must be odd and >= 3, got {r}")]
    EvenWindow { r: u32 },
    #[error("window size r={r} does not fit torus {m}x{n} (need r <= min(m, n))")]
    WindowTooLarge { r: u32, m: u32, n: u32 },
}

/// The host graph C_m x C_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusDims {
    m: u32,
    n: u32,
}

impl TorusDims {
    pub fn new(m: u32, n: u32) -> Result<Self, TorusError> {
        if m < 3 || n < 3 {
            return Err(TorusError::InvalidDims { m, n });
        }
        Ok(TorusDims { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertex_count(&self) -> u64 {
        self.m as u64 * self.n as u64
    }

    /// All vertices in row-major order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        let dims = *self;
        (0..self.m).flat_map(move |r| (0..dims.n).map(move |c| Vertex::new(dims, r, c)))
    }
}

/// A vertex of the torus; coordinates are kept reduced modulo (m, n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    row: u32,
    col: u32,
}

impl Vertex {
    pub fn new(dims: TorusDims, row: u32, col: u32) -> Self {
        Vertex {
            row: row % dims.m,
            col: col % dims.n,
        }
    }

    /// Vertex at `self + (dr, dc)` with wraparound (offsets may be negative).
    pub fn offset(&self, dims: TorusDims, dr: i64, dc: i64) -> Self {
        let m = dims.m as i64;
        let n = dims.n as i64;
        Vertex {
            row: (self.row as i64 + dr).rem_euclid(m) as u32,
            col: (self.col as i64 + dc).rem_euclid(n) as u32,
        }
    }

    pub fn row(&self) -> u32 {
        self.row
    }

    pub fn col(&self) -> u32 {
        self.col
    }
}

fn cycle_dist(len: u32, a: u32, b: u32) -> u32 {
    let d = a.abs_diff(b);
    d.min(len - d)
}

/// Shortest-path distance on C_m x C_n.
pub fn distance(dims: TorusDims, u: Vertex, v: Vertex) -> u32 {
    cycle_dist(dims.m, u.row, v.row) + cycle_dist(dims.n, u.col, v.col)
}

/// The exponential domination kernel w(u, v) = (1/2)^(dist(u,v) - 1).
///
/// `weight(u, u) = 2`; adjacent vertices receive 1.
pub fn weight(dims: TorusDims, u: Vertex, v: Vertex) -> DyadicRational {
    let d = distance(dims, u, v);
    if d == 0 {
        DyadicRational::from_integer(2)
    } else {
        DyadicRational::half_pow(d - 1)
    }
}

/// Exact total weight a single vertex assigns to the whole torus,
/// by direct summation over all vertices.
pub fn total_weight(dims: TorusDims, u: Vertex) -> DyadicRational {
    let mut sum = DyadicRational::zero();
    for v in dims.vertices() {
        sum += &weight(dims, u, v);
    }
    sum
}

/// The r x r grid window centered at a vertex, with its fixed row-major
/// vertex enumeration v_1 .. v_{r^2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    dims: TorusDims,
    center: Vertex,
    r: u32,
}

impl Window {
    pub fn new(dims: TorusDims, center: Vertex, r: u32) -> Result<Self, TorusError> {
        if r < 3 || r.is_multiple_of(2) {
            return Err(TorusError::EvenWindow { r });
        }
        if r > dims.m.min(dims.n) {
            return Err(TorusError::WindowTooLarge {
                r,
                m: dims.m,
                n: dims.n,
            });
        }
        Ok(Window { dims, center, r })
    }

    pub fn dims(&self) -> TorusDims {
        self.dims
    }

    pub fn center(&self) -> Vertex {
        self.center
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn size(&self) -> usize {
        (self.r * self.r) as usize
    }

    /// Half-width (r - 1) / 2.
    pub fn halfwidth(&self) -> u32 {
        (self.r - 1) / 2
    }

    /// Index of the center in the row-major enumeration.
    pub fn center_index(&self) -> usize {
        (self.size() - 1) / 2
    }

    /// Row-major enumeration of the window block. This order fixes the
    /// variable and constraint indexing of every assembled program.
    pub fn vertices(&self) -> Vec<Vertex> {
        let h = self.halfwidth() as i64;
        let mut out = Vec::with_capacity(self.size());
        for a in -h..=h {
            for b in -h..=h {
                out.push(self.center.offset(self.dims, a, b));
            }
        }
        out
    }

    /// Block coordinates (row, col) in [0, r) of enumeration index i.
    pub fn block_coords(&self, i: usize) -> (u32, u32) {
        ((i as u32) / self.r, (i as u32) % self.r)
    }

    /// Indices whose vertex lies strictly inside the window boundary;
    /// these form the (r-2) x (r-2) interior block.
    pub fn interior(&self) -> Vec<usize> {
        let r = self.r;
        (0..self.size())
            .filter(|&i| {
                let (a, b) = self.block_coords(i);
                a >= 1 && a < r - 1 && b >= 1 && b < r - 1
            })
            .collect()
    }

    pub fn interior_size(&self) -> usize {
        ((self.r - 2) * (self.r - 2)) as usize
    }
}

/// Nearest-window-vertex partition of V(G): cell i holds the vertices
/// strictly closer to window vertex v_i than to any other window vertex;
/// ties (no strict minimizer) go to the remainder Γ.
#[derive(Debug, Clone)]
pub struct Partition {
    pub cells: Vec<Vec<Vertex>>,
    pub gamma: Vec<Vertex>,
}

pub fn partition(w: &Window) -> Partition {
    let wverts = w.vertices();
    let mut cells = vec![Vec::new(); wverts.len()];
    let mut gamma = Vec::new();
    for v in w.dims().vertices() {
        let mut best = u32::MAX;
        let mut best_idx = 0usize;
        let mut tied = false;
        for (i, &wv) in wverts.iter().enumerate() {
            let d = distance(w.dims(), v, wv);
            if d < best {
                best = d;
                best_idx = i;
                tied = false;
            } else if d == best {
                tied = true;
            }
        }
        if tied {
            gamma.push(v);
        } else {
            cells[best_idx].push(v);
        }
    }
    Partition { cells, gamma }
}

/// min over γ in Γ, u in V(G_v) of dist(γ, u); `None` when Γ is empty.
pub fn gamma_distance(w: &Window, p: &Partition) -> Option<u32> {
    if p.gamma.is_empty() {
        return None;
    }
    let wverts = w.vertices();
    let mut best = u32::MAX;
    for &g in &p.gamma {
        for &u in &wverts {
            best = best.min(distance(w.dims(), g, u));
        }
    }
    Some(best)
}

/// Upper bound on ε = Σ_j ε_j: r^2 (m + n - 1) (1/2)^(dist(Γ, V(G_v)) - 1).
/// Returns 0 when Γ is empty.
pub fn epsilon_bound(w: &Window) -> DyadicRational {
    let p = partition(w);
    epsilon_bound_for(w, &p)
}

/// Same as [`epsilon_bound`], reusing an already-computed partition.
pub fn epsilon_bound_for(w: &Window, p: &Partition) -> DyadicRational {
    match gamma_distance(w, p) {
        None => DyadicRational::zero(),
        Some(d) => {
            let scale =
                DyadicRational::from_integer(w.size() as i64 * (w.dims().m + w.dims().n - 1) as i64);
            &scale * &half_pow_shifted(d)
        }
    }
}

/// Per-row conservative bound on each ε_j: (m + n - 1) (1/2)^(dist(Γ, V(G_v)) - 1).
pub fn epsilon_row_bound(w: &Window, p: &Partition) -> DyadicRational {
    match gamma_distance(w, p) {
        None => DyadicRational::zero(),
        Some(d) => {
            let scale = DyadicRational::from_integer((w.dims().m + w.dims().n - 1) as i64);
            &scale * &half_pow_shifted(d)
        }
    }
}

/// (1/2)^(d - 1), valid for d >= 0 (d = 0 gives 2).
fn half_pow_shifted(d: u32) -> DyadicRational {
    if d == 0 {
        DyadicRational::from_integer(2)
    } else {
        DyadicRational::half_pow(d - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::VecDeque;

    fn dims(m: u32, n: u32) -> TorusDims {
        TorusDims::new(m, n).unwrap()
    }

    fn v(d: TorusDims, r: u32, c: u32) -> Vertex {
        Vertex::new(d, r, c)
    }

    /// BFS distances on the explicit adjacency structure.
    fn bfs_distances(d: TorusDims, src: Vertex) -> Vec<u32> {
        let (m, n) = (d.m() as usize, d.n() as usize);
        let idx = |v: Vertex| v.row() as usize * n + v.col() as usize;
        let mut dist = vec![u32::MAX; m * n];
        let mut q = VecDeque::new();
        dist[idx(src)] = 0;
        q.push_back(src);
        while let Some(u) = q.pop_front() {
            let du = dist[idx(u)];
            for (dr, dc) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                let w = u.offset(d, dr, dc);
                if dist[idx(w)] == u32::MAX {
                    dist[idx(w)] = du + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    #[test]
    fn dims_invariants() {
        assert!(TorusDims::new(2, 5).is_err());
        assert!(TorusDims::new(5, 2).is_err());
        assert!(TorusDims::new(3, 3).is_ok());
    }

    #[test]
    fn distance_examples() {
        let d = dims(6, 8);
        assert_eq!(distance(d, v(d, 0, 0), v(d, 0, 0)), 0);
        assert_eq!(distance(d, v(d, 0, 0), v(d, 3, 4)), 7);
        let d5 = dims(5, 5);
        assert_eq!(distance(d5, v(d5, 0, 0), v(d5, 3, 4)), 3);
    }

    #[test]
    fn distance_matches_bfs_oracle() {
        for (m, n) in [(3, 3), (3, 5), (4, 6), (5, 5), (6, 8), (8, 8)] {
            let d = dims(m, n);
            for src in d.vertices() {
                let bfs = bfs_distances(d, src);
                for tgt in d.vertices() {
                    let i = tgt.row() as usize * n as usize + tgt.col() as usize;
                    assert_eq!(distance(d, src, tgt), bfs[i], "{m}x{n} {src:?}->{tgt:?}");
                }
            }
        }
    }

    #[test]
    fn metric_axioms_exhaustive_up_to_8x8() {
        for m in 3..=8 {
            for n in 3..=8 {
                let d = dims(m, n);
                let vs: Vec<Vertex> = d.vertices().collect();
                let half_perimeter = m / 2 + n / 2;
                for &a in &vs {
                    for &b in &vs {
                        let dab = distance(d, a, b);
                        assert_eq!(dab, distance(d, b, a));
                        assert_eq!(dab == 0, a == b);
                        assert!(dab <= half_perimeter);
                        for &c in &vs {
                            assert!(distance(d, a, c) <= dab + distance(d, b, c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weight_examples() {
        let d = dims(6, 8);
        assert_eq!(weight(d, v(d, 0, 0), v(d, 0, 0)), DyadicRational::from_integer(2));
        assert_eq!(weight(d, v(d, 0, 0), v(d, 0, 1)), DyadicRational::one());
        // distance 7 -> (1/2)^6 = 1/64
        assert_eq!(weight(d, v(d, 0, 0), v(d, 3, 4)), DyadicRational::half_pow(6));
    }

    #[test]
    fn total_weight_small() {
        let d = dims(3, 3);
        // 2 + 4*1 + 4*(1/2) = 8, independent of the center by vertex-transitivity
        for u in d.vertices() {
            assert_eq!(total_weight(d, u), DyadicRational::from_integer(8));
        }
        let d68 = dims(6, 8);
        assert_eq!(total_weight(d68, v(d68, 0, 0)), DyadicRational::new(945, 6));
    }

    #[test]
    fn total_weight_large_approaches_18() {
        let d = dims(101, 101);
        let t = total_weight(d, v(d, 0, 0)).to_f64();
        assert!(t > 17.9 && t < 18.0, "total weight {t}");
    }

    #[test]
    fn total_weight_bounded_by_18_sweep() {
        let eighteen = DyadicRational::from_integer(18);
        for m in 3..=64u32 {
            for n in 3..=64u32 {
                let d = dims(m, n);
                let t = total_weight(d, v(d, 0, 0));
                assert!(t <= eighteen, "total weight exceeds 18 on {m}x{n}: {t}");
            }
        }
    }

    #[test]
    fn window_enumeration() {
        let d = dims(6, 8);
        let w = Window::new(d, v(d, 1, 1), 3).unwrap();
        let verts = w.vertices();
        assert_eq!(verts.len(), 9);
        assert_eq!(verts[0], v(d, 0, 0));
        assert_eq!(verts[8], v(d, 2, 2));
        assert_eq!(verts[w.center_index()], w.center());

        let d31 = dims(31, 31);
        let w13 = Window::new(d31, v(d31, 15, 15), 13).unwrap();
        assert_eq!(w13.vertices().len(), 169);
        assert_eq!(w13.interior().len(), 121);
        assert_eq!(w13.interior_size(), 121);

        let w9 = Window::new(d31, v(d31, 15, 15), 9).unwrap();
        assert_eq!(w9.interior().len(), 49);

        let w3 = Window::new(d31, v(d31, 15, 15), 3).unwrap();
        assert_eq!(w3.interior(), vec![w3.center_index()]);
    }

    #[test]
    fn window_validation() {
        let d = dims(6, 8);
        assert!(Window::new(d, v(d, 0, 0), 4).is_err());
        assert!(Window::new(d, v(d, 0, 0), 1).is_err());
        assert!(Window::new(d, v(d, 0, 0), 7).is_err()); // 7 > min(6, 8)
        assert!(Window::new(d, v(d, 0, 0), 5).is_ok());
    }

    #[test]
    fn partition_tiles_the_torus() {
        for (m, n, r) in [(6, 8, 3), (9, 9, 5), (13, 13, 9), (31, 31, 13), (32, 32, 13)] {
            let d = dims(m, n);
            let w = Window::new(d, v(d, m / 2, n / 2), r).unwrap();
            let p = partition(&w);
            let mut seen = std::collections::HashSet::new();
            let mut count = 0usize;
            for cell in &p.cells {
                for &x in cell {
                    assert!(seen.insert(x), "overlap at {x:?}");
                    count += 1;
                }
            }
            for &x in &p.gamma {
                assert!(seen.insert(x), "gamma overlap at {x:?}");
                count += 1;
            }
            assert_eq!(count as u64, d.vertex_count());
            // v_i belongs to S_i
            for (i, &wv) in w.vertices().iter().enumerate() {
                assert!(p.cells[i].contains(&wv), "window vertex {i} not in its own cell");
            }
        }
    }

    #[test]
    fn interior_cells_are_singletons_when_torus_is_large() {
        // S_i = {v_i} for interior i whenever m, n > 2r
        for (m, n, r) in [(7, 7, 3), (13, 15, 5), (27, 29, 13)] {
            let d = dims(m, n);
            let w = Window::new(d, v(d, m / 2, n / 2), r).unwrap();
            let p = partition(&w);
            let verts = w.vertices();
            for i in w.interior() {
                assert_eq!(p.cells[i], vec![verts[i]], "interior cell {i} not singleton");
            }
        }
    }

    #[test]
    fn gamma_empty_for_odd_torus() {
        for m in (3..=31u32).step_by(2) {
            for n in (3..=31u32).step_by(2) {
                let d = dims(m, n);
                let mut r = 3;
                while r <= m.min(n) {
                    let w = Window::new(d, v(d, m / 2, n / 2), r).unwrap();
                    let p = partition(&w);
                    assert!(p.gamma.is_empty(), "nonempty gamma for {m}x{n}, r={r}");
                    r += 2;
                }
            }
        }
    }

    #[test]
    fn gamma_bounded_for_even_torus() {
        for (m, n, r) in [(32, 32, 13), (33, 32, 13), (6, 8, 3), (26, 26, 13), (14, 20, 9)] {
            let d = dims(m, n);
            let w = Window::new(d, v(d, m / 2, n / 2), r).unwrap();
            let p = partition(&w);
            if m % 2 == 1 && n % 2 == 1 {
                assert!(p.gamma.is_empty());
            } else {
                assert!(!p.gamma.is_empty());
            }
            assert!(p.gamma.len() as u32 <= m + n - 1, "{m}x{n} r={r}: |Γ| = {}", p.gamma.len());
        }
    }

    #[test]
    fn epsilon_bound_values() {
        let d31 = dims(31, 31);
        let w = Window::new(d31, v(d31, 15, 15), 13).unwrap();
        assert_eq!(epsilon_bound(&w), DyadicRational::zero());

        let d32 = dims(32, 32);
        let w = Window::new(d32, v(d32, 16, 16), 13).unwrap();
        let p = partition(&w);
        assert_eq!(p.gamma.len(), 63);
        assert_eq!(gamma_distance(&w, &p), Some(10));
        // 169 * 63 * (1/2)^9 = 10647/512
        assert_eq!(epsilon_bound(&w), DyadicRational::new(10647, 9));
        // per-row: 63 * (1/2)^9
        assert_eq!(epsilon_row_bound(&w, &p), DyadicRational::new(63, 9));

        let d68 = dims(6, 8);
        let w3 = Window::new(d68, v(d68, 3, 4), 3).unwrap();
        let p3 = partition(&w3);
        assert_eq!(p3.gamma.len(), 13);
        assert_eq!(gamma_distance(&w3, &p3), Some(2));
        // 9 * 13 * (1/2)^1 = 117/2
        assert_eq!(epsilon_bound(&w3), DyadicRational::new(117, 1));
    }
}
