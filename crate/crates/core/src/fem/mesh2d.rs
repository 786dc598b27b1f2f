//! Logically rectangular triangulations of the unit square.
//!
//! Node `k` sits at computational grid position `(k mod (N+1), k / (N+1))`.
//! Each computational cell is split along its lower-right to upper-left
//! diagonal; only the physical coordinates move.

use crate::error::{Error, Result};

/// Triangles with smaller signed area are treated as tangled.
pub const MIN_AREA_2D: f64 = 1e-24;

/// One of the four edges of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Left,
    Right,
    Bottom,
    Top,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    n: usize,
    coords: Vec<[f64; 2]>,
}

impl Mesh2D {
    /// Uniform grid, physical coordinates equal to computational ones.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        let t = move |i: usize| i as f64 / n as f64;
        let coords = (0..=n)
            .flat_map(|j| (0..=n).map(move |i| [t(i), t(j)]))
            .collect();
        Self { n, coords }
    }

    /// Wraps moved coordinates; checks the boundary conditions of the map
    /// and the orientation of every triangle.
    pub fn new(n: usize, coords: Vec<[f64; 2]>) -> Result<Self> {
        if n == 0 || coords.len() != (n + 1) * (n + 1) {
            return Err(Error::InvalidMesh(format!(
                "expected {} coordinates for N = {n}, got {}",
                (n + 1) * (n + 1),
                coords.len()
            )));
        }
        let mesh = Self { n, coords };
        mesh.check_boundary()?;
        mesh.check_orientation()?;
        Ok(mesh)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }

    /// Grid position `(i, j)` of node `k`.
    #[inline]
    pub fn grid_position(&self, k: usize) -> (usize, usize) {
        (k % (self.n + 1), k / (self.n + 1))
    }

    /// Computational coordinates `(ξ1, ξ2)` of node `k`.
    pub fn comp_coord(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.grid_position(k);
        let n = self.n as f64;
        [i as f64 / n, j as f64 / n]
    }

    pub fn on_edge(&self, k: usize, edge: Edge) -> bool {
        let (i, j) = self.grid_position(k);
        match edge {
            Edge::Left => i == 0,
            Edge::Right => i == self.n,
            Edge::Bottom => j == 0,
            Edge::Top => j == self.n,
        }
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        let (i, j) = self.grid_position(k);
        i == 0 || j == 0 || i == self.n || j == self.n
    }

    /// Counter-clockwise vertex triples, two per computational cell.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        triangles(self.n)
    }

    pub fn signed_area(&self, t: [usize; 3]) -> f64 {
        signed_area(self.coords[t[0]], self.coords[t[1]], self.coords[t[2]])
    }

    pub fn min_area(&self) -> f64 {
        self.triangles()
            .into_iter()
            .map(|t| self.signed_area(t))
            .fold(f64::INFINITY, f64::min)
    }

    /// Shortest triangle edge.
    pub fn min_edge(&self) -> f64 {
        let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        self.triangles()
            .into_iter()
            .map(|[a, b, c]| {
                let (pa, pb, pc) = (self.coords[a], self.coords[b], self.coords[c]);
                d(pa, pb).min(d(pb, pc)).min(d(pc, pa))
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check_orientation(&self) -> Result<()> {
        for t in self.triangles() {
            let a = self.signed_area(t);
            if !(a >= MIN_AREA_2D) {
                return Err(Error::Tangled(format!(
                    "triangle {t:?} has signed area {a:e}"
                )));
            }
        }
        Ok(())
    }

    fn check_boundary(&self) -> Result<()> {
        for (k, &[x, y]) in self.coords.iter().enumerate() {
            let bad = (self.on_edge(k, Edge::Left) && x != 0.0)
                || (self.on_edge(k, Edge::Right) && x != 1.0)
                || (self.on_edge(k, Edge::Bottom) && y != 0.0)
                || (self.on_edge(k, Edge::Top) && y != 1.0);
            if bad {
                return Err(Error::InvalidMesh(format!(
                    "boundary node {k} at ({x}, {y}) is off its edge"
                )));
            }
        }
        Ok(())
    }

    /// Splits each computational cell 2×2, `N -> 2N`, placing new nodes on
    /// the piecewise-linear interpolant of the current map.
    pub fn refine_uniform(&self) -> Self {
        let xs: Vec<f64> = self.coords.iter().map(|c| c[0]).collect();
        let ys: Vec<f64> = self.coords.iter().map(|c| c[1]).collect();
        let (fx, fy) = (refine_nodal(self.n, &xs), refine_nodal(self.n, &ys));
        Self {
            n: 2 * self.n,
            coords: fx.into_iter().zip(fy).map(|(x, y)| [x, y]).collect(),
        }
    }
}

pub fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Connectivity of the `N × N` grid.
pub fn triangles(n: usize) -> Vec<[usize; 3]> {
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut out = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v11, v01) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            out.push([v00, v10, v01]);
            out.push([v10, v11, v01]);
        }
    }
    out
}

/// Interpolates a nodal P1 field on the `N` grid onto the `2N` grid.
///
/// New nodes on horizontal and vertical cell edges take the edge average;
/// cell centres lie on the split diagonal and take its average.
pub fn refine_nodal(n: usize, values: &[f64]) -> Vec<f64> {
    assert_eq!(values.len(), (n + 1) * (n + 1));
    let m = 2 * n;
    let coarse = |i: usize, j: usize| values[j * (n + 1) + i];
    let mut out = Vec::with_capacity((m + 1) * (m + 1));
    for jj in 0..=m {
        for ii in 0..=m {
            let (i, j) = (ii / 2, jj / 2);
            let v = match (ii % 2, jj % 2) {
                (0, 0) => coarse(i, j),
                (1, 0) => 0.5 * (coarse(i, j) + coarse(i + 1, j)),
                (0, 1) => 0.5 * (coarse(i, j) + coarse(i, j + 1)),
                _ => 0.5 * (coarse(i + 1, j) + coarse(i, j + 1)),
            };
            out.push(v);
        }
    }
    out
}
