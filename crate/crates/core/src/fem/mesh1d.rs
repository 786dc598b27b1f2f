use crate::error::{Error, Result};

/// Cells shorter than this are treated as tangled.
pub const MIN_CELL_1D: f64 = 1e-15;

/// A partition `a = x_0 < x_1 < ... < x_N = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMesh(format!(
                "a 1D mesh needs at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        if let Some(v) = nodes.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidMesh(format!("non-finite node {v}")));
        }
        for (i, w) in nodes.windows(2).enumerate() {
            if !(w[1] - w[0] >= MIN_CELL_1D) {
                return Err(Error::Tangled(format!(
                    "cell {i} = [{}, {}] has length {:e}",
                    w[0],
                    w[1],
                    w[1] - w[0]
                )));
            }
        }
        Ok(Self { nodes })
    }

    /// Uniform mesh of `[0, 1]` with `n` cells.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            nodes: (0..=n).map(|i| i as f64 / n as f64).collect(),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn into_nodes(self) -> Vec<f64> {
        self.nodes
    }

    /// Number of cells.
    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn a(&self) -> f64 {
        self.nodes[0]
    }

    pub fn b(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        (self.nodes[i], self.nodes[i + 1])
    }

    pub fn cell_widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.windows(2).map(|w| w[1] - w[0])
    }

    pub fn min_cell(&self) -> f64 {
        self.cell_widths().fold(f64::INFINITY, f64::min)
    }

    pub fn max_cell(&self) -> f64 {
        self.cell_widths().fold(0.0, f64::max)
    }

    /// Index of the cell containing `x` (clamped to the mesh).
    pub fn locate(&self, x: f64) -> usize {
        let n = self.n_cells();
        match self.nodes.partition_point(|&v| v <= x) {
            0 => 0,
            i if i > n => n - 1,
            i => i - 1,
        }
    }

    /// Midpoint insertion, `N -> 2N`.
    pub fn refine_uniform(&self) -> Self {
        Self {
            nodes: refine_values(&self.nodes),
        }
    }
}

/// Piecewise-linear interpolation of nodal values onto the midpoint-refined mesh.
pub fn refine_values(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * values.len() - 1);
    for w in values.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*values.last().unwrap());
    out
}

/// Evaluates the piecewise-linear interpolant of `values` on `mesh` at `x`.
pub fn interpolate_at(mesh: &Mesh1D, values: &[f64], x: f64) -> f64 {
    let i = mesh.locate(x);
    let (xl, xr) = mesh.cell(i);
    let t = (x - xl) / (xr - xl);
    (1.0 - t) * values[i] + t * values[i + 1]
}

/// Piecewise-linear interpolation of nodal values onto the nodes of `target`.
pub fn interpolate(mesh: &Mesh1D, values: &[f64], target: &Mesh1D) -> Vec<f64> {
    target
        .nodes()
        .iter()
        .map(|&x| interpolate_at(mesh, values, x))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refine_two_nodes() {
        let m = Mesh1D::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(m.refine_uniform().nodes(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn rejects_zero_length_cell() {
        assert!(matches!(Mesh1D::new(vec![0.0, 0.5, 0.5, 1.0]), Err(Error::Tangled(_))));
        assert!(matches!(Mesh1D::new(vec![0.0, 0.6, 0.4, 1.0]), Err(Error::Tangled(_))));
        assert!(Mesh1D::new(vec![0.0]).is_err());
    }

    #[test]
    fn identity_interpolates_to_identity() {
        let coarse = Mesh1D::new(vec![0.0, 0.1, 0.5, 0.9, 1.0]).unwrap();
        let fine = coarse.refine_uniform().refine_uniform();
        let vals = interpolate(&coarse, coarse.nodes(), &fine);
        for (v, x) in vals.iter().zip(fine.nodes()) {
            assert!((v - x).abs() < 1e-15);
        }
        assert_eq!(refine_values(coarse.nodes()), coarse.refine_uniform().into_nodes());
    }

    #[test]
    fn uniform_widths() {
        let m = Mesh1D::uniform(16);
        assert!((m.min_cell() - 1.0 / 16.0).abs() < 1e-15);
        assert!((m.max_cell() - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(m.locate(0.0), 0);
        assert_eq!(m.locate(1.0), 15);
        assert_eq!(m.locate(0.5), 8);
    }
}
