//! Weighted-Laplace mesh equations on the uniform computational domain.
//!
//! 1D: `(ρ x_ξ)_ξ = 0`, `x(0) = a`, `x(1) = b`.
//! 2D: `-∇·(M ∇w) = 0` for each map component with `M = diag(m11, m22)`.
//! Nodal densities enter as cell means (trapezoid in 1D, four-corner mean
//! in 2D); the cellwise variants take per-cell or per-triangle values.

use super::field::{self, Degree, Field1D};
use super::mesh1d::Mesh1D;
use super::mesh2d::Mesh2D;
use super::sparse::SparseSystem;
use crate::error::{Error, Result};

/// P1 solve with nodal density values on the uniform mesh of
/// `rho.len() - 1` cells. Returns the map `x(ξ)` as a field on the
/// computational mesh.
pub fn solve_weighted_laplace_1d(rho: &[f64], a: f64, b: f64) -> Result<Field1D> {
    check_positive(rho)?;
    let weights: Vec<f64> = rho.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    solve_cellwise_1d(&weights, a, b)
}

/// Same equation with a density that is constant on each computational cell.
pub fn solve_weighted_laplace_1d_cellwise(rho_cells: &[f64], a: f64, b: f64) -> Result<Field1D> {
    check_positive(rho_cells)?;
    solve_cellwise_1d(rho_cells, a, b)
}

fn check_positive(v: &[f64]) -> Result<()> {
    match v.iter().position(|&r| !(r > 0.0 && r.is_finite())) {
        Some(node) => Err(Error::NonPositiveDensity {
            node,
            value: v[node],
        }),
        None => Ok(()),
    }
}

/// The P1 system for `(w x_ξ)_ξ = 0` with cellwise `w` is solved exactly by
/// cell widths proportional to `1 / w`. Partial sums run inward from both
/// ends so tiny boundary cells keep full relative precision.
fn solve_cellwise_1d(weights: &[f64], a: f64, b: f64) -> Result<Field1D> {
    let n = weights.len();
    if n == 0 {
        return Err(Error::InvalidMesh("density needs at least one cell".into()));
    }
    let inv: Vec<f64> = weights.iter().map(|w| 1.0 / w).collect();
    let total: f64 = inv.iter().sum();
    let len = b - a;
    let mid = n / 2;
    let mut x = vec![0.0; n + 1];
    let mut acc = 0.0;
    for i in 0..mid {
        acc += inv[i];
        x[i + 1] = a + len * (acc / total);
    }
    acc = 0.0;
    for i in (mid..n).rev() {
        acc += inv[i];
        x[i] = b - len * (acc / total);
    }
    x[0] = a;
    x[n] = b;
    if let Some(i) = x.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::Tangled(format!("mesh map not increasing at cell {i}")));
    }
    Field1D::new(Mesh1D::uniform(n), Degree::P1, x)
}

/// Which map component a 2D solve produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    X,
    Y,
}

/// Solves both components of the 2D mesh equation on the computational grid
/// of `comp`. `m11`, `m22` are nodal values in lexicographic order; each
/// square cell uses the mean of its four corners.
pub fn solve_weighted_laplace_2d(
    m11: &[f64],
    m22: &[f64],
    comp: &Mesh2D,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = comp.n();
    let nn = (n + 1) * (n + 1);
    if m11.len() != nn || m22.len() != nn {
        return Err(Error::Dimension(format!(
            "monitor needs {nn} nodal values, got {} and {}",
            m11.len(),
            m22.len()
        )));
    }
    check_positive(m11)?;
    check_positive(m22)?;
    let mut t11 = Vec::with_capacity(2 * n * n);
    let mut t22 = Vec::with_capacity(2 * n * n);
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    for j in 0..n {
        for i in 0..n {
            let corners = [idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)];
            let a11 = corners.iter().map(|&k| m11[k]).sum::<f64>() / 4.0;
            let a22 = corners.iter().map(|&k| m22[k]).sum::<f64>() / 4.0;
            t11.extend([a11, a11]);
            t22.extend([a22, a22]);
        }
    }
    solve_weighted_laplace_2d_cellwise(&t11, &t22, comp)
}

/// Same equation with a monitor that is constant on each computational
/// triangle, ordered as [`super::mesh2d::triangles`].
pub fn solve_weighted_laplace_2d_cellwise(
    m11: &[f64],
    m22: &[f64],
    comp: &Mesh2D,
) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((
        solve_map_component_2d(m11, m22, comp, Component::X)?,
        solve_map_component_2d(m11, m22, comp, Component::Y)?,
    ))
}

/// One component of `-∇·(diag(a11, a22) ∇w) = 0` with per-triangle
/// coefficients: `w = 0` on the low side and `w = 1` on the high side of the
/// component's axis, natural conditions on the other two edges.
pub fn solve_map_component_2d(a11: &[f64], a22: &[f64], comp: &Mesh2D, component: Component) -> Result<Vec<f64>> {
    let n = comp.n();
    let nn = (n + 1) * (n + 1);
    let nt = 2 * n * n;
    if a11.len() != nt || a22.len() != nt {
        return Err(Error::Dimension(format!(
            "monitor needs {nt} triangle values, got {} and {}",
            a11.len(),
            a22.len()
        )));
    }
    check_positive(a11)?;
    check_positive(a22)?;

    let ident = Mesh2D::identity(n);
    let coords = ident.coords();
    let tris = super::mesh2d::triangles(n);
    let mut local = Vec::with_capacity(nt);
    let mut sys = SparseSystem::with_capacity(nn, 9 * nt + 2 * (n + 1));
    for ((&c1, &c2), tri) in a11.iter().zip(a22).zip(&tris) {
        let (area, g) = field::triangle_geometry([coords[tri[0]], coords[tri[1]], coords[tri[2]]]);
        let mut k = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                k[a][b] = area * (c1 * g[a][0] * g[b][0] + c2 * g[a][1] * g[b][1]);
                if k[a][b] != 0.0 {
                    sys.add(tri[a], tri[b], k[a][b]);
                }
            }
        }
        local.push(k);
    }

    let mut w = vec![0.0; nn];
    let mut fixed = vec![false; nn];
    for k in 0..nn {
        let (i, j) = comp.grid_position(k);
        let (lo, hi) = match component {
            Component::X => (i == 0, i == n),
            Component::Y => (j == 0, j == n),
        };
        if lo || hi {
            fixed[k] = true;
            w[k] = if hi { 1.0 } else { 0.0 };
        }
    }
    sys.set_identity_rows(&fixed);
    let lu = sys.factor()?;
    let mut x = lu.solve(&w)?;
    for k in 0..nn {
        if fixed[k] {
            x[k] = w[k];
        }
    }
    // Refinement with the residual summed over edge differences, which
    // stay exact where cells are tiny.
    for _ in 0..REFINEMENT_PASSES {
        let mut r = vec![0.0; nn];
        for (k, tri) in local.iter().zip(&tris) {
            for a in 0..3 {
                for b in 0..3 {
                    if a != b {
                        r[tri[a]] -= k[a][b] * (x[tri[b]] - x[tri[a]]);
                    }
                }
            }
        }
        for k in 0..nn {
            if fixed[k] {
                r[k] = 0.0;
            }
        }
        let d = lu.solve(&r)?;
        for k in 0..nn {
            if !fixed[k] {
                x[k] += d[k];
            }
        }
    }
    Ok(x)
}

const REFINEMENT_PASSES: usize = 3;
