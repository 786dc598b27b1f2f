//! Galerkin solves of `-eps Δu + mu b·∇u + r u = f`, `u = 0` on the boundary.
//!
//! Degree 1 uses vertex (Gauss–Lobatto) quadrature for every term, which
//! lumps the mass matrix. Degree 2 uses Simpson's rule in 1D and the
//! degree-4 triangle rule in 2D. The convection term is assembled in
//! non-divergence form with no stabilisation.

use super::banded::BandMatrix;
use super::field::{self, Degree, Field1D, Field2D};
use super::mesh1d::Mesh1D;
use super::mesh2d::Mesh2D;
use super::quadrature::{gauss_lobatto_rule, TriangleRule};
use super::sparse::SparseSystem;
use crate::error::{Error, Result};
use crate::problem::{Dim, TwoParamProblem};

pub fn solve_spde_1d(p: &TwoParamProblem, mesh: &Mesh1D, degree: Degree) -> Result<Field1D> {
    if p.dim() != Dim::One {
        return Err(Error::Dimension("solve_spde_1d needs a 1D problem".into()));
    }
    let order = degree.order();
    let ndofs = field::ndofs_1d(mesh, degree);
    let rule = gauss_lobatto_rule(order + 1)?;
    let (eps, mu) = (p.eps(), p.mu());

    let mut a = BandMatrix::zeros(ndofs, order, order);
    let mut rhs = vec![0.0; ndofs];
    for cell in 0..mesh.n_cells() {
        let (xl, xr) = mesh.cell(cell);
        let h = xr - xl;
        if !(h >= super::mesh1d::MIN_CELL_1D) {
            return Err(Error::Tangled(format!("cell {cell} has length {h:e}")));
        }
        let base = order * cell;
        for (t, w) in rule.iter() {
            let x = xl + h * t;
            let phi = field::basis_1d(degree, t);
            let dphi: Vec<f64> = field::basis_1d_deriv(degree, t).iter().map(|d| d / h).collect();
            let (b, r, f) = (p.b(x, 0.0)[0], p.r(x, 0.0), p.f(x, 0.0));
            let wh = w * h;
            for i in 0..=order {
                rhs[base + i] += wh * f * phi[i];
                for j in 0..=order {
                    let v = eps * dphi[j] * dphi[i] + mu * b * dphi[j] * phi[i] + r * phi[j] * phi[i];
                    if v != 0.0 {
                        a.add(base + i, base + j, wh * v);
                    }
                }
            }
        }
    }
    for d in [0, ndofs - 1] {
        a.set_identity_row(d);
        rhs[d] = 0.0;
    }
    let coeffs = a.solve(rhs)?;
    Field1D::new(mesh.clone(), degree, coeffs)
}

pub fn solve_spde_2d(p: &TwoParamProblem, mesh: &Mesh2D, degree: Degree) -> Result<Field2D> {
    if p.dim() != Dim::Two {
        return Err(Error::Dimension("solve_spde_2d needs a 2D problem".into()));
    }
    mesh.check_orientation()?;
    let n = mesh.n();
    let ndofs = field::ndofs_2d(mesh, degree);
    let rule = match degree {
        Degree::P1 => TriangleRule::vertex(),
        Degree::P2 => TriangleRule::degree4(),
    };
    let (eps, mu) = (p.eps(), p.mu());
    let nloc = match degree {
        Degree::P1 => 3,
        Degree::P2 => 6,
    };
    let tris = mesh.triangles();
    let mut sys = SparseSystem::with_capacity(ndofs, tris.len() * nloc * nloc * rule.points.len());
    let mut rhs = vec![0.0; ndofs];
    let coords = mesh.coords();
    for t in tris {
        let pts = [coords[t[0]], coords[t[1]], coords[t[2]]];
        let (area, g) = field::triangle_geometry(pts);
        let dofs = field::triangle_dofs(n, degree, t);
        let mut local = vec![0.0; nloc * nloc];
        for (l, w) in rule.iter() {
            let x = l[0] * pts[0][0] + l[1] * pts[1][0] + l[2] * pts[2][0];
            let y = l[0] * pts[0][1] + l[1] * pts[1][1] + l[2] * pts[2][1];
            let phi = field::basis_tri(degree, l);
            let grad = field::basis_tri_grad(degree, l, g);
            let (b, r, f) = (p.b(x, y), p.r(x, y), p.f(x, y));
            let wa = w * area;
            for i in 0..nloc {
                rhs[dofs[i]] += wa * f * phi[i];
                for j in 0..nloc {
                    let diff = grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1];
                    let conv = b[0] * grad[j][0] + b[1] * grad[j][1];
                    local[i * nloc + j] += wa * (eps * diff + mu * conv * phi[i] + r * phi[j] * phi[i]);
                }
            }
        }
        for i in 0..nloc {
            for j in 0..nloc {
                let v = local[i * nloc + j];
                if v != 0.0 {
                    sys.add(dofs[i], dofs[j], v);
                }
            }
        }
    }
    let dirichlet = boundary_dofs(n, degree);
    sys.set_identity_rows(&dirichlet);
    for (d, _) in dirichlet.iter().enumerate().filter(|(_, &b)| b) {
        rhs[d] = 0.0;
    }
    let coeffs = sys.solve(&rhs)?;
    Field2D::new(mesh.clone(), degree, coeffs)
}

/// Flags the dofs lying on the boundary of the unit square.
pub fn boundary_dofs(n: usize, degree: Degree) -> Vec<bool> {
    let m = degree.order() * n;
    (0..=m)
        .flat_map(|j| (0..=m).map(move |i| i == 0 || j == 0 || i == m || j == m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{make_problem, ProblemId};
    use std::sync::Arc;

    fn poisson_1d(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> TwoParamProblem {
        // mu must be positive; b = 0 removes convection
        TwoParamProblem::new_1d("poisson", 1.0, 1.0, |_| 0.0, |_| 0.0, |_| 0.0, f).unwrap()
    }

    #[test]
    fn symmetric_data_gives_symmetric_solution() {
        let p = TwoParamProblem::new_1d("rd", 1.0, 1.0, |_| 0.0, |_| 0.0, |_| 1.0, |_| 1.0).unwrap();
        let u = solve_spde_1d(&p, &Mesh1D::uniform(2), Degree::P1).unwrap();
        assert_eq!(u.coeffs[0], 0.0);
        assert_eq!(u.coeffs[2], 0.0);
        // -u'' + u = 1 with lumped mass: (2/h² + 1) u1 = 1, h = 1/2
        assert!((u.coeffs[1] - 1.0 / 9.0).abs() < 1e-15);
        let u = solve_spde_1d(&p, &Mesh1D::uniform(8), Degree::P2).unwrap();
        let m = u.coeffs.len();
        for i in 0..m {
            assert!((u.coeffs[i] - u.coeffs[m - 1 - i]).abs() < 1e-14);
        }
    }

    #[test]
    fn piecewise_linear_exact_solution() {
        // -u'' = 1: the P1 solution is nodally exact on any mesh
        let p = poisson_1d(|_| 1.0);
        let mesh = Mesh1D::new(vec![0.0, 0.05, 0.3, 0.31, 0.7, 1.0]).unwrap();
        let u = solve_spde_1d(&p, &mesh, Degree::P1).unwrap();
        for (x, v) in mesh.nodes().iter().zip(&u.coeffs) {
            assert!((v - x * (1.0 - x) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn p2_reproduces_quadratic() {
        let p = poisson_1d(|_| 2.0);
        let mesh = Mesh1D::new(vec![0.0, 0.2, 0.25, 0.9, 1.0]).unwrap();
        let u = solve_spde_1d(&p, &mesh, Degree::P2).unwrap();
        for x in [0.1, 0.22, 0.5, 0.95] {
            assert!((u.eval(x) - x * (1.0 - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_source_gives_zero() {
        let p = make_problem(&ProblemId::new("rcd2d-exp", 1e-2, 1.0))
            .unwrap()
            .with_source(Arc::new(|_, _| 0.0));
        for degree in [Degree::P1, Degree::P2] {
            let u = solve_spde_2d(&p, &Mesh2D::identity(8), degree).unwrap();
            assert!(u.coeffs.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn symmetric_2d_problem_has_symmetric_solution() {
        let p = TwoParamProblem::new(
            "sym",
            Dim::Two,
            0.1,
            1.0,
            Arc::new(|_, _| [0.0, 0.0]),
            Arc::new(|_, _| 0.0),
            Arc::new(|_, _| 1.0),
            Arc::new(|x, y| (x + y).exp()),
        )
        .unwrap();
        // the diagonal split is invariant under (x, y) -> (y, x)
        let n = 8;
        let mesh = Mesh2D::identity(n);
        for degree in [Degree::P1, Degree::P2] {
            let u = solve_spde_2d(&p, &mesh, degree).unwrap();
            let m = degree.order() * n + 1;
            for j in 0..m {
                for i in 0..m {
                    assert!((u.coeffs[j * m + i] - u.coeffs[i * m + j]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn p2_beats_p1_on_bubble() {
        let p = TwoParamProblem::new(
            "bubble",
            Dim::Two,
            1.0,
            1.0,
            Arc::new(|_, _| [0.0, 0.0]),
            Arc::new(|_, _| 0.0),
            Arc::new(|_, _| 0.0),
            Arc::new(|x, y| 2.0 * (x * (1.0 - x) + y * (1.0 - y))),
        )
        .unwrap();
        let exact = |x: f64, y: f64| x * (1.0 - x) * y * (1.0 - y);
        let mesh = Mesh2D::identity(8);
        let u1 = solve_spde_2d(&p, &mesh, Degree::P1).unwrap();
        let u2 = solve_spde_2d(&p, &mesh, Degree::P2).unwrap();
        let err = |u: &Field2D| {
            Field2D::dof_coords(&u.mesh, u.degree)
                .iter()
                .zip(&u.coeffs)
                .map(|(c, v)| (v - exact(c[0], c[1])).abs())
                .fold(0.0, f64::max)
        };
        assert!(err(&u1) < 2e-3);
        assert!(err(&u2) < 1e-4);
    }
}
