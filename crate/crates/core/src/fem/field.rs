//! Finite-element functions on 1D and 2D meshes.
//!
//! Degree-2 coefficients are nodal values on the once-refined node set: in
//! 1D the dofs interleave as `vertex 0, midpoint 0, vertex 1, ...`; in 2D
//! they form the lexicographic `(2N+1)²` grid whose odd positions are edge
//! midpoints of the split cells.

use super::mesh1d::{self, Mesh1D};
use super::mesh2d::{self, Mesh2D};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree {
    P1,
    P2,
}

impl Degree {
    pub fn order(self) -> usize {
        match self {
            Degree::P1 => 1,
            Degree::P2 => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    pub mesh: Mesh1D,
    pub degree: Degree,
    pub coeffs: Vec<f64>,
}

pub fn ndofs_1d(mesh: &Mesh1D, degree: Degree) -> usize {
    degree.order() * mesh.n_cells() + 1
}

impl Field1D {
    pub fn new(mesh: Mesh1D, degree: Degree, coeffs: Vec<f64>) -> Result<Self> {
        let expected = ndofs_1d(&mesh, degree);
        if coeffs.len() != expected {
            return Err(Error::Dimension(format!(
                "{degree:?} field on {} cells needs {expected} coefficients, got {}",
                mesh.n_cells(),
                coeffs.len()
            )));
        }
        Ok(Self {
            mesh,
            degree,
            coeffs,
        })
    }

    /// Nodal interpolant of `g`.
    pub fn interpolate(mesh: Mesh1D, degree: Degree, g: impl Fn(f64) -> f64) -> Self {
        let coeffs = match degree {
            Degree::P1 => mesh.nodes().iter().map(|&x| g(x)).collect(),
            Degree::P2 => mesh1d::refine_values(mesh.nodes()).into_iter().map(g).collect(),
        };
        Self {
            mesh,
            degree,
            coeffs,
        }
    }

    /// Values at the mesh vertices.
    pub fn vertex_values(&self) -> Vec<f64> {
        match self.degree {
            Degree::P1 => self.coeffs.clone(),
            Degree::P2 => self.coeffs.iter().step_by(2).copied().collect(),
        }
    }

    /// Local coefficients of cell `i`, ordered left, (midpoint,) right.
    pub fn cell_coeffs(&self, i: usize) -> &[f64] {
        match self.degree {
            Degree::P1 => &self.coeffs[i..i + 2],
            Degree::P2 => &self.coeffs[2 * i..2 * i + 3],
        }
    }

    /// Exact embedding in the degree-2 space.
    pub fn to_p2(&self) -> Field1D {
        match self.degree {
            Degree::P2 => self.clone(),
            Degree::P1 => Field1D {
                mesh: self.mesh.clone(),
                degree: Degree::P2,
                coeffs: mesh1d::refine_values(&self.coeffs),
            },
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.mesh.locate(x);
        let (a, b) = self.mesh.cell(i);
        let t = (x - a) / (b - a);
        let c = self.cell_coeffs(i);
        basis_1d(self.degree, t)
            .iter()
            .zip(c)
            .map(|(phi, ci)| phi * ci)
            .sum()
    }

    /// Coefficient-wise `self - other`; both are lifted to a common degree.
    pub fn sub(&self, other: &Field1D) -> Result<Field1D> {
        if self.mesh != other.mesh {
            return Err(Error::Dimension("fields live on different meshes".into()));
        }
        let (a, b) = if self.degree == other.degree {
            (self.clone(), other.clone())
        } else {
            (self.to_p2(), other.to_p2())
        };
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        Ok(Field1D { coeffs, ..a })
    }
}

/// Reference basis values on `[0, 1]`.
pub fn basis_1d(degree: Degree, t: f64) -> Vec<f64> {
    match degree {
        Degree::P1 => vec![1.0 - t, t],
        Degree::P2 => vec![
            2.0 * (t - 0.5) * (t - 1.0),
            -4.0 * t * (t - 1.0),
            2.0 * t * (t - 0.5),
        ],
    }
}

/// Reference basis derivatives with respect to `t`.
pub fn basis_1d_deriv(degree: Degree, t: f64) -> Vec<f64> {
    match degree {
        Degree::P1 => vec![-1.0, 1.0],
        Degree::P2 => vec![4.0 * t - 3.0, 4.0 - 8.0 * t, 4.0 * t - 1.0],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub mesh: Mesh2D,
    pub degree: Degree,
    pub coeffs: Vec<f64>,
}

pub fn ndofs_2d(mesh: &Mesh2D, degree: Degree) -> usize {
    let m = degree.order() * mesh.n() + 1;
    m * m
}

/// Global dofs of the triangle `t`: vertices then edge midpoints of
/// `(v0,v1)`, `(v1,v2)`, `(v2,v0)`.
pub fn triangle_dofs(n: usize, degree: Degree, t: [usize; 3]) -> Vec<usize> {
    match degree {
        Degree::P1 => t.to_vec(),
        Degree::P2 => {
            let m = 2 * n + 1;
            let pos = |k: usize| (2 * (k % (n + 1)), 2 * (k / (n + 1)));
            let p: Vec<(usize, usize)> = t.iter().map(|&k| pos(k)).collect();
            let id = |(i, j): (usize, usize)| j * m + i;
            let mid = |a: (usize, usize), b: (usize, usize)| ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
            vec![
                id(p[0]),
                id(p[1]),
                id(p[2]),
                id(mid(p[0], p[1])),
                id(mid(p[1], p[2])),
                id(mid(p[2], p[0])),
            ]
        }
    }
}

impl Field2D {
    pub fn new(mesh: Mesh2D, degree: Degree, coeffs: Vec<f64>) -> Result<Self> {
        let expected = ndofs_2d(&mesh, degree);
        if coeffs.len() != expected {
            return Err(Error::Dimension(format!(
                "{degree:?} field needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            mesh,
            degree,
            coeffs,
        })
    }

    /// Physical positions of the dofs.
    pub fn dof_coords(mesh: &Mesh2D, degree: Degree) -> Vec<[f64; 2]> {
        match degree {
            Degree::P1 => mesh.coords().to_vec(),
            Degree::P2 => {
                let xs: Vec<f64> = mesh.coords().iter().map(|c| c[0]).collect();
                let ys: Vec<f64> = mesh.coords().iter().map(|c| c[1]).collect();
                let fx = mesh2d::refine_nodal(mesh.n(), &xs);
                let fy = mesh2d::refine_nodal(mesh.n(), &ys);
                fx.into_iter().zip(fy).map(|(x, y)| [x, y]).collect()
            }
        }
    }

    pub fn interpolate(mesh: Mesh2D, degree: Degree, g: impl Fn(f64, f64) -> f64) -> Self {
        let coeffs = Self::dof_coords(&mesh, degree)
            .into_iter()
            .map(|[x, y]| g(x, y))
            .collect();
        Self {
            mesh,
            degree,
            coeffs,
        }
    }

    pub fn vertex_values(&self) -> Vec<f64> {
        match self.degree {
            Degree::P1 => self.coeffs.clone(),
            Degree::P2 => {
                let n = self.mesh.n();
                let m = 2 * n + 1;
                (0..=n)
                    .flat_map(|j| (0..=n).map(move |i| (2 * j) * m + 2 * i))
                    .map(|k| self.coeffs[k])
                    .collect()
            }
        }
    }

    pub fn to_p2(&self) -> Field2D {
        match self.degree {
            Degree::P2 => self.clone(),
            Degree::P1 => Field2D {
                mesh: self.mesh.clone(),
                degree: Degree::P2,
                coeffs: mesh2d::refine_nodal(self.mesh.n(), &self.coeffs),
            },
        }
    }

    pub fn sub(&self, other: &Field2D) -> Result<Field2D> {
        if self.mesh != other.mesh {
            return Err(Error::Dimension("fields live on different meshes".into()));
        }
        let (a, b) = if self.degree == other.degree {
            (self.clone(), other.clone())
        } else {
            (self.to_p2(), other.to_p2())
        };
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        Ok(Field2D { coeffs, ..a })
    }
}

/// Triangle basis values at barycentric point `l`, ordered as in
/// [`triangle_dofs`].
pub fn basis_tri(degree: Degree, l: [f64; 3]) -> Vec<f64> {
    match degree {
        Degree::P1 => l.to_vec(),
        Degree::P2 => vec![
            l[0] * (2.0 * l[0] - 1.0),
            l[1] * (2.0 * l[1] - 1.0),
            l[2] * (2.0 * l[2] - 1.0),
            4.0 * l[0] * l[1],
            4.0 * l[1] * l[2],
            4.0 * l[2] * l[0],
        ],
    }
}

/// Physical gradients of the triangle basis, given the constant gradients
/// `g` of the barycentric coordinates.
pub fn basis_tri_grad(degree: Degree, l: [f64; 3], g: [[f64; 2]; 3]) -> Vec<[f64; 2]> {
    match degree {
        Degree::P1 => g.to_vec(),
        Degree::P2 => {
            let vert = |a: usize| {
                let s = 4.0 * l[a] - 1.0;
                [s * g[a][0], s * g[a][1]]
            };
            let edge = |a: usize, b: usize| {
                [
                    4.0 * (l[a] * g[b][0] + l[b] * g[a][0]),
                    4.0 * (l[a] * g[b][1] + l[b] * g[a][1]),
                ]
            };
            vec![vert(0), vert(1), vert(2), edge(0, 1), edge(1, 2), edge(2, 0)]
        }
    }
}

/// Area and barycentric-coordinate gradients of a triangle.
pub fn triangle_geometry(p: [[f64; 2]; 3]) -> (f64, [[f64; 2]; 3]) {
    let area = mesh2d::signed_area(p[0], p[1], p[2]);
    let inv = 1.0 / (2.0 * area);
    let g = |a: usize, b: usize| [(p[a][1] - p[b][1]) * inv, (p[b][0] - p[a][0]) * inv];
    // ∇λ_i is the inward normal of the opposite edge scaled by 1/(2|T|)
    (area, [g(1, 2), g(2, 0), g(0, 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_embeds_exactly() {
        let mesh = Mesh1D::new(vec![0.0, 0.3, 0.4, 1.0]).unwrap();
        let u = Field1D::interpolate(mesh, Degree::P1, |x| 2.0 * x * x - x);
        let u2 = u.to_p2();
        for x in [0.0, 0.1, 0.35, 0.77, 1.0] {
            assert!((u.eval(x) - u2.eval(x)).abs() < 1e-15);
        }
        assert_eq!(u2.vertex_values(), u.coeffs);
    }

    #[test]
    fn p2_reproduces_quadratics() {
        let mesh = Mesh1D::new(vec![0.0, 0.3, 0.4, 1.0]).unwrap();
        let g = |x: f64| 3.0 * x * x - x + 0.5;
        let u = Field1D::interpolate(mesh, Degree::P2, g);
        for x in [0.0, 0.1, 0.35, 0.77, 1.0] {
            assert!((u.eval(x) - g(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn triangle_grad_of_linear() {
        let p = [[0.1, 0.0], [1.0, 0.2], [0.3, 0.9]];
        let (area, g) = triangle_geometry(p);
        assert!(area > 0.0);
        // u = 2x - 3y
        let u: Vec<f64> = p.iter().map(|q| 2.0 * q[0] - 3.0 * q[1]).collect();
        let grad = (0..3).fold([0.0, 0.0], |acc, a| [acc[0] + u[a] * g[a][0], acc[1] + u[a] * g[a][1]]);
        assert!((grad[0] - 2.0).abs() < 1e-13 && (grad[1] + 3.0).abs() < 1e-13);
    }

    #[test]
    fn p2_dof_layout() {
        let n = 2;
        let tris = mesh2d::triangles(n);
        // first cell, lower triangle (0, 1, 3) on the 5x5 refined grid
        assert_eq!(triangle_dofs(n, Degree::P2, tris[0]), vec![0, 2, 10, 1, 6, 5]);
        let mesh = Mesh2D::identity(n);
        let f = Field2D::interpolate(mesh, Degree::P1, |x, y| x + 2.0 * y);
        let f2 = f.to_p2();
        let coords = Field2D::dof_coords(&f.mesh, Degree::P2);
        for (c, v) in coords.iter().zip(&f2.coeffs) {
            assert!((c[0] + 2.0 * c[1] - v).abs() < 1e-15);
        }
        assert_eq!(f2.vertex_values(), f.coeffs);
    }
}
