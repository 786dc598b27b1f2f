//! One-sided boundary derivatives of P1 fields.

use super::field::{Degree, Field1D, Field2D};
use super::mesh2d::Edge;
use crate::error::{Error, Result};

/// End of the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Left,
    Right,
}

/// `(u_1 - u_0)/(x_1 - x_0)` at the left end, `(u_N - u_{N-1})/(x_N - x_{N-1})`
/// at the right end.
pub fn one_sided_derivative_1d(u: &Field1D, end: End) -> f64 {
    let v = u.vertex_values();
    let x = u.mesh.nodes();
    let n = x.len() - 1;
    match end {
        End::Left => (v[1] - v[0]) / (x[1] - x[0]),
        End::Right => (v[n] - v[n - 1]) / (x[n] - x[n - 1]),
    }
}

/// Divided difference at boundary node `node` along the grid line entering
/// the domain from `edge`, divided by the change in `x` (left, right) or `y`
/// (bottom, top).
pub fn boundary_derivative_2d(u: &Field2D, edge: Edge, node: usize) -> Result<f64> {
    if u.degree != Degree::P1 {
        return Err(Error::Dimension("boundary derivatives need a P1 field".into()));
    }
    let mesh = &u.mesh;
    if node >= mesh.n_nodes() || !mesh.on_edge(node, edge) {
        return Err(Error::InvalidParameter(format!("node {node} is not on the {edge:?} edge")));
    }
    let stride = mesh.n() + 1;
    let c = mesh.coords();
    let (inner, outer, axis) = match edge {
        Edge::Left => (node + 1, node, 0),
        Edge::Right => (node, node - 1, 0),
        Edge::Bottom => (node + stride, node, 1),
        Edge::Top => (node, node - stride, 1),
    };
    let dx = c[inner][axis] - c[outer][axis];
    if dx.abs() < super::mesh1d::MIN_CELL_1D {
        return Err(Error::Tangled(format!(
            "degenerate boundary cell at node {node} ({edge:?})"
        )));
    }
    Ok((u.coeffs[inner] - u.coeffs[outer]) / dx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh1d::Mesh1D;
    use crate::fem::mesh2d::Mesh2D;

    #[test]
    fn divided_differences_1d() {
        let mesh = Mesh1D::new(vec![0.0, 0.25, 1.0]).unwrap();
        let u = Field1D::new(mesh.clone(), Degree::P1, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(one_sided_derivative_1d(&u, End::Left), 4.0);
        assert!((one_sided_derivative_1d(&u, End::Right) + 4.0 / 3.0).abs() < 1e-15);
        let c = Field1D::interpolate(mesh.clone(), Degree::P1, |_| 2.5);
        assert_eq!(one_sided_derivative_1d(&c, End::Left), 0.0);
        assert_eq!(one_sided_derivative_1d(&c, End::Right), 0.0);
        let lin = Field1D::interpolate(Mesh1D::new(vec![0.0, 0.1, 0.7, 1.0]).unwrap(), Degree::P1, |x| x);
        assert!((one_sided_derivative_1d(&lin, End::Left) - 1.0).abs() < 1e-14);
        assert!((one_sided_derivative_1d(&lin, End::Right) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn linear_field_on_identity_mesh() {
        let mesh = Mesh2D::identity(4);
        let u = Field2D::interpolate(mesh.clone(), Degree::P1, |x, _| x);
        for l in [0, 5, 10, 15, 20] {
            assert!((boundary_derivative_2d(&u, Edge::Left, l).unwrap() - 1.0).abs() < 1e-14);
            assert!((boundary_derivative_2d(&u, Edge::Right, l + 4).unwrap() - 1.0).abs() < 1e-14);
        }
        let v = Field2D::interpolate(mesh, Degree::P1, |_, _| 0.0);
        for (edge, l) in [(Edge::Left, 5), (Edge::Right, 9), (Edge::Bottom, 2), (Edge::Top, 22)] {
            assert_eq!(boundary_derivative_2d(&v, edge, l).unwrap(), 0.0);
        }
    }

    #[test]
    fn left_node_uses_right_neighbour() {
        // only node 6 differs from zero, so the derivative at node 5 sees it
        let mesh = Mesh2D::identity(4);
        let mut coeffs = vec![0.0; 25];
        coeffs[6] = 1.0;
        let u = Field2D::new(mesh, Degree::P1, coeffs).unwrap();
        assert!((boundary_derivative_2d(&u, Edge::Left, 5).unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(boundary_derivative_2d(&u, Edge::Left, 10).unwrap(), 0.0);
        assert!((boundary_derivative_2d(&u, Edge::Bottom, 1).unwrap() - 4.0).abs() < 1e-14);
        assert!(boundary_derivative_2d(&u, Edge::Left, 6).is_err());
    }
}
