//! Finite-element machinery: meshes, quadrature, P1/P2 solves of the
//! physical problem and of the mesh equations.

pub mod banded;
pub mod derivative;
pub mod field;
pub mod mesh1d;
pub mod mesh2d;
pub mod mpde;
pub mod quadrature;
pub mod sparse;
pub mod spde;

pub use derivative::{boundary_derivative_2d, one_sided_derivative_1d, End};
pub use field::{Degree, Field1D, Field2D};
pub use mesh1d::Mesh1D;
pub use mesh2d::{Edge, Mesh2D};
pub use mpde::{
    solve_map_component_2d, solve_weighted_laplace_1d, solve_weighted_laplace_1d_cellwise, solve_weighted_laplace_2d,
    solve_weighted_laplace_2d_cellwise, Component,
};
pub use quadrature::{gauss_legendre_rule, gauss_lobatto_rule, QuadratureRule, TriangleRule};
pub use spde::{solve_spde_1d, solve_spde_2d};
