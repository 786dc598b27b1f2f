//! Layer-adapted meshes for singularly perturbed reaction-convection-diffusion
//! problems.
//!
//! Meshes are generated by solving a weighted-Laplace mesh equation whose
//! density (1D) or diagonal monitor matrix (2D) is built from boundary
//! derivatives of iteratively computed P1 solutions. The resulting meshes
//! are of Bakhvalov type without any a priori knowledge of where layers sit
//! or how wide they are.

pub mod analysis;
pub mod error;
pub mod fem;
pub mod io;
pub mod mpde1d;
pub mod mpde2d;
pub mod problem;

pub use error::{Error, Result};
pub use mpde1d::{DensityParams, DriverOptions, MapCoupling, MonitorRule};
pub use problem::{make_problem, ProblemId, TwoParamProblem};
