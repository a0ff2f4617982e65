//! First eigenvalues of the p-Laplacian on constant-curvature model spaces and
//! rotationally symmetric manifolds, integral Ricci curvature norms, and
//! numerical checks of the comparison theorems built on them.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod comparison_suite;
pub mod error;
pub mod model_geometry;
pub mod ode;
pub mod quadrature;
pub mod radial_eigensolver;
pub mod rearrangement_isoperimetry;
pub mod spline;
pub mod warped_manifold;

pub use error::{Error, Result};
pub use model_geometry::ModelSpace;
pub use radial_eigensolver::{EigenResult, RadialProblem};
pub use warped_manifold::{CurvatureReport, WarpedProfile};
