//! Shared numerical kernels: radial grids, quadrature, initial-value
//! integration and dense eigensolvers.

mod eigen;
mod grid;
mod ivp;
mod matrix;
mod quadrature;
mod stencil;

pub use eigen::{gen_sym_eigen, sym_eigen, EigenDecomposition};
pub use grid::{sphere_area, RadialGrid, MIN_INTERIOR_NODES};
pub use ivp::{integrate_ivp, radial_second_derivative, Trajectory};
pub use matrix::{cholesky, determinant, dot, norm2, SymMatrix};
pub use quadrature::{simpson, weighted_integral};
pub use stencil::{central_first_derivative, right_first_derivative, second_derivative};
