//! Numerical laboratory for constrained mean-field equations on the unit
//! ball: radial solutions, the spectrum of the nonlocal linearized operator,
//! generalized nodal domains of radial eigenfunctions, and the
//! finite-dimensional inertia arguments that bound their number.

pub mod acceptance;
pub mod cli;
pub mod error;
pub mod inertia;
pub mod mfe_solver;
pub mod nodal;
pub mod numerics;
pub mod spectral;

pub use error::{Error, Result};
