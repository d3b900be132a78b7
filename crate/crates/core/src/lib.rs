//! Numerical laboratory for the C_n family of integrable vertex models.
//!
//! The crate constructs the rank-n R-matrix family and its boundary
//! reflection (K-) matrices, carries out the fusion of auxiliary spaces
//! through the explicit projector bases, builds periodic and open
//! transfer matrices, and verifies the web of algebraic identities the
//! construction must satisfy (Yang-Baxter, unitarity, reflection
//! equations, operator product identities, asymptotics, special values).
//! On top of that sits a T-Q evaluator and a multi-start Newton solver
//! for the Bethe-ansatz equations, cross-checked against exact
//! diagonalization.
//!
//! Modules:
//! - [`tensor`]: dense complex linear algebra over labeled tensor factors.
//! - [`model`]: the R-matrix family and boundary K-matrices.
//! - [`fusion`]: projectors, fused R- and K-matrices, closure identities.
//! - [`transfer`]: monodromy/transfer matrices, spectra, Hamiltonians.
//! - [`bethe`]: T-Q relations, Bethe-ansatz residuals and solvers.
//! - [`run`]: verification campaigns driven by a single [`run::RunConfig`].

extern crate blas_src;

pub mod bethe;
pub mod error;
pub mod fusion;
pub mod model;
pub mod par;
pub mod report;
pub mod run;
pub mod tensor;
pub mod transfer;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
