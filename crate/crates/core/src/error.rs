//! Error type shared by all modules.

use crate::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Requested operator would exceed the configured entry-count budget.
    #[error("capacity exceeded: {requested} complex entries requested, cap is {cap}")]
    Capacity { requested: u128, cap: u128 },

    #[error("dimension mismatch: {0}")]
    ShapeMismatch(String),

    #[error("factor index {index} out of range for {count} factors")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("duplicate factor position {0}")]
    DuplicatePosition(usize),

    /// Evaluation lands on (or too close to) a zero of a scalar prefactor.
    #[error("singular evaluation of {what} at u = {u}")]
    Singularity { what: &'static str, u: C64 },

    /// T-Q evaluation too close to a pole.
    #[error("pole within {dist:.2e} of u = {u}")]
    PoleProximity { u: C64, dist: f64 },

    #[error("eigen decomposition did not separate: {0}")]
    DegenerateSpectrum(String),

    #[error("two Bethe roots collide within {0:.2e}")]
    RootCollision(f64),

    #[error("Bethe root magnitude below 1e-12 (amplitude denominators vanish)")]
    RootAtOrigin,

    #[error("root count constraint violated: {0}")]
    BadRootCounts(String),

    #[error("solver did not converge: best residual {best:.3e} over {seeds} seeds")]
    NonConvergence { best: f64, seeds: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    LinAlg(#[from] ndarray_linalg::error::LinalgError),

    #[error(transparent)]
    Shape(#[from] ndarray::ShapeError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
