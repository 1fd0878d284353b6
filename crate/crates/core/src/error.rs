use thiserror::Error;

/// Errors raised by state construction, optics, dual-rail decoding and the
/// gate protocols.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("occupation vector has {found} modes, expected {expected}")]
    ModeCountMismatch { expected: usize, found: usize },

    #[error("state has no terms above the prune tolerance")]
    EmptyState,

    #[error("amplitude is not finite")]
    NonFinite,

    #[error("mode {mode} is out of range for a {mode_count}-mode state")]
    ModeOutOfRange { mode: usize, mode_count: usize },

    #[error("mode {0} is listed more than once")]
    DuplicateMode(usize),

    #[error("matrix is not unitary (max deviation from identity {0:.3e})")]
    NotUnitary(f64),

    #[error("unitary acts on {expected} modes but {found} were given")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state leaks out of the dual-rail subspace (leaked weight {0:.3e})")]
    Leakage(f64),

    #[error("amplitudes are not normalized (norm squared {0})")]
    NotNormalized(f64),

    #[error("zero vector cannot be normalized")]
    ZeroNorm,

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
