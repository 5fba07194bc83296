use thiserror::Error;

/// Why a trajectory was abandoned. The sampler turns every one of these into
/// a rejected proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceKind {
    /// An implicit half-step did not reach its fixed point.
    FixedPoint,
    /// More boundary crossings in one step than the configured budget.
    TooManyReflections,
    /// The Hamiltonian became NaN or infinite along the trajectory.
    NonFiniteEnergy,
}

impl std::fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DivergenceKind::FixedPoint => "implicit step failed to converge",
            DivergenceKind::TooManyReflections => "too many reflections in one step",
            DivergenceKind::NonFiniteEnergy => "non-finite Hamiltonian",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("position violates constraint {index} (C = {value:e})")]
    ConstraintViolation { index: usize, value: f64 },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("capability missing: {0}")]
    Capability(String),

    #[error("metric is degenerate: {0}")]
    MetricDegenerate(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("trajectory diverged: {0}")]
    Divergence(DivergenceKind),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}
