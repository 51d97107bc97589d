use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid size {0} is not a power of two")]
    GridNotPowerOfTwo(usize),

    #[error("grid of size {grid} cannot resolve degree {degree} (need 2·degree + 1 ≤ grid)")]
    Aliasing { grid: usize, degree: usize },

    #[error("empty set: {0}")]
    EmptySet(&'static str),

    #[error("gap schedule exhausts the arcs at level {level}: gap {gap:e} ≥ arc length {arc:e}")]
    GapTooLarge { level: usize, gap: f64, arc: f64 },

    #[error("under-resolved: {0}")]
    UnderResolved(String),

    #[error("negative-frequency leakage {leakage:e} exceeds tolerance {tolerance:e}")]
    Leakage { leakage: f64, tolerance: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
