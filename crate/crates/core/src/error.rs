use thiserror::Error;

/// Errors produced by every library entry point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate spectrum: eigenvalues must be distinct")]
    DegenerateSpectrum,

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    /// Entries whose magnitude falls inside the zero/nonzero ambiguity band, as (row, col).
    #[error("ambiguous pattern at positions {positions:?}")]
    AmbiguousPattern { positions: Vec<(usize, usize)> },

    #[error("pattern is not a superpattern of the pattern of the matrix")]
    NotASuperpattern,

    #[error(
        "borderline numerical rank (rank {rank} of {cols} columns, separation ratio {ratio:.3e}); rerun in exact mode"
    )]
    BorderlineRank { rank: usize, cols: usize, ratio: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("the starting matrix does not have the SSVP")]
    SsvpRequired,

    #[error("the matrix does not have the SSVP with respect to the liberated pattern")]
    SsvpWrtRequired,

    #[error("no convergence (best residual {residual:.3e})")]
    NoConvergence { residual: f64 },

    #[error("target singular values too far from the start (relative distance {distance:.3e})")]
    TargetTooFar { distance: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for verdicts that are mathematical statements rather than tool failures.
    pub fn is_mathematical(&self) -> bool {
        matches!(self, Error::Infeasible(_) | Error::SsvpRequired | Error::SsvpWrtRequired | Error::DegenerateSpectrum)
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
