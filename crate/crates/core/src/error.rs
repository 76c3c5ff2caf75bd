use thiserror::Error;

/// Every failure the toolkit reports. Geometric precondition failures are
/// kept apart from I/O and parse errors so that front ends can map them to
/// distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at {line}:{col}: expected {}", expected.join(" | "))]
    Syntax {
        line: usize,
        col: usize,
        expected: Vec<String>,
    },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("immersion failure at {at:?}: smallest singular value {sigma:.3e}")]
    ImmersionFailure { at: Vec<f64>, sigma: f64 },
    #[error("complex tangent plane (angle {angle:.3e})")]
    ComplexTangent { angle: f64 },
    #[error("singular start: |grad E| = {grad:.3e}")]
    SingularStart { grad: f64 },
    #[error("degenerate critical locus: E vanishes on a whole neighbourhood")]
    DegenerateLocus,
    #[error("slope is not critical: |E| = {e:.3e}")]
    NotCritical { e: f64 },
    #[error("inconclusive sampling: {0}")]
    InconclusiveSampling(String),
    #[error("tangent planes do not converge along the sequence (variation {variation:.3e})")]
    NonConvergent { variation: f64 },
    #[error("rank of dp is not constant on the patch (ranks {ranks:?})")]
    MixedRank { ranks: Vec<usize> },
    #[error("exceptional point (margin {margin:.3e})")]
    ExceptionalPoint { margin: f64 },
    #[error("rank drop of the dual germ (rank {rank})")]
    RankDrop { rank: usize },
    #[error("trace failure: {0}")]
    TraceFailure(String),
    #[error("line within {distance:.3e} of the dual hypersurface")]
    WallProximity { distance: f64 },
    #[error("subdivision budget of {0} boxes exceeded")]
    BudgetExceeded(usize),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors caused by the geometry of the input rather than by
    /// malformed text or the file system.
    pub fn is_geometric(&self) -> bool {
        !matches!(
            self,
            Error::Syntax { .. }
                | Error::UnknownIdentifier(_)
                | Error::Io(_)
                | Error::InvalidInput(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
