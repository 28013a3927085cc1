use std::fmt;

/// Errors shared by the samplers and statistics routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A distribution or process parameter is outside its admissible range.
    InvalidParameter(String),
    /// A function argument lies outside the domain of definition.
    Domain(String),
    /// The requested moment does not exist for the given parameters.
    InfiniteMoment(String),
    /// A rejection loop exceeded its iteration cap. This points at a
    /// parameter or implementation fault rather than bad luck.
    RejectionCapExceeded { iterations: u64 },
    /// A sampled truncation level is too large to materialize.
    TruncationOverflow { level: f64 },
    /// An empirical distribution was constructed from no data.
    EmptySample,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::InfiniteMoment(msg) => write!(f, "moment does not exist: {msg}"),
            Error::RejectionCapExceeded { iterations } => {
                write!(f, "rejection sampler exceeded {iterations} iterations")
            }
            Error::TruncationOverflow { level } => {
                write!(f, "sampled truncation level {level} is too large to materialize")
            }
            Error::EmptySample => write!(f, "empirical distribution requires at least one value"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
