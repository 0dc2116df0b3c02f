use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("boundary segment endpoint {value} is not a multiple of 1/{n}")]
    MisalignedSegment { value: f64, n: usize },

    #[error("degenerate element (area {area:e})")]
    DegenerateElement { area: f64 },

    #[error("unsupported quadrature degree {0}")]
    UnsupportedDegree(usize),

    #[error("singular system: pivot {pivot:e} below threshold {threshold:e} at step {step}")]
    SingularSystem { step: usize, pivot: f64, threshold: f64 },

    #[error("edge {0} carries no Neumann flag")]
    NotNeumann(usize),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("unknown case `{0}`")]
    UnknownCase(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
