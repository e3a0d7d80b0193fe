use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid band: upper bound {upper} is below lower bound {lower} (or lower bound is not positive)")]
    InvalidBand { lower: f64, upper: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sample index {index} out of range for a game with {n} samples")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("empty batch")]
    EmptyBatch,

    #[error("singular linear system: pivot {pivot:e} at column {column} is below tolerance {tolerance:e}")]
    Singular { column: usize, pivot: f64, tolerance: f64 },

    #[error("no unique Nash equilibrium for {kind} game: {source}")]
    NoEquilibrium {
        kind: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("stepper is not initialized for {0}")]
    Uninitialized(&'static str),

    #[error("cannot compose steppers: {0}")]
    Composition(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("empty trajectory list")]
    NoTrajectories,

    #[error("trajectory has no record at or before step {0}")]
    MissingRecord(usize),

    #[error(
        "window of {window} records is invalid for a trajectory of {records} records (need 2 <= window <= records)"
    )]
    InvalidWindow { window: usize, records: usize },

    #[error("malformed CSV at row {row}: {reason}")]
    MalformedCsv { row: usize, reason: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
