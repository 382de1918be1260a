use num_bigint::BigUint;
use thiserror::Error;

/// Errors raised by library operations. Domain outcomes such as "contextual"
/// or "disturbing" are never errors; they are reported through verdicts.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("unknown measurement `{0}`")]
    UnknownMeasurement(String),

    #[error("unknown outcome `{outcome}` for measurement `{measurement}`")]
    UnknownOutcome { measurement: String, outcome: String },

    #[error("enumeration too large: {cardinality} elements exceeds limit {limit}")]
    TooLarge { cardinality: BigUint, limit: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not a subscenario: {0}")]
    NotSubscenario(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
