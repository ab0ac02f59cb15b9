use std::io;

use thiserror::Error;

/// Errors raised by the library.
///
/// Decode failure of the Reed-Solomon decoder is not an error; it is reported
/// through [`crate::rscode::DecodeOutcome::failed`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero has no multiplicative inverse in GF(256)")]
    ZeroInverse,

    #[error("zero raised to non-positive power {0}")]
    ZeroPower(i64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("duplicate id {0}")]
    DuplicateId(u64),

    #[error("no relevant item for query; NDCG undefined")]
    NoRelevantItems,

    #[error("requested {requested} queries but only {feasible} feasible attribute combinations exist")]
    InfeasibleQueries { requested: usize, feasible: usize },

    #[error("non-finite objective at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
