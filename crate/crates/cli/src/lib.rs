//! Verification runner and calculators behind the `sliceball` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod calc;
pub mod config;
pub mod field;
pub mod suites;

use sliceball::Quaternion;
use thiserror::Error;

pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or malformed input; exit status 2.
    #[error("usage error: {0}")]
    Usage(String),
    /// Input that parses but violates a mathematical precondition; exit status 2.
    #[error("validation error: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<sliceball::Error> for CliError {
    fn from(e: sliceball::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Parses a quaternion written as a JSON 4-array `[w, x, y, z]`.
pub fn parse_quaternion(s: &str) -> Result<Quaternion, CliError> {
    let a: [f64; 4] = serde_json::from_str(s)
        .map_err(|e| CliError::Usage(format!("expected a quaternion [w, x, y, z], got {s:?}: {e}")))?;
    if a.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Usage(format!("quaternion {s:?} has non-finite components")));
    }
    Ok(Quaternion::from_array(a))
}
