use std::fmt;

use fatoulab::{BlaschkeError, CircleError, CoveringError, HarmonicError, MapError, RenderError};

/// Validation failures exit with 1, everything that goes wrong after the
/// inputs were accepted exits with 2.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub fn runtime(msg: impl fmt::Display) -> CliError {
    CliError::Runtime(msg.to_string())
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::InvalidParameter(_) | MapError::InvalidInput(_) => invalid(e.to_string()),
            _ => runtime(e),
        }
    }
}

impl From<BlaschkeError> for CliError {
    fn from(e: BlaschkeError) -> Self {
        match e {
            BlaschkeError::OutOfRange(_)
            | BlaschkeError::InvalidInput(_)
            | BlaschkeError::TooCloseToSingularity { .. } => invalid(e.to_string()),
            _ => runtime(e),
        }
    }
}

impl From<CoveringError> for CliError {
    fn from(e: CoveringError) -> Self {
        invalid(e.to_string())
    }
}

impl From<HarmonicError> for CliError {
    fn from(e: HarmonicError) -> Self {
        match e {
            HarmonicError::StallRateExceeded { .. } => runtime(e),
            _ => invalid(e.to_string()),
        }
    }
}

impl From<CircleError> for CliError {
    fn from(e: CircleError) -> Self {
        match e {
            CircleError::InvalidInput(_) | CircleError::EmptyInput => invalid(e.to_string()),
            _ => runtime(e),
        }
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Unsupported(_) | RenderError::InvalidGrid(_) => invalid(e.to_string()),
            _ => runtime(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        runtime(e)
    }
}
