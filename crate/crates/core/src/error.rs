//! Error type shared by all toolkit operations.

use std::fmt;

use crate::instance::InstanceViolation;

/// Errors returned by toolkit operations. Each variant carries a stable
/// machine-readable code (see [`Error::code`]) used by the CLI for exit-code
/// mapping and by tests.
#[derive(Debug)]
pub enum Error {
    /// Requested layer is not part of the multilayer graph.
    LayerNotFound(String),
    /// A solution references a logical link the graph does not contain.
    UnknownLogicalLink(String),
    /// Generator parameters cannot produce a valid instance.
    ParamsInfeasible(String),
    /// Instance file could not be parsed.
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// Instance parsed but violates structural invariants.
    Validation(Vec<InstanceViolation>),
    /// A demand cannot be routed over the selected overlay.
    Unroutable { demand: usize },
    /// A solution fails a feasibility check; carries the first violation.
    InfeasibleSolution(String),
    /// Instance exceeds the exact solver's size limits.
    LimitsExceeded(String),
    /// Aggregation requested over an empty table.
    NoData,
    /// Underlying I/O failure.
    Io(std::io::Error),
}

impl Error {
    /// Stable code string for this error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::LayerNotFound(_) => "LAYER_NOT_FOUND",
            Error::UnknownLogicalLink(_) => "UNKNOWN_LOGICAL_LINK",
            Error::ParamsInfeasible(_) => "PARAMS_INFEASIBLE",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::Validation(_) => "VALIDATION_ERROR",
            Error::Unroutable { .. } => "UNROUTABLE",
            Error::InfeasibleSolution(_) => "INFEASIBLE_SOLUTION",
            Error::LimitsExceeded(_) => "LIMITS_EXCEEDED",
            Error::NoData => "NO_DATA",
            Error::Io(_) => "IO_ERROR",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LayerNotFound(layer) => write!(f, "LAYER_NOT_FOUND: {layer}"),
            Error::UnknownLogicalLink(id) => write!(f, "UNKNOWN_LOGICAL_LINK: {id}"),
            Error::ParamsInfeasible(why) => write!(f, "PARAMS_INFEASIBLE: {why}"),
            Error::Parse {
                line,
                column,
                message,
            } => write!(f, "PARSE_ERROR at line {line}, column {column}: {message}"),
            Error::Validation(violations) => {
                write!(f, "VALIDATION_ERROR:")?;
                for v in violations {
                    write!(f, " [{v}]")?;
                }
                Ok(())
            }
            Error::Unroutable { demand } => write!(f, "UNROUTABLE: demand {demand}"),
            Error::InfeasibleSolution(why) => write!(f, "INFEASIBLE_SOLUTION: {why}"),
            Error::LimitsExceeded(why) => write!(f, "LIMITS_EXCEEDED: {why}"),
            Error::NoData => write!(f, "NO_DATA"),
            Error::Io(e) => write!(f, "IO_ERROR: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
