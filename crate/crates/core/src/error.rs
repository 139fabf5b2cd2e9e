use thiserror::Error;

use crate::model::{BusId, LineId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The case document does not match the schema.
    #[error("case file parse error in {record}: {message}")]
    Parse { record: String, message: String },

    /// The case parsed but violates a model invariant.
    #[error("case validation error in {record}: {message}")]
    Validation { record: String, message: String },

    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown bus {0}")]
    UnknownBus(BusId),

    #[error("unknown line {0}")]
    UnknownLine(LineId),

    #[error("island with reference bus {reference} is unbalanced by {residual_mw:.9} MW")]
    Unbalanced { reference: BusId, residual_mw: f64 },

    #[error("singular reduced susceptance matrix in island with reference bus {reference}")]
    Singular { reference: BusId },

    #[error("LP solver failure after {iterations} iterations: {message}")]
    Solver {
        iterations: usize,
        message: String,
        log: Vec<String>,
    },

    #[error("dispatch model infeasible: {0}")]
    Infeasible(String),

    #[error("curtailment evaluation failed at hour {hour}: {source}")]
    AtHour {
        hour: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("recovery iteration {iteration} failed: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn parse(record: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            record: record.into(),
            message: message.into(),
        }
    }

    pub(crate) fn validation(record: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            record: record.into(),
            message: message.into(),
        }
    }
}
