use thiserror::Error;

use crate::model::{Axis, BoxId};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("box {id}: {axis}-side {value} is outside (0, 1]")]
    SideOutOfRange {
        id: BoxId,
        axis: Axis,
        value: Rational,
    },
    #[error("box id {0} appears twice in the instance")]
    DuplicateBoxId(BoxId),
    #[error("placement references unknown box id {0}")]
    UnknownBoxId(BoxId),
    #[error("box {0} is placed more than once")]
    DuplicatePlacement(BoxId),
    #[error("box {0} has no placement")]
    MissingPlacement(BoxId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{items} items exceed the exact-search limit of {limit}")]
    TooLarge { items: usize, limit: usize },
    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{what} = {value} is out of range: {expected}")]
    Domain {
        what: &'static str,
        value: String,
        expected: &'static str,
    },
    #[error("malformed input: {0}")]
    Format(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: impl ToString, expected: &'static str) -> Self {
        Error::Domain {
            what,
            value: value.to_string(),
            expected,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
