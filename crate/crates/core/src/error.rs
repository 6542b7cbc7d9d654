use thiserror::Error;

use crate::lp::LpError;
use crate::spec::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error("too many binary variables: {count} (limit {limit})")]
    TooManyBinaries { count: usize, limit: usize },

    #[error("branch and bound node limit of {0} exceeded")]
    NodeLimit(usize),

    #[error("MILP relaxation is unbounded")]
    UnboundedRelaxation,

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("model: {0}")]
    Model(String),

    #[error("unknown {what} `{name}` (available: {available})")]
    UnknownStrategy {
        what: &'static str,
        name: String,
        available: String,
    },

    #[error("at level {level}, node {node}: {source}")]
    Construction {
        level: usize,
        node: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("oracle limited to k <= {limit}, got k = {k}")]
    OracleLimit { k: usize, limit: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn mismatch(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }
}
