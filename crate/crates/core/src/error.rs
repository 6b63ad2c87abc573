use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {tail} -> {head}")]
    DuplicateEdge { tail: usize, head: usize },
    #[error("failure probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("flow source and destination are both {0}")]
    DegenerateFlow(usize),
    #[error("inconsistent dump: entry at node {node} names next hop {next_hop}, but there is no such physical edge")]
    InconsistentDump { node: usize, next_hop: usize },
    #[error("overlay has {m} edges, enumeration limit is {limit}")]
    GuardExceeded { m: usize, limit: usize },
    #[error("exact evaluation exceeded its budget of {0} states")]
    BudgetExceeded(usize),
    #[error("no reliability value for flow {s} -> {t}, which has non-zero weight")]
    MissingFlow { s: usize, t: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// Errors caused by inputs that are well formed but violate a model
    /// constraint (enumeration guard, inconsistent routing dump, invalid
    /// graph). The CLI reports these with a distinct exit code.
    pub fn is_consistency_error(&self) -> bool {
        matches!(
            self,
            Error::SelfLoop(_)
                | Error::DuplicateEdge { .. }
                | Error::InvalidProbability(_)
                | Error::NodeOutOfRange { .. }
                | Error::InconsistentDump { .. }
                | Error::GuardExceeded { .. }
                | Error::BudgetExceeded(_)
                | Error::MissingFlow { .. }
        )
    }
}
