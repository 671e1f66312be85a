use crate::Rational;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ground set size {0} exceeds the supported maximum of {max}", max = crate::setfn::MAX_GROUND)]
    GroundTooLarge(usize),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("table has {got} entries, expected {expected}")]
    TableLength { expected: usize, got: usize },
    #[error("{what} value {value} at subset {mask:#b} lies outside [0,1]")]
    OutOfUnitInterval {
        what: String,
        mask: u32,
        value: Rational,
    },
    #[error("point has {got} coordinates, expected {expected}")]
    PointLength { expected: usize, got: usize },
    #[error("coordinate {index} = {value} lies outside [0,1]")]
    PointOutOfRange { index: usize, value: Rational },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("ground sets of the inner functions differ")]
    GroundMismatch,
    #[error("partition size {0} outside the supported range 1..=6")]
    PartitionRange(usize),
    #[error("graph with {0} nodes exceeds the 64-node limit")]
    GraphTooLarge(usize),
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("node {node} has in-degree {degree}, above the cap of {cap}")]
    InDegreeCap { node: usize, degree: usize, cap: usize },
    #[error("oracle budget exceeded: {what} needs {needed} steps, budget is {budget}")]
    Budget {
        what: &'static str,
        needed: u128,
        budget: u128,
    },
    #[error("node {node} violates the AD-infinity condition: coefficient {coefficient} at in-neighbour subset {subset:#b}")]
    NotAdInfinity {
        node: usize,
        subset: u32,
        coefficient: Rational,
    },
    #[error("graph is not a DAG; cycle through nodes {cycle:?}")]
    NotDag { cycle: Vec<usize> },
    #[error("invalid layering: {0}")]
    InvalidLayering(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("distribution of node `{node}` sums to {sum}, deficit {deficit}")]
    Distribution {
        node: String,
        sum: Rational,
        deficit: Rational,
    },
    #[error("rejection sampling gave up after {0} draws")]
    RejectionBudget(usize),
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Budget { .. } => "budget",
            Error::NotAdInfinity { .. } => "not-ad-infinity",
            Error::NotDag { .. } => "not-dag",
            Error::InvalidLayering(_) => "invalid-layering",
            Error::Distribution { .. } => "distribution",
            Error::UnknownLabel(_) => "unknown-label",
            Error::RejectionBudget(_) => "rejection-budget",
            _ => "invalid",
        }
    }
}
