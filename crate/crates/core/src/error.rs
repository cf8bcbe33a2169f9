use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input at line {line}: {reason}")]
    MalformedInput { line: usize, reason: String },

    #[error("self-loop on node {0:?}")]
    SelfLoop(String),

    #[error("unknown node {0:?}")]
    UnknownNode(String),

    #[error("{{{0}, {1}}} is not an edge")]
    NotAnEdge(String, String),

    #[error("node {0:?} has no incident edges")]
    IsolatedNode(String),

    #[error("graph has no edges")]
    EmptyEdgeSet,

    #[error("degree mismatch: deg(u) = {left}, deg(v) = {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("brute-force oracle too large: {states} states exceeds limit {limit}")]
    OracleTooLarge { states: u128, limit: u128 },

    #[error("invalid weight class {0}; expected 1, 2 or 3")]
    InvalidWeight(u8),

    #[error("{0}")]
    Domain(String),

    #[error("node {node} has {degree} edges in the selected weight classes, bound is {bound}")]
    DegreeBoundViolated {
        node: String,
        degree: usize,
        bound: usize,
    },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("not a permutation of 1..={0}")]
    NotAPermutation(usize),

    #[error("index ({i}, {j}) out of range for n = {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
