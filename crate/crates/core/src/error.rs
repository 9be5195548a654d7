use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the valuation algebra and the algorithms built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot mix {left} and {right} valuations")]
    InstanceMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("the {instance} instance does not support removal")]
    RemovalUnsupported { instance: &'static str },

    #[error("the {instance} instance has no per-configuration semantics for queries")]
    ScalarUnsupported { instance: &'static str },

    #[error("target {target} is not a subset of scope {scope}")]
    NotSubset { target: String, scope: String },

    #[error("unknown variable id {0}")]
    UnknownVariableId(usize),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{var}` has no value `{value}`")]
    UnknownValue { var: String, value: String },

    #[error("invalid frame for `{var}`: {reason}")]
    InvalidFrame { var: String, reason: String },

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("frame of size {size} exceeds the limit of {limit}")]
    FrameTooLarge { size: usize, limit: usize },

    #[error("table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },

    #[error("table entry {index} is {value}; entries must be finite and non-negative")]
    InvalidEntry { index: usize, value: f64 },

    #[error("frame sizes disagree for variable id {var}: {left} vs {right}")]
    CardinalityMismatch { var: usize, left: usize, right: usize },

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("not a hypertree; Graham's test stops at {residual}")]
    NotHypertree { residual: String },

    #[error("invalid Markov tree: {0}")]
    InvalidTree(String),

    #[error("no tree node contains the scope {0}")]
    UnassignableFactor(String),

    #[error("message {from} -> {to} has not been computed")]
    MissingMessage { from: usize, to: usize },

    #[error("node {0} is out of range")]
    NodeOutOfRange(usize),

    #[error("variable `{0}` does not occur in any hyperedge")]
    UncoveredVariable(String),

    #[error("query syntax error at column {column}: {message}")]
    QuerySyntax { column: usize, message: String },

    #[error("set-chain is malformed: {0}")]
    InvalidChain(String),
}
