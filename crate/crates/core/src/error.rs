//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by graph construction, file parsing, and report builders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(u64),

    #[error("density is undefined for a graph with {0} node(s)")]
    UndefinedDensity(usize),

    #[error("concentration index is undefined for an edgeless graph")]
    UndefinedConcentration,

    #[error("inequality is undefined when every cluster total is zero")]
    UndefinedInequality,

    #[error("modularity is undefined for an edgeless graph")]
    UndefinedModularity,

    #[error("partition label {label} out of range for node {node} (expected < {blocks})")]
    LabelOutOfRange { node: usize, label: usize, blocks: usize },

    #[error("partition length {got} does not match node count {expected}")]
    PartitionLength { got: usize, expected: usize },

    #[error("partition uses {used} of {declared} declared blocks; labels must be dense")]
    SparseLabels { used: usize, declared: usize },

    #[error("degree sequence entry {degree} exceeds the maximum {max} for {nodes} nodes")]
    UnrealizableDegree { degree: u64, max: u64, nodes: usize },

    #[error("degree solver did not reach tolerance (residual {residual:.3e})")]
    SolverDiverged { residual: f64 },

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("corpus selects {got} actor(s); at least {want} required")]
    TooFewActors { got: usize, want: usize },

    #[error("date window is empty: {from} is after {to}")]
    EmptyWindow { from: String, to: String },

    #[error("invalid date {0:?}; expected YYYY-MM-DD")]
    BadDate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
