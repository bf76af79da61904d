use std::io;

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("input contains no edges")]
    EmptyInput,

    #[error(
        "graph is not connected ({reached} of {n} nodes reachable from {root}); extract the largest component first"
    )]
    Disconnected { root: NodeId, reached: usize, n: usize },

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: u64, n: usize },

    #[error("{what}: {value} exceeds cap {cap}")]
    CapExceeded { what: &'static str, value: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bad format: {0}")]
    Format(String),

    #[error("size mismatch: oracle covers {oracle} nodes, graph has {graph}")]
    SizeMismatch { oracle: usize, graph: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}
