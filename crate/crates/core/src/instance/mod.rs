//! Graphs, terminal sets and tree decompositions: parsing, validation and
//! conversion to nice decompositions.

pub mod graph;
pub mod io;
pub mod nice;
pub mod td;

pub use graph::Graph;
pub use io::{parse_graph, parse_td, parse_terminals, write_graph, write_td, write_terminals};
pub use nice::{make_nice, make_nice_with, NiceDecomposition, NiceNode, NodeKind, OrderPolicy};
pub use td::{validate_td, TreeDecomposition, Violation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("invalid tree decomposition: {0}")]
    Validation(#[from] Violation),
    #[error("terminal set is empty")]
    NoTerminals,
}
