//! Labeled graphs and clique-width expressions.

mod build;
mod cexpr;
mod labeled;

pub use build::{
    encode_training_labels, gen_cograph, gen_tree, mark_vertex, mark_vertices, random_expression, trivial_expression,
};
pub use cexpr::{CwExpression, Diagnostic, Node, NodeId, LEFT_MARK, RIGHT_MARK};
pub use labeled::{IndexedGraph, LabeledGraph, MAX_INDEXED};

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("label `{0}` is already used")]
    LabelInUse(String),
    #[error("graph has {n} vertices, more than the supported {max}")]
    TooLarge { n: usize, max: usize },
    #[error("empty expression or graph")]
    Empty,
    #[error("malformed input: {0}")]
    Format(String),
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("expression is not well-formed: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Malformed(Vec<Diagnostic>),
}
