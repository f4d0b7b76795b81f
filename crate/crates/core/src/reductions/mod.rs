//! Executable constructions: weighted 2-SAT as a consistency instance, the
//! two-copy gadget, and model checking through the learner.

mod gadget;
mod mc;
mod wsat;

pub use gadget::{copy_id, two_copy_expression, two_copy_gadget, W1, W2};
pub use mc::{mc_via_learning, McConfig, McStats, OracleMode};
pub use wsat::{all_cnfs_up_to_symmetry, gen_wsat, literal_vertex, wsat_brute, Cnf2, Literal, WsatBatch, WsatInstance};

use crate::graph::GraphError;
use crate::realizable::DpError;
use crate::learn::LearnError;
use crate::logic::TransformError;

#[derive(Debug, thiserror::Error)]
pub enum ReductionError {
    #[error("cnf line {line}: {msg}")]
    Cnf { line: usize, msg: String },
    #[error("weight {ell} exceeds the number of variables {n}")]
    Weight { ell: usize, n: usize },
    #[error("candidate family of {family} sets exceeds the cap {cap}")]
    Cap { family: usize, cap: usize },
    #[error("`{0}` is not a sentence")]
    NotSentence(String),
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}
