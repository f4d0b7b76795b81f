//! Learners: consistent hypotheses in one and many dimensions, type-based
//! synthesis, classification and agnostic PAC learning by ERM.

mod consistent;
mod data;
mod pac;

pub use consistent::{
    classify, classify_many, learn_1d, learn_hd_consistent, pinning_loop, synthesize_hypothesis, verify_witness,
};
pub use data::{DistributionSpec, Hypothesis, SupportEntry, TrainingSequence};
pub use pac::{draw_sample, err_empirical, err_true, erm, pac_learn, sample_complexity, ErmMode, PacConfig, PacRun};

use crate::graph::GraphError;
use crate::logic::{EvalError, TransformError};
use crate::realizable::DpError;
use crate::types::TypeError;

#[derive(Debug, thiserror::Error)]
pub enum LearnError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("hypothesis was learned on expression {expected}, not {found}")]
    ExpressionMismatch { expected: String, found: String },
    #[error("subsequence ERM is limited to m <= 12, got {0}")]
    SubsequenceTooLong(usize),
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("empty training sequence")]
    EmptySample,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
