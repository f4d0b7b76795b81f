//! Rank-bounded MSO types as interned recursive objects, with the
//! transforms that track them through expression operators.

mod brute;
mod ops;
mod satisfy;
mod store;

pub use brute::{compute_type, compute_type_indexed};
pub use satisfy::{type_satisfies, SlotMap};
pub use store::{hex, LabelSetId, Layout, StoreStats, TypeId, TypeNode, TypeStore};

use crate::graph::GraphError;

#[derive(Debug, thiserror::Error)]
pub enum TypeError {
    #[error("label `{0}` is not in the type's label set")]
    MissingLabel(String),
    #[error("operator needs two distinct labels, got `{0}` twice")]
    SameLabel(String),
    #[error("reserved label `{0}` already present")]
    ReservedLabel(String),
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("formula rank {formula} exceeds type rank {ty}")]
    RankExceeded { formula: usize, ty: usize },
    #[error("formula set depth {formula} exceeds type budget {ty}")]
    BudgetExceeded { formula: usize, ty: usize },
    #[error("variable `{0}` is not mapped to a slot")]
    Unmapped(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
