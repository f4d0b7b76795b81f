//! Learning MSO-definable concepts over labeled graphs given by
//! clique-width expressions.

pub mod graph;
pub mod learn;
pub mod realizable;
pub mod reductions;
pub mod logic;
pub mod types;
