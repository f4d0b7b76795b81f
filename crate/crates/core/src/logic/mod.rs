//! MSO formulas: syntax, parsing, brute-force semantics and rewritings.

mod bank;
mod eval;
mod formula;
mod parse;
mod transform;

pub use bank::{formula_bank, free_var_names};
pub use eval::{eval_formula, eval_indexed, Assignment, EvalError};
pub use formula::{fresh_name, Formula, FreeVars};
pub use parse::{parse_formula, parse_formula_with_sets, ParseError};
pub use transform::{
    deg_formula, encode_examples_formula, pin_vertex_formula, singletonize, DegMode, TransformError,
};
