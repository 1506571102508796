//! First-order arithmetic over `{0, ..., N}`: syntax, normalization, a
//! brute-force oracle, and compilation into counter programs whose
//! zero-termination decides the formula.

mod ast;
mod compile;
mod normal;
mod oracle;
mod parse;

use thiserror::Error;

pub use ast::{Bound, Cmp, Formula, Quantifier, Query, Rel, Term};
pub use compile::{compile, compile_normalized, constant_counter, CompiledProgram, Manifest, ReductionEntry, Roles};
pub use normal::{desugar, is_normalized, nnf, normalize, prenex_nnf, split_prefix};
pub use oracle::{eval, eval_oracle, holds, Env};
pub use parse::parse_query;

use crate::gadgets::{GadgetError, WalkError};
use crate::program::ProgramError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable `{name}` at offset {pos} is neither bound nor declared free")]
    Unbound { name: String, pos: usize },
    #[error("expected {expected} free values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("value {value} of `{name}` is outside 0..={n}")]
    OutOfSegment { name: String, value: u64, n: u64 },
    #[error("constant {value} exceeds N = {n}")]
    ConstantTooLarge { value: u64, n: u64 },
    #[error("formula is not in prenex negation normal form")]
    NotNormalized,
    #[error("initial value does not fit in 64 bits")]
    Overflow,
    #[error("no witness run found: {0:?}")]
    Witness(WalkError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Program(#[from] ProgramError),
}

#[cfg(test)]
mod tests;
