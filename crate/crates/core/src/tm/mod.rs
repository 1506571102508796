//! Turing machines, their simulation by 3-counter automata, and the
//! conversion of counter automata into VASS with bounded zero tests.

mod ca;
mod compile;
mod machine;
mod to_vass;

use thiserror::Error;

pub use ca::{ca_run, CaRun, CaTransition, CaVerdict, CounterAutomaton};
pub use compile::tm_to_ca;
pub use machine::{denum, initial_vector, num, tm_run, Action, Move, Rule, TmOutcome, TmVerdict, TuringMachine, WordCodec};
pub use to_vass::{ca_to_vass, CaVass, CaVassManifest};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TmError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("only one-tape machines are supported, got {0} tapes")]
    MultiTape(usize),
    #[error("invalid counter automaton: {0}")]
    InvalidAutomaton(String),
    #[error("symbol `{0}` is not in the input alphabet")]
    Symbol(char),
    #[error("{0} is not the code of a word")]
    NotCodeword(u64),
    #[error("value does not fit in 64 bits")]
    Overflow,
    #[error("expected {expected} input values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("value {value} exceeds the bound {n}")]
    AboveBound { value: u64, n: u64 },
    #[error("two transitions enabled in state `{state}` after {step} steps")]
    Nondeterministic { state: String, step: u64 },
}

/// The example machines shipped with the crate, as `(name, JSON)`.
pub const CORPUS: [(&str, &str); 3] = [
    ("even", include_str!("../../corpus/even.tm")),
    ("contains-b", include_str!("../../corpus/contains_b.tm")),
    ("unary-succ", include_str!("../../corpus/unary_succ.tm")),
];

#[cfg(test)]
mod tests;
