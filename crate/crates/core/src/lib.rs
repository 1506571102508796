//! Counter programs, VASS, and reductions into VASS zero-reachability.

pub mod num;
pub mod poly;
pub mod program;
pub mod vass;
pub mod engine;
pub mod gadgets;
pub mod fo;
pub mod tm;

pub use num::{CounterValue, Width};
pub use poly::Poly;
pub use program::{Configuration, CounterProgram, Instruction, ProgramBuilder, ProgramError};

/// Counter programs over `u64` values.
pub type Program = CounterProgram<u64>;
/// Configurations over `u64` values.
pub type Config = Configuration<u64>;
/// Runs over `u64` values.
pub type ProgramRun = program::Run<u64>;
