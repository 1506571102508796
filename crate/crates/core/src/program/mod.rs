//! Counter programs: numbered instruction lists over named counters.
//!
//! Lines are 1-based. The last line is always `halt` and `halt` occurs
//! nowhere else. `zero-test` instructions are only meaningful for counter
//! automata; operations with a VASS-only contract reject them.

mod compose;
mod dot;
mod parse;
mod semantics;

use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::CounterValue;

pub use compose::{alt, looped, seq, seq_all, substitute};
pub use dot::program_to_dot;
pub use parse::{parse_program, render_program};
pub use semantics::{apply_line, is_zero_terminating, successors, validate_run, StepOutcome};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: counter `{name}` is not declared")]
    UndeclaredCounter { line: usize, name: String },
    #[error("counter `{0}` declared twice")]
    DuplicateCounter(String),
    #[error("line {line}: goto target {target} is out of range 1..={len}")]
    TargetOutOfRange {
        line: usize,
        target: usize,
        len: usize,
    },
    #[error("line {line}: goto needs at least one target")]
    EmptyGoto { line: usize },
    #[error("program must end with halt")]
    MissingHalt,
    #[error("line {line}: halt may only appear as the last line")]
    MisplacedHalt { line: usize },
    #[error("line {line}: counter index {index} out of range")]
    BadCounterIndex { line: usize, index: usize },
    #[error("cannot substitute line {line}: {reason}")]
    Substitution { line: usize, reason: String },
    #[error("line {line}: zero-test is not allowed in a VASS")]
    ZeroTestInVass { line: usize },
    #[error("counter `{0}` already exists")]
    NameCollision(String),
    #[error("invalid VASS: {0}")]
    InvalidVass(String),
}

/// One instruction. Counters are indices into the owning program's
/// counter set; goto targets are 1-based line numbers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Instruction<V> {
    Inc { counter: usize, amount: V },
    Dec { counter: usize, amount: V },
    Goto(Vec<usize>),
    Skip,
    Halt,
    ZeroTest(usize),
}

impl<V> Instruction<V> {
    pub fn counter(&self) -> Option<usize> {
        match self {
            Instruction::Inc { counter, .. }
            | Instruction::Dec { counter, .. }
            | Instruction::ZeroTest(counter) => Some(*counter),
            _ => None,
        }
    }

    fn map_counter(self, f: impl Fn(usize) -> usize) -> Self {
        match self {
            Instruction::Inc { counter, amount } => Instruction::Inc {
                counter: f(counter),
                amount,
            },
            Instruction::Dec { counter, amount } => Instruction::Dec {
                counter: f(counter),
                amount,
            },
            Instruction::ZeroTest(c) => Instruction::ZeroTest(f(c)),
            other => other,
        }
    }

    fn map_targets(self, f: impl Fn(usize) -> usize) -> Self {
        match self {
            Instruction::Goto(ts) => Instruction::Goto(ts.into_iter().map(f).collect()),
            other => other,
        }
    }
}

/// A structurally valid counter program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterProgram<V> {
    counters: IndexSet<String>,
    lines: Vec<Instruction<V>>,
}

impl<V: CounterValue> CounterProgram<V> {
    /// Builds a program, checking every structural invariant.
    pub fn new(
        counters: IndexSet<String>,
        lines: Vec<Instruction<V>>,
    ) -> Result<Self, ProgramError> {
        let p = CounterProgram { counters, lines };
        p.check()?;
        Ok(p)
    }

    /// The one-line program `halt`.
    pub fn halt() -> Self {
        CounterProgram {
            counters: IndexSet::new(),
            lines: vec![Instruction::Halt],
        }
    }

    fn check(&self) -> Result<(), ProgramError> {
        let len = self.lines.len();
        match self.lines.last() {
            Some(Instruction::Halt) => {}
            _ => return Err(ProgramError::MissingHalt),
        }
        for (i, ins) in self.lines.iter().enumerate() {
            let line = i + 1;
            if matches!(ins, Instruction::Halt) && line != len {
                return Err(ProgramError::MisplacedHalt { line });
            }
            if let Some(c) = ins.counter() {
                if c >= self.counters.len() {
                    return Err(ProgramError::BadCounterIndex { line, index: c });
                }
            }
            if let Instruction::Goto(ts) = ins {
                if ts.is_empty() {
                    return Err(ProgramError::EmptyGoto { line });
                }
                if let Some(&target) = ts.iter().find(|t| **t == 0 || **t > len) {
                    return Err(ProgramError::TargetOutOfRange { line, target, len });
                }
            }
        }
        Ok(())
    }

    pub fn counters(&self) -> &IndexSet<String> {
        &self.counters
    }

    pub fn counter_index(&self, name: &str) -> Option<usize> {
        self.counters.get_index_of(name)
    }

    pub fn counter_name(&self, index: usize) -> &str {
        &self.counters[index]
    }

    pub fn lines(&self) -> &[Instruction<V>] {
        &self.lines
    }

    /// Instruction at a 1-based line number.
    pub fn line(&self, line: usize) -> Option<&Instruction<V>> {
        line.checked_sub(1).and_then(|i| self.lines.get(i))
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn halt_line(&self) -> usize {
        self.lines.len()
    }

    pub fn has_zero_tests(&self) -> bool {
        self.lines.iter().any(|i| matches!(i, Instruction::ZeroTest(_)))
    }

    /// Reorders the counter set so that `order` comes first; remaining
    /// counters keep their relative order. Names in `order` that the program
    /// does not use are declared as well.
    pub fn with_counter_order<S: AsRef<str>>(&self, order: &[S]) -> Self {
        let mut counters: IndexSet<String> = order.iter().map(|s| s.as_ref().to_string()).collect();
        for c in &self.counters {
            counters.insert(c.clone());
        }
        let remap: Vec<usize> = self
            .counters
            .iter()
            .map(|c| counters.get_index_of(c).expect("present"))
            .collect();
        let lines = self
            .lines
            .iter()
            .cloned()
            .map(|i| i.map_counter(|c| remap[c]))
            .collect();
        CounterProgram { counters, lines }
    }

    /// A valuation with every counter zero.
    pub fn zero_valuation(&self) -> Vec<V> {
        vec![V::zero(); self.counters.len()]
    }

    /// Builds a valuation from name/value pairs; missing counters are zero.
    pub fn valuation(&self, values: &[(&str, V)]) -> Result<Vec<V>, ProgramError> {
        let mut v = self.zero_valuation();
        for (name, val) in values {
            let i = self
                .counter_index(name)
                .ok_or_else(|| ProgramError::UndeclaredCounter {
                    line: 0,
                    name: name.to_string(),
                })?;
            v[i] = *val;
        }
        Ok(v)
    }

    pub fn map_values<W: CounterValue>(&self, f: impl Fn(V) -> Option<W>) -> Option<CounterProgram<W>> {
        let lines = self
            .lines
            .iter()
            .map(|i| {
                Some(match i {
                    Instruction::Inc { counter, amount } => Instruction::Inc {
                        counter: *counter,
                        amount: f(*amount)?,
                    },
                    Instruction::Dec { counter, amount } => Instruction::Dec {
                        counter: *counter,
                        amount: f(*amount)?,
                    },
                    Instruction::Goto(ts) => Instruction::Goto(ts.clone()),
                    Instruction::Skip => Instruction::Skip,
                    Instruction::Halt => Instruction::Halt,
                    Instruction::ZeroTest(c) => Instruction::ZeroTest(*c),
                })
            })
            .collect::<Option<Vec<_>>>()?;
        Some(CounterProgram {
            counters: self.counters.clone(),
            lines,
        })
    }

    /// Converts the value type, e.g. from the `u64` a program was parsed
    /// with into a narrower search type.
    pub fn convert<W: CounterValue>(&self) -> Option<CounterProgram<W>> {
        self.map_values(|v| W::from_u128(v.widen()))
    }

    /// Largest constant in any update instruction.
    pub fn max_constant(&self) -> u128 {
        self.lines
            .iter()
            .filter_map(|i| match i {
                Instruction::Inc { amount, .. } | Instruction::Dec { amount, .. } => Some(amount.widen()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }
}

/// Incremental construction of programs from counter names.
///
/// `build` appends the final `halt`. Goto targets are absolute 1-based
/// line numbers of the finished program.
#[derive(Clone, Debug)]
pub struct ProgramBuilder<V> {
    counters: IndexSet<String>,
    lines: Vec<Instruction<V>>,
}

impl<V: CounterValue> Default for ProgramBuilder<V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<V: CounterValue> ProgramBuilder<V> {
    pub fn new() -> Self {
        ProgramBuilder {
            counters: IndexSet::new(),
            lines: Vec::new(),
        }
    }

    pub fn declare(mut self, name: &str) -> Self {
        self.counters.insert(name.to_string());
        self
    }

    fn id(&mut self, name: &str) -> usize {
        self.counters.insert_full(name.to_string()).0
    }

    pub fn inc(mut self, name: &str, amount: u64) -> Self {
        let counter = self.id(name);
        let amount = V::from_u64_checked(amount).expect("constant fits counter type");
        self.lines.push(Instruction::Inc { counter, amount });
        self
    }

    pub fn dec(mut self, name: &str, amount: u64) -> Self {
        let counter = self.id(name);
        let amount = V::from_u64_checked(amount).expect("constant fits counter type");
        self.lines.push(Instruction::Dec { counter, amount });
        self
    }

    pub fn goto(mut self, targets: &[usize]) -> Self {
        self.lines.push(Instruction::Goto(targets.to_vec()));
        self
    }

    pub fn skip(mut self) -> Self {
        self.lines.push(Instruction::Skip);
        self
    }

    pub fn zero_test(mut self, name: &str) -> Self {
        let c = self.id(name);
        self.lines.push(Instruction::ZeroTest(c));
        self
    }

    pub fn build(mut self) -> Result<CounterProgram<V>, ProgramError> {
        self.lines.push(Instruction::Halt);
        CounterProgram::new(self.counters, self.lines)
    }
}

/// A program location paired with a counter valuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration<V> {
    pub line: usize,
    pub values: Vec<V>,
}

impl<V: CounterValue> Configuration<V> {
    pub fn new(line: usize, values: Vec<V>) -> Self {
        Configuration { line, values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }
}

impl<V: fmt::Display> fmt::Display for Configuration<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, [", self.line)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "])")
    }
}

/// A nonempty sequence of configurations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run<V> {
    pub configs: Vec<Configuration<V>>,
}

impl<V: CounterValue> Run<V> {
    pub fn new(configs: Vec<Configuration<V>>) -> Self {
        Run { configs }
    }

    pub fn first(&self) -> Option<&Configuration<V>> {
        self.configs.first()
    }

    pub fn last(&self) -> Option<&Configuration<V>> {
        self.configs.last()
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Configuration<V>> {
        self.configs.iter()
    }

    /// JSON array of `{line, values: {name: value}}` objects.
    pub fn to_json(&self, program: &CounterProgram<V>) -> serde_json::Value {
        run_json(self.configs.iter(), |i| program.counter_name(i).to_string())
    }
}

pub(crate) fn run_json<'a, V: CounterValue>(
    configs: impl Iterator<Item = &'a Configuration<V>>,
    name: impl Fn(usize) -> String,
) -> serde_json::Value {
    let arr = configs
        .map(|c| {
            let mut vals = serde_json::Map::new();
            for (i, v) in c.values.iter().enumerate() {
                vals.insert(name(i), serde_json::json!(v.widen() as u64));
            }
            serde_json::json!({ "line": c.line, "values": vals })
        })
        .collect();
    serde_json::Value::Array(arr)
}

/// A run stored as its first configuration plus the sequence of lines
/// visited afterwards. Configurations are replayed on demand, which keeps
/// long synthesized runs cheap to hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactRun<V> {
    pub start: Configuration<V>,
    pub lines: Vec<u32>,
}

impl<V: CounterValue> CompactRun<V> {
    pub fn new(start: Configuration<V>) -> Self {
        CompactRun {
            start,
            lines: Vec::new(),
        }
    }

    /// Number of configurations.
    pub fn len(&self) -> usize {
        self.lines.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Replays the run against `program`. Replay stops early if a recorded
    /// line is not reachable from the previous configuration by executing
    /// its instruction; such a run also fails validation.
    pub fn configurations<'a>(
        &'a self,
        program: &'a CounterProgram<V>,
    ) -> impl Iterator<Item = Configuration<V>> + 'a {
        let mut current = Some(self.start.clone());
        let mut next_line = self.lines.iter();
        let mut emitted_start = false;
        std::iter::from_fn(move || {
            if !emitted_start {
                emitted_start = true;
                return current.clone();
            }
            let cur = current.as_ref()?;
            let &target = next_line.next()?;
            let next = match apply_line(program, cur.line, &cur.values) {
                StepOutcome::Next(values) => Configuration::new(target as usize, values),
                StepOutcome::Jump(_) => Configuration::new(target as usize, cur.values.clone()),
                StepOutcome::Blocked | StepOutcome::Halted => {
                    current = None;
                    return None;
                }
            };
            current = Some(next.clone());
            Some(next)
        })
    }

    pub fn to_run(&self, program: &CounterProgram<V>) -> Run<V> {
        Run::new(self.configurations(program).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halt_must_be_last_and_unique() {
        let counters = IndexSet::new();
        assert_eq!(
            CounterProgram::<u64>::new(counters.clone(), vec![Instruction::Skip]),
            Err(ProgramError::MissingHalt)
        );
        assert_eq!(
            CounterProgram::<u64>::new(counters.clone(), vec![Instruction::Halt, Instruction::Halt]),
            Err(ProgramError::MisplacedHalt { line: 1 })
        );
        assert!(CounterProgram::<u64>::new(counters, vec![Instruction::Halt]).is_ok());
    }

    #[test]
    fn goto_targets_checked() {
        let err = ProgramBuilder::<u64>::new().goto(&[7]).skip().build().unwrap_err();
        assert_eq!(
            err,
            ProgramError::TargetOutOfRange {
                line: 1,
                target: 7,
                len: 3
            }
        );
        let err = ProgramBuilder::<u64>::new().goto(&[]).build().unwrap_err();
        assert_eq!(err, ProgramError::EmptyGoto { line: 1 });
    }

    #[test]
    fn counter_reordering_keeps_semantics() {
        let p = ProgramBuilder::<u64>::new().inc("x", 1).dec("y", 2).build().unwrap();
        let q = p.with_counter_order(&["y", "z"]);
        assert_eq!(q.counters().iter().collect::<Vec<_>>(), vec!["y", "z", "x"]);
        assert_eq!(
            q.line(1),
            Some(&Instruction::Inc {
                counter: 2,
                amount: 1
            })
        );
        assert_eq!(
            q.line(2),
            Some(&Instruction::Dec {
                counter: 0,
                amount: 2
            })
        );
    }
}
