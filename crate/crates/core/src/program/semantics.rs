use std::borrow::Borrow;

use super::{Configuration, CounterProgram, Instruction};
use crate::num::CounterValue;

/// Result of executing the instruction on one line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome<'a, V> {
    /// Continue at the next line with the updated valuation.
    Next(Vec<V>),
    /// Jump to one of the listed targets with the valuation unchanged.
    Jump(&'a [usize]),
    /// A decrement would go negative, an increment overflows the value
    /// type, or a zero test failed.
    Blocked,
    /// `halt`, or a line outside the program.
    Halted,
}

/// Executes line `line` on `values`.
pub fn apply_line<'a, V: CounterValue>(
    p: &'a CounterProgram<V>,
    line: usize,
    values: &[V],
) -> StepOutcome<'a, V> {
    let Some(ins) = p.line(line) else {
        return StepOutcome::Halted;
    };
    match ins {
        Instruction::Inc { counter, amount } => match values[*counter].checked_add(amount) {
            Some(v) => {
                let mut next = values.to_vec();
                next[*counter] = v;
                StepOutcome::Next(next)
            }
            None => StepOutcome::Blocked,
        },
        Instruction::Dec { counter, amount } => match values[*counter].checked_sub(amount) {
            Some(v) => {
                let mut next = values.to_vec();
                next[*counter] = v;
                StepOutcome::Next(next)
            }
            None => StepOutcome::Blocked,
        },
        Instruction::Goto(ts) => StepOutcome::Jump(ts),
        Instruction::Skip => StepOutcome::Next(values.to_vec()),
        Instruction::ZeroTest(c) => {
            if values[*c].is_zero() {
                StepOutcome::Next(values.to_vec())
            } else {
                StepOutcome::Blocked
            }
        }
        Instruction::Halt => StepOutcome::Halted,
    }
}

/// The exact one-step successor set of a configuration, in target order.
pub fn successors<V: CounterValue>(
    p: &CounterProgram<V>,
    c: &Configuration<V>,
) -> Vec<Configuration<V>> {
    if c.values.len() != p.counters().len() {
        return Vec::new();
    }
    match apply_line(p, c.line, &c.values) {
        StepOutcome::Next(values) => vec![Configuration::new(c.line + 1, values)],
        StepOutcome::Jump(ts) => {
            let mut out: Vec<Configuration<V>> = Vec::with_capacity(ts.len());
            for &t in ts {
                if !out.iter().any(|o| o.line == t) {
                    out.push(Configuration::new(t, c.values.clone()));
                }
            }
            out
        }
        StepOutcome::Blocked | StepOutcome::Halted => Vec::new(),
    }
}

fn is_successor<V: CounterValue>(
    p: &CounterProgram<V>,
    from: &Configuration<V>,
    to: &Configuration<V>,
) -> bool {
    if from.values.len() != p.counters().len() || to.values.len() != p.counters().len() {
        return false;
    }
    match apply_line(p, from.line, &from.values) {
        StepOutcome::Next(values) => to.line == from.line + 1 && to.values == values,
        StepOutcome::Jump(ts) => ts.contains(&to.line) && to.values == from.values,
        StepOutcome::Blocked | StepOutcome::Halted => false,
    }
}

/// True iff the sequence is nonempty, every configuration covers all
/// counters, and consecutive configurations are related by one step.
pub fn validate_run<V, C, I>(p: &CounterProgram<V>, run: I) -> bool
where
    V: CounterValue,
    C: Borrow<Configuration<V>>,
    I: IntoIterator<Item = C>,
{
    let mut iter = run.into_iter();
    let Some(first) = iter.next() else {
        return false;
    };
    if first.borrow().values.len() != p.counters().len() {
        return false;
    }
    let mut prev = first;
    for next in iter {
        if !is_successor(p, prev.borrow(), next.borrow()) {
            return false;
        }
        prev = next;
    }
    true
}

/// True iff the run starts at line 1 and ends on the halt line with every
/// counter zero. Assumes the run is valid.
pub fn is_zero_terminating<V, C, I>(p: &CounterProgram<V>, run: I) -> bool
where
    V: CounterValue,
    C: Borrow<Configuration<V>>,
    I: IntoIterator<Item = C>,
{
    let mut iter = run.into_iter();
    let Some(first) = iter.next() else {
        return false;
    };
    if first.borrow().line != 1 {
        return false;
    }
    let last = iter.last().unwrap_or(first);
    let last = last.borrow();
    last.line == p.halt_line() && last.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;

    fn fig1() -> CounterProgram<u64> {
        parse_program("goto 2 or 4\nx -= 3\ngoto 1\nx += 1\nhalt\n").unwrap()
    }

    fn cfg(line: usize, x: u64) -> Configuration<u64> {
        Configuration::new(line, vec![x])
    }

    #[test]
    fn goto_branches() {
        assert_eq!(successors(&fig1(), &cfg(1, 7)), vec![cfg(2, 7), cfg(4, 7)]);
    }

    #[test]
    fn decrement_blocks_below_zero() {
        assert!(successors(&fig1(), &cfg(2, 2)).is_empty());
        assert_eq!(successors(&fig1(), &cfg(2, 3)), vec![cfg(3, 0)]);
    }

    #[test]
    fn halt_and_outside_lines_have_no_successors() {
        assert!(successors(&fig1(), &cfg(5, 8)).is_empty());
        assert!(successors(&fig1(), &cfg(9, 8)).is_empty());
        assert!(successors(&fig1(), &cfg(0, 8)).is_empty());
    }

    #[test]
    fn duplicate_targets_collapse() {
        let p = parse_program::<u64>("goto 2 or 2\nhalt").unwrap();
        assert_eq!(successors(&p, &Configuration::new(1, vec![])).len(), 1);
    }

    #[test]
    fn worked_run_validates() {
        let p = fig1();
        assert!(validate_run(&p, &[cfg(1, 7), cfg(4, 7), cfg(5, 8)]));
        assert!(!validate_run(&p, &[cfg(1, 7), cfg(5, 8)]));
        assert!(validate_run(&p, &[cfg(1, 0)]));
        assert!(!validate_run(&p, Vec::<Configuration<u64>>::new()));
    }

    #[test]
    fn zero_termination() {
        let p = parse_program::<u64>("x -= 1\nhalt").unwrap();
        let run = [cfg(1, 1), cfg(2, 0)];
        assert!(validate_run(&p, &run));
        assert!(is_zero_terminating(&p, &run));
        assert!(!is_zero_terminating(&fig1(), &[cfg(1, 7), cfg(4, 7), cfg(5, 8)]));
        assert!(!is_zero_terminating(&p, &[cfg(2, 0)]));
    }

    #[test]
    fn zero_test_instruction() {
        let p = parse_program::<u64>("zero-test x\nhalt").unwrap();
        assert_eq!(successors(&p, &cfg(1, 0)), vec![cfg(2, 0)]);
        assert!(successors(&p, &cfg(1, 1)).is_empty());
    }

    #[test]
    fn increment_overflow_blocks() {
        let p = parse_program::<u8>("x += 200\nhalt").unwrap();
        assert!(successors(&p, &Configuration::new(1, vec![100u8])).is_empty());
    }
}
