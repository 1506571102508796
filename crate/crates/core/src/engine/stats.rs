use std::borrow::Borrow;

use serde::Serialize;

use crate::num::CounterValue;
use crate::program::{Configuration, CounterProgram, Instruction};

/// What `run_stats` needs to know about a compiled program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StatsMeta {
    /// Every executed `dec` of this counter counts as one zero test.
    pub zero_test_counter: Option<usize>,
    /// (counter, hat) pairs whose sum must stay `n`.
    pub hat_pairs: Vec<(usize, usize)>,
    pub n: u64,
    /// First line of the final drain. Hat sums are not checked from here
    /// on (the drain empties hats on purpose), and zero tests here are
    /// counted separately.
    pub check_before_line: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    pub steps: usize,
    pub zero_tests: usize,
    /// Zero tests executed inside the final drain (included in `zero_tests`).
    pub drain_zero_tests: usize,
    pub max_values: Vec<u64>,
    pub hat_violations: usize,
}

fn update<V: CounterValue>(ins: &Instruction<V>) -> Option<(usize, i128)> {
    match ins {
        Instruction::Inc { counter, amount } => Some((*counter, amount.widen() as i128)),
        Instruction::Dec { counter, amount } => Some((*counter, -(amount.widen() as i128))),
        _ => None,
    }
}

/// Counts zero tests, tracks maximal values and checks the hat invariant
/// along a run. A configuration sitting between an update of a counter and
/// the compensating update of its twin is not checked.
pub fn run_stats<V, C, I>(p: &CounterProgram<V>, run: I, meta: &StatsMeta) -> RunStats
where
    V: CounterValue,
    C: Borrow<Configuration<V>>,
    I: IntoIterator<Item = C>,
{
    let dim = p.counters().len();
    let mut twin = vec![usize::MAX; dim];
    for &(a, b) in &meta.hat_pairs {
        twin[a] = b;
        twin[b] = a;
    }
    let mut stats = RunStats {
        max_values: vec![0; dim],
        ..RunStats::default()
    };
    let mut prev_line: Option<usize> = None;
    for c in run {
        let c = c.borrow();
        for (m, v) in stats.max_values.iter_mut().zip(&c.values) {
            *m = (*m).max(v.widen() as u64);
        }
        if let Some(pl) = prev_line {
            stats.steps += 1;
            if let (Some(u), Some(Instruction::Dec { counter, .. })) = (meta.zero_test_counter, p.line(pl)) {
                if *counter == u {
                    stats.zero_tests += 1;
                    if meta.check_before_line.is_some_and(|l| pl >= l) {
                        stats.drain_zero_tests += 1;
                    }
                }
            }
        }
        let checked = meta.check_before_line.is_none_or(|l| c.line < l);
        let mid_pair = match (prev_line.and_then(|l| p.line(l)).and_then(update), p.line(c.line).and_then(update)) {
            (Some((w, a)), Some((w2, b))) => twin[w] == w2 && a == -b,
            _ => false,
        };
        if checked && !mid_pair {
            for &(a, b) in &meta.hat_pairs {
                if c.values[a].widen() + c.values[b].widen() != meta.n as u128 {
                    stats.hat_violations += 1;
                    break;
                }
            }
        }
        prev_line = Some(c.line);
    }
    stats
}
