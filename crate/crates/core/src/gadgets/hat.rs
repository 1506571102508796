//! Hat twins: every bounded counter `v` gets a twin `v^` with
//! `v + v^ = N` maintained by mirroring each update.

use indexmap::{IndexMap, IndexSet};

use crate::num::CounterValue;
use crate::program::{CounterProgram, Instruction, ProgramError};

pub const HAT_SUFFIX: &str = "^";

pub fn hat_name(v: &str) -> String {
    format!("{v}{HAT_SUFFIX}")
}

/// A symmetric counter-to-twin map.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HatMap {
    twin: IndexMap<String, String>,
    primary: IndexSet<String>,
}

impl HatMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Hats for every name in `bounded`, named by suffixing.
    pub fn for_counters<S: AsRef<str>>(bounded: impl IntoIterator<Item = S>) -> Self {
        let mut m = HatMap::new();
        for v in bounded {
            m.insert(v.as_ref());
        }
        m
    }

    pub fn insert(&mut self, v: &str) {
        if self.twin.contains_key(v) {
            return;
        }
        let h = hat_name(v);
        self.twin.insert(v.to_string(), h.clone());
        self.twin.insert(h, v.to_string());
        self.primary.insert(v.to_string());
    }

    pub fn twin(&self, v: &str) -> Option<&str> {
        self.twin.get(v).map(String::as_str)
    }

    pub fn is_primary(&self, v: &str) -> bool {
        self.primary.contains(v)
    }

    /// Bounded counters, without their hats, in insertion order.
    pub fn bounded(&self) -> impl Iterator<Item = &str> {
        self.primary.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.primary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primary.is_empty()
    }
}

/// Mirrors every update of a bounded counter on its hat. Returns the new
/// program and the new line number of every old line (plus one entry for
/// index 0, unused).
pub fn hat_expand_with_map<V: CounterValue>(
    p: &CounterProgram<V>,
    hats: &HatMap,
) -> Result<(CounterProgram<V>, Vec<usize>), ProgramError> {
    if let Some(c) = p.counters().iter().find(|c| !hats.is_primary(c) && hats.twin(c).is_some()) {
        return Err(ProgramError::NameCollision(c.clone()));
    }
    let mut counters = p.counters().clone();
    let mut twin_idx: Vec<Option<usize>> = Vec::with_capacity(counters.len());
    for c in p.counters() {
        twin_idx.push(if hats.is_primary(c) {
            Some(counters.insert_full(hats.twin(c).expect("primary has a twin").to_string()).0)
        } else {
            None
        });
    }
    let mirrored = |ins: &Instruction<V>| match ins {
        Instruction::Inc { counter, amount } => twin_idx[*counter].map(|h| Instruction::Dec {
            counter: h,
            amount: *amount,
        }),
        Instruction::Dec { counter, amount } => twin_idx[*counter].map(|h| Instruction::Inc {
            counter: h,
            amount: *amount,
        }),
        _ => None,
    };
    let mut map = vec![0usize; p.len() + 1];
    let mut next = 1;
    for (i, ins) in p.lines().iter().enumerate() {
        map[i + 1] = next;
        next += if mirrored(ins).is_some() { 2 } else { 1 };
    }
    let mut lines = Vec::with_capacity(next - 1);
    for ins in p.lines() {
        let m = mirrored(ins);
        lines.push(match ins {
            Instruction::Goto(ts) => Instruction::Goto(ts.iter().map(|t| map[*t]).collect()),
            other => other.clone(),
        });
        if let Some(m) = m {
            lines.push(m);
        }
    }
    Ok((CounterProgram::new(counters, lines)?, map))
}

/// Mirrors every update of a counter in `bounded` on its hat twin.
pub fn hat_expand<V: CounterValue, S: AsRef<str>>(
    p: &CounterProgram<V>,
    bounded: &[S],
) -> Result<CounterProgram<V>, ProgramError> {
    let hats = HatMap::for_counters(bounded.iter().map(|s| s.as_ref()));
    hat_expand_with_map(p, &hats).map(|(p, _)| p)
}
