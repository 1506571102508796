//! Vector addition systems with states.
//!
//! Locations are indices into `states`; transitions carry integer update
//! vectors over the named counters. The final state has no outgoing
//! transitions.

use std::collections::HashMap;
use std::fmt::Write;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::num::CounterValue;
use crate::program::{CounterProgram, Instruction, ProgramError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub delta: Vec<i64>,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vass {
    counters: Vec<String>,
    states: Vec<String>,
    initial: usize,
    final_state: usize,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
}

impl Vass {
    pub fn new(
        counters: Vec<String>,
        states: Vec<String>,
        initial: usize,
        final_state: usize,
        transitions: Vec<Transition>,
    ) -> Result<Self, ProgramError> {
        let bad = |m: String| Err(ProgramError::InvalidVass(m));
        let mut seen = IndexSet::new();
        for s in &states {
            if !seen.insert(s) {
                return bad(format!("duplicate state `{s}`"));
            }
        }
        let mut names = IndexSet::new();
        for c in &counters {
            if !names.insert(c) {
                return Err(ProgramError::DuplicateCounter(c.clone()));
            }
        }
        if initial >= states.len() || final_state >= states.len() {
            return bad("initial or final state out of range".into());
        }
        let mut outgoing = vec![Vec::new(); states.len()];
        for (i, t) in transitions.iter().enumerate() {
            if t.from >= states.len() || t.to >= states.len() {
                return bad(format!("transition {i} refers to an unknown state"));
            }
            if t.delta.len() != counters.len() {
                return bad(format!(
                    "transition {i} has {} components, expected {}",
                    t.delta.len(),
                    counters.len()
                ));
            }
            if t.from == final_state {
                return bad("the final state has an outgoing transition".into());
            }
            outgoing[t.from].push(i);
        }
        Ok(Vass {
            counters,
            states,
            initial,
            final_state,
            transitions,
            outgoing,
        })
    }

    pub fn dim(&self) -> usize {
        self.counters.len()
    }

    pub fn counters(&self) -> &[String] {
        &self.counters
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn final_state(&self) -> usize {
        self.final_state
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Indices of the transitions leaving `state`, in declaration order.
    pub fn outgoing(&self, state: usize) -> &[usize] {
        &self.outgoing[state]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Applies transition `t` to `values`; `None` if a counter would go
    /// negative or overflow.
    pub fn fire<V: CounterValue>(&self, t: usize, values: &[V]) -> Option<Vec<V>> {
        let tr = &self.transitions[t];
        values
            .iter()
            .zip(&tr.delta)
            .map(|(v, d)| v.offset(*d))
            .collect()
    }

    /// All `(state, values)` successors in transition order.
    pub fn successors<V: CounterValue>(&self, state: usize, values: &[V]) -> Vec<(usize, Vec<V>)> {
        self.outgoing[state]
            .iter()
            .filter_map(|&t| self.fire(t, values).map(|v| (self.transitions[t].to, v)))
            .collect()
    }

    pub fn max_abs_delta(&self) -> u64 {
        self.transitions
            .iter()
            .flat_map(|t| t.delta.iter().map(|d| d.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(VassJson::from(self)).expect("serializable")
    }

    pub fn from_json_str(text: &str) -> Result<Self, ProgramError> {
        let j: VassJson =
            serde_json::from_str(text).map_err(|e| ProgramError::InvalidVass(e.to_string()))?;
        j.try_into()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph vass {\n  rankdir=LR;\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = if i == self.final_state { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  s{i} [label=\"{}\", shape={shape}];", s.replace('"', "\\\""));
        }
        let _ = writeln!(out, "  start [shape=point];\n  start -> s{};", self.initial);
        for t in &self.transitions {
            let label: Vec<String> = t.delta.iter().map(|d| d.to_string()).collect();
            let _ = writeln!(out, "  s{} -> s{} [label=\"({})\"];", t.from, t.to, label.join(","));
        }
        out.push_str("}\n");
        out
    }
}

/// A state name in JSON. Numbers are accepted and read as their decimal
/// spelling.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum StateName {
    Name(String),
    Number(u64),
}

impl StateName {
    pub(crate) fn into_string(self) -> String {
        match self {
            StateName::Name(s) => s,
            StateName::Number(n) => n.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub(crate) struct TransitionJson {
    pub from: StateName,
    pub delta: Vec<i64>,
    pub to: StateName,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub(crate) struct VassJson {
    pub dim: usize,
    pub counters: Vec<String>,
    pub states: Vec<StateName>,
    pub initial: StateName,
    #[serde(rename = "final")]
    pub final_state: StateName,
    pub transitions: Vec<TransitionJson>,
}

impl From<&Vass> for VassJson {
    fn from(v: &Vass) -> Self {
        let name = |i: usize| StateName::Name(v.states[i].clone());
        VassJson {
            dim: v.dim(),
            counters: v.counters.clone(),
            states: v.states.iter().cloned().map(StateName::Name).collect(),
            initial: name(v.initial),
            final_state: name(v.final_state),
            transitions: v
                .transitions
                .iter()
                .map(|t| TransitionJson {
                    from: name(t.from),
                    delta: t.delta.clone(),
                    to: name(t.to),
                })
                .collect(),
        }
    }
}

impl TryFrom<VassJson> for Vass {
    type Error = ProgramError;

    fn try_from(j: VassJson) -> Result<Self, ProgramError> {
        if j.dim != j.counters.len() {
            return Err(ProgramError::InvalidVass(format!(
                "dim is {} but {} counters are named",
                j.dim,
                j.counters.len()
            )));
        }
        let states: Vec<String> = j.states.into_iter().map(StateName::into_string).collect();
        let index: HashMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let look = |s: StateName| -> Result<usize, ProgramError> {
            let s = s.into_string();
            index
                .get(s.as_str())
                .copied()
                .ok_or_else(|| ProgramError::InvalidVass(format!("unknown state `{s}`")))
        };
        let initial = look(j.initial)?;
        let final_state = look(j.final_state)?;
        let transitions = j
            .transitions
            .into_iter()
            .map(|t| {
                Ok(Transition {
                    from: look(t.from)?,
                    delta: t.delta,
                    to: look(t.to)?,
                })
            })
            .collect::<Result<Vec<_>, ProgramError>>()?;
        drop(index);
        Vass::new(j.counters, states, initial, final_state, transitions)
    }
}

fn amount_i64<V: CounterValue>(v: V) -> i64 {
    i64::try_from(v.widen()).expect("update constant fits i64")
}

/// Reads a program as a VASS whose states are its line numbers.
pub fn program_to_vass<V: CounterValue>(p: &CounterProgram<V>) -> Result<Vass, ProgramError> {
    let d = p.counters().len();
    let mut transitions = Vec::new();
    let unit = |c: usize, k: i64| {
        let mut delta = vec![0i64; d];
        delta[c] = k;
        delta
    };
    for (i, ins) in p.lines().iter().enumerate() {
        let from = i;
        match ins {
            Instruction::Inc { counter, amount } => transitions.push(Transition {
                from,
                delta: unit(*counter, amount_i64(*amount)),
                to: from + 1,
            }),
            Instruction::Dec { counter, amount } => transitions.push(Transition {
                from,
                delta: unit(*counter, -amount_i64(*amount)),
                to: from + 1,
            }),
            Instruction::Goto(ts) => {
                for &t in ts {
                    transitions.push(Transition {
                        from,
                        delta: vec![0; d],
                        to: t - 1,
                    });
                }
            }
            Instruction::Skip => transitions.push(Transition {
                from,
                delta: vec![0; d],
                to: from + 1,
            }),
            Instruction::Halt => {}
            Instruction::ZeroTest(_) => return Err(ProgramError::ZeroTestInVass { line: i + 1 }),
        }
    }
    Vass::new(
        p.counters().iter().cloned().collect(),
        (1..=p.len()).map(|l| l.to_string()).collect(),
        0,
        p.len() - 1,
        transitions,
    )
}

/// Serializes a VASS as a counter program.
///
/// Every state gets an entry line `goto b1 or ... or bk` over the blocks of
/// its outgoing transitions; a block performs the decrements, then the
/// increments, then jumps to the entry line of the target state. The
/// initial state's entry is line 1 and the final state's entry is the halt
/// line. Returns the program and the entry line of each state.
pub fn vass_to_program<V: CounterValue>(v: &Vass) -> Result<(CounterProgram<V>, Vec<usize>), ProgramError> {
    let n = v.states.len();
    let mut order: Vec<usize> = vec![v.initial];
    order.extend((0..n).filter(|&q| q != v.initial && q != v.final_state));

    let block_len = |t: &Transition| t.delta.iter().filter(|d| **d != 0).count() + 1;
    let mut entry = vec![0usize; n];
    let mut next = 1;
    for &q in &order {
        entry[q] = next;
        next += 1 + v.outgoing[q].iter().map(|&t| block_len(&v.transitions[t])).sum::<usize>();
    }
    entry[v.final_state] = next;

    let val = |k: i64| {
        V::from_u64_checked(k.unsigned_abs())
            .ok_or_else(|| ProgramError::InvalidVass(format!("update {k} does not fit the value type")))
    };
    let mut lines = Vec::with_capacity(next);
    for &q in &order {
        let outs = &v.outgoing[q];
        if outs.is_empty() {
            lines.push(Instruction::Goto(vec![entry[q]]));
            continue;
        }
        let mut starts = Vec::with_capacity(outs.len());
        let mut at = entry[q] + 1;
        for &t in outs {
            starts.push(at);
            at += block_len(&v.transitions[t]);
        }
        lines.push(Instruction::Goto(starts));
        for &t in outs {
            let tr = &v.transitions[t];
            for (c, &k) in tr.delta.iter().enumerate() {
                if k < 0 {
                    lines.push(Instruction::Dec { counter: c, amount: val(k)? });
                }
            }
            for (c, &k) in tr.delta.iter().enumerate() {
                if k > 0 {
                    lines.push(Instruction::Inc { counter: c, amount: val(k)? });
                }
            }
            lines.push(Instruction::Goto(vec![entry[tr.to]]));
        }
    }
    lines.push(Instruction::Halt);
    let p = CounterProgram::new(v.counters.iter().cloned().collect(), lines)?;
    Ok((p, entry))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;

    fn fig1() -> CounterProgram<u64> {
        parse_program("goto 2 or 4\nx -= 3\ngoto 1\nx += 1\nhalt").unwrap()
    }

    #[test]
    fn example_program_as_vass() {
        let v = program_to_vass(&fig1()).unwrap();
        assert_eq!(v.states().len(), 5);
        assert_eq!(v.dim(), 1);
        let ts: Vec<(String, i64, String)> = v
            .transitions()
            .iter()
            .map(|t| (v.states()[t.from].clone(), t.delta[0], v.states()[t.to].clone()))
            .collect();
        let want: Vec<(String, i64, String)> = [(1, 0, 2), (1, 0, 4), (2, -3, 3), (3, 0, 1), (4, 1, 5)]
            .iter()
            .map(|(a, d, b)| (a.to_string(), *d, b.to_string()))
            .collect();
        assert_eq!(ts, want);
        assert_eq!(v.states()[v.initial()], "1");
        assert_eq!(v.states()[v.final_state()], "5");
    }

    #[test]
    fn zero_test_rejected() {
        let p = parse_program::<u64>("zero-test x\nhalt").unwrap();
        assert_eq!(program_to_vass(&p), Err(ProgramError::ZeroTestInVass { line: 1 }));
    }

    #[test]
    fn final_state_must_be_a_sink() {
        let e = Vass::new(
            vec!["x".into()],
            vec!["a".into(), "b".into()],
            0,
            1,
            vec![Transition {
                from: 1,
                delta: vec![1],
                to: 0,
            }],
        );
        assert!(e.is_err());
    }

    #[test]
    fn json_round_trip_and_numeric_states() {
        let v = program_to_vass(&fig1()).unwrap();
        let text = v.to_json().to_string();
        assert_eq!(Vass::from_json_str(&text).unwrap(), v);
        let numeric = r#"{"dim":1,"counters":["x"],"states":[1,2],"initial":1,"final":2,
            "transitions":[{"from":1,"delta":[-1],"to":2}]}"#;
        let w = Vass::from_json_str(numeric).unwrap();
        assert_eq!(w.successors(0, &[1u64]), vec![(1, vec![0])]);
        assert!(w.successors(0, &[0u64]).is_empty());
        assert!(Vass::from_json_str(r#"{"dim":2,"counters":["x"],"states":["a"],"initial":"a","final":"a","transitions":[]}"#).is_err());
    }

    #[test]
    fn serialized_program_has_entry_lines() {
        let v = program_to_vass(&fig1()).unwrap();
        let (p, entry) = vass_to_program::<u64>(&v).unwrap();
        assert_eq!(entry[0], 1);
        assert_eq!(entry[4], p.len());
        assert!(v.to_dot().contains("doublecircle"));
    }

    #[test]
    fn dead_states_loop() {
        let v = Vass::new(
            vec!["x".into()],
            vec!["a".into(), "dead".into(), "f".into()],
            0,
            2,
            vec![
                Transition {
                    from: 0,
                    delta: vec![-2],
                    to: 1,
                },
                Transition {
                    from: 0,
                    delta: vec![0],
                    to: 2,
                },
            ],
        )
        .unwrap();
        let (p, entry) = vass_to_program::<u64>(&v).unwrap();
        assert_eq!(p.line(entry[1]), Some(&Instruction::Goto(vec![entry[1]])));
    }
}
