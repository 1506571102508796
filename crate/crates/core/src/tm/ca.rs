use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::machine::WordCodec;
use super::TmError;

/// A transition either adds `delta` (`zeta` is `None`) or, with a zero
/// update, requires counter `zeta` to be zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaTransition {
    pub from: usize,
    pub delta: Vec<i64>,
    pub zeta: Option<usize>,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterAutomaton {
    counters: Vec<String>,
    states: Vec<String>,
    initial: usize,
    final_state: usize,
    transitions: Vec<CaTransition>,
    outgoing: Vec<Vec<usize>>,
    codec: Option<WordCodec>,
}

impl CounterAutomaton {
    pub fn new(
        counters: Vec<String>,
        states: Vec<String>,
        initial: usize,
        final_state: usize,
        transitions: Vec<CaTransition>,
    ) -> Result<Self, TmError> {
        let bad = |m: String| Err(TmError::InvalidAutomaton(m));
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return bad(format!("duplicate state `{s}`"));
            }
        }
        for (i, c) in counters.iter().enumerate() {
            if counters[..i].contains(c) {
                return bad(format!("duplicate counter `{c}`"));
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
                return bad(format!("transition {i} has {} components", t.delta.len()));
            }
            if let Some(z) = t.zeta {
                if z >= counters.len() {
                    return bad(format!("transition {i} tests a counter out of range"));
                }
                if t.delta.iter().any(|d| *d != 0) {
                    return bad(format!("zero-test transition {i} has a nonzero update"));
                }
            }
            if t.from == final_state {
                return bad("the final state has an outgoing transition".into());
            }
            outgoing[t.from].push(i);
        }
        Ok(CounterAutomaton {
            counters,
            states,
            initial,
            final_state,
            transitions,
            outgoing,
            codec: None,
        })
    }

    /// Records the alphabet of the machine this automaton simulates, so
    /// that inputs can be given as words.
    pub fn with_codec(mut self, codec: WordCodec) -> Self {
        self.codec = Some(codec);
        self
    }

    pub fn codec(&self) -> Option<&WordCodec> {
        self.codec.as_ref()
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

    pub fn transitions(&self) -> &[CaTransition] {
        &self.transitions
    }

    pub fn outgoing(&self, state: usize) -> &[usize] {
        &self.outgoing[state]
    }

    pub fn zero_test_count(&self) -> usize {
        self.transitions.iter().filter(|t| t.zeta.is_some()).count()
    }

    /// Counter values after transition `t`, or `None` if it is disabled.
    pub fn fire(&self, t: usize, values: &[u64]) -> Option<Vec<u64>> {
        let tr = &self.transitions[t];
        if let Some(z) = tr.zeta {
            return (values[z] == 0).then(|| values.to_vec());
        }
        values
            .iter()
            .zip(&tr.delta)
            .map(|(v, d)| v.checked_add_signed(*d))
            .collect()
    }

    pub fn to_dot(&self) -> String {
        use std::fmt::Write;
        let mut out = String::from("digraph ca {\n  rankdir=LR;\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = if i == self.final_state { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  s{i} [label=\"{}\", shape={shape}];", s.replace('"', "\\\""));
        }
        let _ = writeln!(out, "  start [shape=point];\n  start -> s{};", self.initial);
        for t in &self.transitions {
            let label = match t.zeta {
                Some(z) => format!("{} = 0?", self.counters[z]),
                None => {
                    let d: Vec<String> = t.delta.iter().map(|d| d.to_string()).collect();
                    format!("({})", d.join(","))
                }
            };
            let _ = writeln!(out, "  s{} -> s{} [label=\"{label}\"];", t.from, t.to);
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let name = |i: usize| self.states[i].clone();
        serde_json::to_value(CaJson {
            dim: self.dim(),
            counters: self.counters.clone(),
            states: self.states.clone(),
            initial: name(self.initial),
            final_state: name(self.final_state),
            transitions: self
                .transitions
                .iter()
                .map(|t| CaTransitionJson {
                    from: name(t.from),
                    delta: t.delta.clone(),
                    to: name(t.to),
                    zeta: t.zeta.map(|z| z + 1),
                })
                .collect(),
            sigma: self.codec.as_ref().map(|c| c.sigma.iter().map(|x| x.to_string()).collect()),
        })
        .expect("serializable")
    }

    pub fn from_json_str(text: &str) -> Result<Self, TmError> {
        let j: CaJson = serde_json::from_str(text).map_err(|e| TmError::Json(e.to_string()))?;
        if j.dim != j.counters.len() {
            return Err(TmError::InvalidAutomaton(format!(
                "dim is {} but {} counters are named",
                j.dim,
                j.counters.len()
            )));
        }
        let index: HashMap<&str, usize> = j.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let look = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| TmError::InvalidAutomaton(format!("unknown state `{s}`")))
        };
        let mut transitions = Vec::with_capacity(j.transitions.len());
        for t in &j.transitions {
            let zeta = match t.zeta {
                None => None,
                Some(z) if z >= 1 && z <= j.dim => Some(z - 1),
                Some(z) => return Err(TmError::InvalidAutomaton(format!("zeta {z} is not in 1..={}", j.dim))),
            };
            transitions.push(CaTransition {
                from: look(&t.from)?,
                delta: t.delta.clone(),
                zeta,
                to: look(&t.to)?,
            });
        }
        let (initial, final_state) = (look(&j.initial)?, look(&j.final_state)?);
        let a = CounterAutomaton::new(j.counters, j.states.clone(), initial, final_state, transitions)?;
        Ok(match j.sigma {
            None => a,
            Some(sigma) => {
                let chars = sigma
                    .iter()
                    .map(|s| {
                        let mut it = s.chars();
                        match (it.next(), it.next()) {
                            (Some(c), None) => Ok(c),
                            _ => Err(TmError::InvalidAutomaton(format!("symbol `{s}` is not a single character"))),
                        }
                    })
                    .collect::<Result<Vec<char>, _>>()?;
                a.with_codec(WordCodec::new(chars))
            }
        })
    }
}

/// The VASS schema plus `zeta`: the 1-based tested counter, or null for an
/// update transition.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct CaTransitionJson {
    from: String,
    delta: Vec<i64>,
    to: String,
    #[serde(default)]
    zeta: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CaJson {
    dim: usize,
    counters: Vec<String>,
    states: Vec<String>,
    initial: String,
    #[serde(rename = "final")]
    final_state: String,
    transitions: Vec<CaTransitionJson>,
    /// Input alphabet of the simulated machine, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaVerdict {
    Accept,
    Reject,
    FuelExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaRun {
    pub verdict: CaVerdict,
    /// Transitions fired.
    pub steps: u64,
    pub zero_tests: u64,
    /// Largest value any counter held.
    pub max_counter: u64,
    /// Visited `(state, values)` pairs, starting with the initial one.
    pub trace: Vec<(usize, Vec<u64>)>,
}

/// Runs a deterministic automaton from `(initial, input)`. Accepts on
/// reaching the final state; rejects when stuck anywhere else.
pub fn ca_run(a: &CounterAutomaton, input: &[u64], fuel: u64) -> Result<CaRun, TmError> {
    if input.len() != a.dim() {
        return Err(TmError::Arity {
            expected: a.dim(),
            got: input.len(),
        });
    }
    let (mut q, mut v) = (a.initial, input.to_vec());
    let mut run = CaRun {
        verdict: CaVerdict::Reject,
        steps: 0,
        zero_tests: 0,
        max_counter: v.iter().copied().max().unwrap_or(0),
        trace: vec![(q, v.clone())],
    };
    loop {
        if q == a.final_state {
            run.verdict = CaVerdict::Accept;
            return Ok(run);
        }
        let mut enabled = a.outgoing[q].iter().filter_map(|&t| a.fire(t, &v).map(|nv| (t, nv)));
        let Some((t, next)) = enabled.next() else {
            run.verdict = CaVerdict::Reject;
            return Ok(run);
        };
        if enabled.next().is_some() {
            return Err(TmError::Nondeterministic {
                state: a.states[q].clone(),
                step: run.steps,
            });
        }
        if run.steps == fuel {
            run.verdict = CaVerdict::FuelExceeded;
            return Ok(run);
        }
        run.steps += 1;
        if a.transitions[t].zeta.is_some() {
            run.zero_tests += 1;
        }
        q = a.transitions[t].to;
        v = next;
        run.max_counter = run.max_counter.max(v.iter().copied().max().unwrap_or(0));
        run.trace.push((q, v.clone()));
    }
}
