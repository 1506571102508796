use crate::num::CounterValue;
use crate::program::{CounterProgram, Instruction};
use crate::vass::Vass;

/// One outgoing edge of a location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub to: usize,
    /// Sparse update: (counter, delta), decrements first.
    pub updates: Vec<(usize, i64)>,
    /// The edge is enabled only if this counter is zero.
    pub zero_test: Option<usize>,
}

/// A transition system with 1-based locations, the common input of the
/// search routines. Built from a counter program (locations are lines, the
/// target is the halt line) or from a VASS (location `i + 1` is state `i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct System {
    counters: Vec<String>,
    edges: Vec<Vec<Edge>>,
    start: usize,
    target: usize,
}

impl System {
    pub fn new(counters: Vec<String>, edges: Vec<Vec<Edge>>, start: usize, target: usize) -> Self {
        assert!(start >= 1 && start <= edges.len() && target >= 1 && target <= edges.len());
        System {
            counters,
            edges,
            start,
            target,
        }
    }

    pub fn dim(&self) -> usize {
        self.counters.len()
    }

    pub fn counters(&self) -> &[String] {
        &self.counters
    }

    pub fn counter_index(&self, name: &str) -> Option<usize> {
        self.counters.iter().position(|c| c == name)
    }

    pub fn locations(&self) -> usize {
        self.edges.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn edges(&self, loc: usize) -> &[Edge] {
        &self.edges[loc - 1]
    }

    /// Largest absolute update constant.
    pub fn max_delta(&self) -> u64 {
        self.edges
            .iter()
            .flatten()
            .flat_map(|e| e.updates.iter().map(|(_, d)| d.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    /// For every location, the counters that no path from it can decrement,
    /// or `None` if the target cannot be reached from it at all. A state
    /// at such a location with one of these counters positive can never
    /// reach `(target, 0)`.
    pub fn frozen_counters(&self) -> Vec<Option<Vec<usize>>> {
        let n = self.edges.len();
        let dim = self.dim();
        let mut dec = vec![vec![false; dim]; n];
        let mut live = vec![false; n];
        live[self.target - 1] = true;
        for (l, es) in self.edges.iter().enumerate() {
            for e in es {
                for &(c, d) in &e.updates {
                    if d < 0 {
                        dec[l][c] = true;
                    }
                }
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for l in (0..n).rev() {
                for e in &self.edges[l] {
                    let t = e.to - 1;
                    if live[t] && !live[l] {
                        live[l] = true;
                        changed = true;
                    }
                    for c in 0..dim {
                        if dec[t][c] && !dec[l][c] {
                            dec[l][c] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        (0..n)
            .map(|l| live[l].then(|| (0..dim).filter(|&c| !dec[l][c]).collect()))
            .collect()
    }

    /// Applies `edge` to `values` into `out`. `Err(true)` signals an
    /// overflow of `V`, `Err(false)` an ordinary block.
    #[inline]
    pub fn fire<V: CounterValue>(edge: &Edge, values: &[V], out: &mut Vec<V>) -> Result<(), bool> {
        if let Some(z) = edge.zero_test {
            if !values[z].is_zero() {
                return Err(false);
            }
        }
        out.clear();
        out.extend_from_slice(values);
        for &(c, d) in &edge.updates {
            let mag = match V::from_u64(d.unsigned_abs()) {
                Some(m) => m,
                None if d < 0 => return Err(false),
                None => return Err(true),
            };
            out[c] = if d < 0 {
                out[c].checked_sub(&mag).ok_or(false)?
            } else {
                out[c].checked_add(&mag).ok_or(true)?
            };
        }
        Ok(())
    }
}

fn unit(counter: usize, d: i64) -> Vec<(usize, i64)> {
    if d == 0 {
        Vec::new()
    } else {
        vec![(counter, d)]
    }
}

fn as_i64<V: CounterValue>(v: V) -> i64 {
    i64::try_from(v.widen()).expect("update constant fits i64")
}

impl<V: CounterValue> From<&CounterProgram<V>> for System {
    fn from(p: &CounterProgram<V>) -> Self {
        let edges = p
            .lines()
            .iter()
            .enumerate()
            .map(|(i, ins)| {
                let next = i + 2;
                let plain = |to: usize, updates: Vec<(usize, i64)>| Edge {
                    to,
                    updates,
                    zero_test: None,
                };
                match ins {
                    Instruction::Inc { counter, amount } => vec![plain(next, unit(*counter, as_i64(*amount)))],
                    Instruction::Dec { counter, amount } => vec![plain(next, unit(*counter, -as_i64(*amount)))],
                    Instruction::Goto(ts) => {
                        let mut out: Vec<Edge> = Vec::with_capacity(ts.len());
                        for &t in ts {
                            if !out.iter().any(|e| e.to == t) {
                                out.push(plain(t, Vec::new()));
                            }
                        }
                        out
                    }
                    Instruction::Skip => vec![plain(next, Vec::new())],
                    Instruction::Halt => Vec::new(),
                    Instruction::ZeroTest(c) => vec![Edge {
                        to: next,
                        updates: Vec::new(),
                        zero_test: Some(*c),
                    }],
                }
            })
            .collect();
        System::new(p.counters().iter().cloned().collect(), edges, 1, p.len())
    }
}

impl From<&Vass> for System {
    fn from(v: &Vass) -> Self {
        let edges = (0..v.states().len())
            .map(|q| {
                v.outgoing(q)
                    .iter()
                    .map(|&t| {
                        let tr = &v.transitions()[t];
                        let mut updates: Vec<(usize, i64)> = tr
                            .delta
                            .iter()
                            .enumerate()
                            .filter(|(_, d)| **d != 0)
                            .map(|(c, d)| (c, *d))
                            .collect();
                        updates.sort_by_key(|(_, d)| *d > 0);
                        Edge {
                            to: tr.to + 1,
                            updates,
                            zero_test: None,
                        }
                    })
                    .collect()
            })
            .collect();
        System::new(v.counters().to_vec(), edges, v.initial() + 1, v.final_state() + 1)
    }
}
