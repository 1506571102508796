use serde::Serialize;

use super::ca::CounterAutomaton;
use super::TmError;
use crate::engine::{zero_reach, ReachResult, SearchLimits, SlackPrune, System};
use crate::gadgets::{hat_name, U1, U2};
use crate::vass::{Transition, Vass};

/// A VASS simulating a counter automaton whose counters stay at most `n`
/// and whose run makes at most `tests` zero tests.
#[derive(Clone, Debug)]
pub struct CaVass {
    pub vass: Vass,
    pub n: u64,
    pub tests: u64,
    /// Position of each automaton counter and of its hat.
    pub counter_map: Vec<(usize, usize)>,
    pub u1: usize,
    pub u2: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaVassManifest {
    pub n: u64,
    pub tests: u64,
    pub counters: Vec<String>,
    pub initial: String,
}

/// Each counter `c` gets a twin `c^` with `c + c^ = n`. A zero test on `c`
/// becomes
///
/// ```text
/// loop { c += 1; c^ -= 1; u2 -= 1 }
/// loop { c -= 1; c^ += 1; u2 -= 1 }
/// u1 -= 2
/// ```
/// which keeps `u2 = n * u1` only if `c` was zero and both loops ran to the
/// end. The old final state leads to a drain: `{u1 -= 1; u2 -= n}` as long
/// as wanted, then every counter in turn. The new final state is reached
/// with all counters zero iff the automaton accepts with every test exact.
pub fn ca_to_vass(a: &CounterAutomaton, n: u64, tests: u64) -> Result<CaVass, TmError> {
    let d = a.dim();
    let dim = 2 * d + 2;
    let (u1, u2) = (2 * d, 2 * d + 1);
    let mut counters = Vec::with_capacity(dim);
    for c in a.counters() {
        counters.push(c.clone());
        counters.push(hat_name(c));
    }
    counters.extend([U1.to_string(), U2.to_string()]);
    let n_i64 = i64::try_from(n).map_err(|_| TmError::Overflow)?;

    let mut states: Vec<String> = a.states().to_vec();
    let mut transitions = Vec::new();
    let mut add = |from: usize, to: usize, ds: &[(usize, i64)]| {
        let mut delta = vec![0; dim];
        for &(c, k) in ds {
            delta[c] += k;
        }
        transitions.push(Transition { from, delta, to });
    };
    for (i, t) in a.transitions().iter().enumerate() {
        match t.zeta {
            None => {
                let ds: Vec<(usize, i64)> = t
                    .delta
                    .iter()
                    .enumerate()
                    .filter(|(_, k)| **k != 0)
                    .flat_map(|(c, &k)| [(2 * c, k), (2 * c + 1, -k)])
                    .collect();
                add(t.from, t.to, &ds);
            }
            Some(z) => {
                let (c, h) = (2 * z, 2 * z + 1);
                let up = states.len();
                states.push(format!("zt{i}/up"));
                let down = states.len();
                states.push(format!("zt{i}/down"));
                add(t.from, up, &[]);
                add(up, up, &[(c, 1), (h, -1), (u2, -1)]);
                add(up, down, &[]);
                add(down, down, &[(c, -1), (h, 1), (u2, -1)]);
                add(down, t.to, &[(u1, -2)]);
            }
        }
    }
    let burn = states.len();
    states.push("drain/tests".into());
    add(a.final_state(), burn, &[]);
    add(burn, burn, &[(u1, -1), (u2, -n_i64)]);
    let mut prev = burn;
    for (c, name) in counters.iter().enumerate().take(2 * d) {
        let s = states.len();
        states.push(format!("drain/{name}"));
        add(prev, s, &[]);
        add(s, s, &[(c, -1)]);
        prev = s;
    }
    let end = states.len();
    states.push("end".into());
    add(prev, end, &[]);

    let vass = Vass::new(counters, states, a.initial(), end, transitions).map_err(|e| TmError::InvalidAutomaton(e.to_string()))?;
    Ok(CaVass {
        vass,
        n,
        tests,
        counter_map: (0..d).map(|c| (2 * c, 2 * c + 1)).collect(),
        u1,
        u2,
    })
}

impl CaVass {
    /// `(v, n - v, ..., u1 = 2 * tests, u2 = 2 * tests * n)`.
    pub fn initial(&self, input: &[u64]) -> Result<Vec<u64>, TmError> {
        if input.len() != self.counter_map.len() {
            return Err(TmError::Arity {
                expected: self.counter_map.len(),
                got: input.len(),
            });
        }
        let mut out = vec![0; self.vass.dim()];
        for (&(c, h), &v) in self.counter_map.iter().zip(input) {
            if v > self.n {
                return Err(TmError::AboveBound { value: v, n: self.n });
            }
            out[c] = v;
            out[h] = self.n - v;
        }
        let u1 = self.tests.checked_mul(2).ok_or(TmError::Overflow)?;
        out[self.u1] = u1;
        out[self.u2] = u1.checked_mul(self.n).ok_or(TmError::Overflow)?;
        Ok(out)
    }

    pub fn manifest(&self) -> CaVassManifest {
        let c = self.vass.counters();
        let mut parts: Vec<String> = self
            .counter_map
            .iter()
            .flat_map(|&(v, h)| [format!("{}=v{}", c[v], v / 2 + 1), format!("{}=N-v{}", c[h], v / 2 + 1)])
            .collect();
        parts.push(format!("{}=2n", c[self.u1]));
        parts.push(format!("{}=2nN", c[self.u2]));
        CaVassManifest {
            n: self.n,
            tests: self.tests,
            counters: c.to_vec(),
            initial: parts.join(", "),
        }
    }

    /// Search limits with the slack pruning that is sound for this VASS.
    pub fn limits(&self, base: &SearchLimits) -> SearchLimits {
        SearchLimits {
            slack: Some(SlackPrune {
                u1: self.u1,
                u2: self.u2,
                n: self.n,
            }),
            ..base.clone()
        }
    }

    pub fn zero_reach(&self, input: &[u64], limits: &SearchLimits) -> Result<ReachResult, TmError> {
        let init = self.initial(input)?;
        Ok(zero_reach(&System::from(&self.vass), &init, &self.limits(limits)))
    }
}
