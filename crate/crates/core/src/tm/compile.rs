//! One-tape machine to 3-counter automaton.
//!
//! With the head on cell `h`, counter `r` holds the cells right of `h` as a
//! number in base `B = |sigma| + 1` (nearest cell least significant), `l`
//! holds the cells left of `h` the same way, and the symbol under the head
//! is part of the control state. `x` is scratch. Blank is digit 0, so the
//! unused part of the tape costs nothing.

use std::collections::HashMap;

use super::ca::{CaTransition, CounterAutomaton};
use super::machine::{Move, TuringMachine};

const R: usize = 0;
const L: usize = 1;
const X: usize = 2;
const NAMES: [&str; 3] = ["r", "l", "x"];

struct Builder {
    states: Vec<String>,
    transitions: Vec<CaTransition>,
}

impl Builder {
    fn state(&mut self, name: String) -> usize {
        self.states.push(name);
        self.states.len() - 1
    }

    fn update(&mut self, from: usize, delta: [i64; 3], to: usize) {
        self.transitions.push(CaTransition {
            from,
            delta: delta.to_vec(),
            zeta: None,
            to,
        });
    }

    fn zero(&mut self, from: usize, counter: usize, to: usize) {
        self.transitions.push(CaTransition {
            from,
            delta: vec![0; 3],
            zeta: Some(counter),
            to,
        });
    }
}

fn unit(c: usize, k: i64) -> [i64; 3] {
    let mut d = [0; 3];
    d[c] = k;
    d
}

fn transfer(from: usize, k_from: i64, to: usize, k_to: i64) -> [i64; 3] {
    let mut d = unit(from, k_from);
    d[to] = k_to;
    d
}

/// Compiles `m`. The automaton starts in its initial state with
/// `(num(w), 0, 0)`, reaches the final state iff `m` accepts `w`, and is
/// deterministic.
pub fn tm_to_ca(m: &TuringMachine) -> CounterAutomaton {
    let base = m.base() as usize;
    let b = base as i64;
    let mut bl = Builder {
        states: Vec::new(),
        transitions: Vec::new(),
    };
    let accept = bl.state("accept".into());
    let reject = bl.state("reject".into());

    // Control states (q, a) for non-halting q.
    let mut control = HashMap::new();
    for q in 0..m.states().len() {
        if m.is_halting(q) {
            continue;
        }
        for a in 0..base {
            let id = bl.state(format!("{}|{a}", m.states()[q]));
            control.insert((q, a), id);
        }
    }
    let enter = |q: usize| {
        if q == m.qacc() {
            Some(accept)
        } else if q == m.qrej() {
            Some(reject)
        } else {
            None
        }
    };

    // pop[src][q]: src := src div B, then control (q, src mod B).
    //   d_i: src = 0 ? -> back_i : src -= 1 -> d_{i+1}, the step from d_{B-1}
    //        also adds one to x
    //   back_k: x = 0 ? -> (q, k) : x -= 1, src += 1
    let mut pops: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pop = |bl: &mut Builder, src: usize, q: usize| -> usize {
        if let Some(&s) = pops.get(&(src, q)) {
            return s;
        }
        let tag = format!("{}:pop-{}", m.states()[q], NAMES[src]);
        let d: Vec<usize> = (0..base).map(|i| bl.state(format!("{tag}/d{i}"))).collect();
        let back: Vec<usize> = (0..base).map(|k| bl.state(format!("{tag}/back{k}"))).collect();
        for i in 0..base {
            bl.zero(d[i], src, back[i]);
            if i + 1 < base {
                bl.update(d[i], unit(src, -1), d[i + 1]);
            } else {
                bl.update(d[i], transfer(src, -1, X, 1), d[0]);
            }
            bl.zero(back[i], X, control[&(q, i)]);
            bl.update(back[i], transfer(X, -1, src, 1), back[i]);
        }
        pops.insert((src, q), d[0]);
        d[0]
    };

    let start = match enter(m.q0()) {
        Some(s) => s,
        None => pop(&mut bl, R, m.q0()),
    };

    for (&(q, a), &ctl) in control.iter().collect::<std::collections::BTreeMap<_, _>>() {
        let Some(act) = m.action(q, a) else {
            bl.update(ctl, [0; 3], reject);
            continue;
        };
        if let Some(h) = enter(act.next) {
            bl.update(ctl, [0; 3], h);
            continue;
        }
        let (dst, src) = match act.mv {
            Move::S => {
                bl.update(ctl, [0; 3], control[&(act.next, act.write)]);
                continue;
            }
            Move::R => (L, R),
            Move::L => (R, L),
        };
        // push: dst := dst * B + write, then pop from the other side.
        //   t: dst = 0 ? -> u : dst -= 1, x += 1
        //   u: x = 0 ? -> add : x -= 1, dst += B
        //   add: dst += write
        let then = pop(&mut bl, src, act.next);
        let tag = format!("{}|{a}:push-{}", m.states()[q], NAMES[dst]);
        let t = bl.state(format!("{tag}/t"));
        let u = bl.state(format!("{tag}/u"));
        bl.update(ctl, [0; 3], t);
        bl.zero(t, dst, u);
        bl.update(t, transfer(dst, -1, X, 1), t);
        bl.update(u, transfer(X, -1, dst, b), u);
        if act.write == 0 {
            bl.zero(u, X, then);
        } else {
            let add = bl.state(format!("{tag}/add"));
            bl.zero(u, X, add);
            bl.update(add, unit(dst, act.write as i64), then);
        }
    }

    // The start state first, for readability of exports.
    let order: Vec<usize> = std::iter::once(start)
        .chain((0..bl.states.len()).filter(|&s| s != start))
        .collect();
    let mut rank = vec![0; order.len()];
    for (i, &s) in order.iter().enumerate() {
        rank[s] = i;
    }
    let states = order.iter().map(|&s| bl.states[s].clone()).collect();
    let transitions = bl
        .transitions
        .into_iter()
        .map(|t| CaTransition {
            from: rank[t.from],
            to: rank[t.to],
            ..t
        })
        .collect();
    CounterAutomaton::new(
        NAMES.iter().map(|s| s.to_string()).collect(),
        states,
        0,
        rank[accept],
        transitions,
    )
    .expect("well-formed automaton")
    .with_codec(m.codec())
}
