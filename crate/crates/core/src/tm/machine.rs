use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::TmError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
    S,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub q: String,
    pub read: String,
    pub write: String,
    #[serde(rename = "move")]
    pub mv: Move,
    #[serde(rename = "q'")]
    pub next: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MachineJson {
    states: Vec<String>,
    sigma: Vec<String>,
    blank: String,
    delta: Vec<Rule>,
    q0: String,
    qacc: String,
    qrej: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    tapes: usize,
}

fn one() -> usize {
    1
}

fn is_one(k: &usize) -> bool {
    *k == 1
}

/// What a rule does, with states and symbols as indices. Symbol 0 is the
/// blank, `sigma[i]` is symbol `i + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Action {
    pub next: usize,
    pub write: usize,
    pub mv: Move,
}

/// A deterministic one-tape machine over a two-way infinite tape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    states: Vec<String>,
    sigma: Vec<char>,
    blank: char,
    rules: Vec<Rule>,
    q0: usize,
    qacc: usize,
    qrej: usize,
    delta: HashMap<(usize, usize), Action>,
}

fn single_char(s: &str) -> Result<char, TmError> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(TmError::InvalidMachine(format!("symbol `{s}` is not a single character"))),
    }
}

impl TuringMachine {
    pub fn new(
        states: Vec<String>,
        sigma: Vec<char>,
        blank: char,
        rules: Vec<Rule>,
        q0: &str,
        qacc: &str,
        qrej: &str,
    ) -> Result<Self, TmError> {
        let bad = |m: String| Err(TmError::InvalidMachine(m));
        let state = |s: &str| {
            states
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| TmError::InvalidMachine(format!("unknown state `{s}`")))
        };
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return bad(format!("duplicate state `{s}`"));
            }
        }
        for (i, c) in sigma.iter().enumerate() {
            if sigma[..i].contains(c) || *c == blank {
                return bad(format!("symbol `{c}` listed twice or equal to the blank"));
            }
        }
        let symbol = |s: &str| -> Result<usize, TmError> {
            let c = single_char(s)?;
            if c == blank {
                return Ok(0);
            }
            sigma
                .iter()
                .position(|x| *x == c)
                .map(|i| i + 1)
                .ok_or_else(|| TmError::InvalidMachine(format!("symbol `{c}` is not in the alphabet")))
        };
        let (q0, qacc, qrej) = (state(q0)?, state(qacc)?, state(qrej)?);
        if qacc == qrej {
            return bad("accept and reject states coincide".into());
        }
        let mut delta = HashMap::new();
        for r in &rules {
            let q = state(&r.q)?;
            if q == qacc || q == qrej {
                return bad(format!("halting state `{}` has a rule", r.q));
            }
            let a = symbol(&r.read)?;
            let act = Action {
                next: state(&r.next)?,
                write: symbol(&r.write)?,
                mv: r.mv,
            };
            if delta.insert((q, a), act).is_some() {
                return bad(format!("two rules for ({}, {})", r.q, r.read));
            }
        }
        Ok(TuringMachine {
            states,
            sigma,
            blank,
            rules,
            q0,
            qacc,
            qrej,
            delta,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, TmError> {
        let j: MachineJson = serde_json::from_str(text).map_err(|e| TmError::Json(e.to_string()))?;
        if j.tapes != 1 {
            return Err(TmError::MultiTape(j.tapes));
        }
        let sigma = j.sigma.iter().map(|s| single_char(s)).collect::<Result<Vec<_>, _>>()?;
        let blank = single_char(&j.blank)?;
        TuringMachine::new(j.states, sigma, blank, j.delta, &j.q0, &j.qacc, &j.qrej)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let name = |i: usize| self.states[i].clone();
        serde_json::to_value(MachineJson {
            states: self.states.clone(),
            sigma: self.sigma.iter().map(|c| c.to_string()).collect(),
            blank: self.blank.to_string(),
            delta: self.rules.clone(),
            q0: name(self.q0),
            qacc: name(self.qacc),
            qrej: name(self.qrej),
            tapes: 1,
        })
        .expect("serializable")
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn sigma(&self) -> &[char] {
        &self.sigma
    }

    pub fn blank(&self) -> char {
        self.blank
    }

    pub fn q0(&self) -> usize {
        self.q0
    }

    pub fn qacc(&self) -> usize {
        self.qacc
    }

    pub fn qrej(&self) -> usize {
        self.qrej
    }

    pub fn is_halting(&self, q: usize) -> bool {
        q == self.qacc || q == self.qrej
    }

    /// Numeric base of the tape encoding.
    pub fn base(&self) -> u64 {
        self.sigma.len() as u64 + 1
    }

    pub fn action(&self, q: usize, symbol: usize) -> Option<Action> {
        self.delta.get(&(q, symbol)).copied()
    }

    pub fn codec(&self) -> WordCodec {
        WordCodec::new(self.sigma.clone())
    }

    /// Every word over the input alphabet of length at most `len`, shortest
    /// first.
    pub fn words_up_to(&self, len: usize) -> Vec<String> {
        let mut out = vec![String::new()];
        let mut layer = vec![String::new()];
        for _ in 0..len {
            layer = layer
                .iter()
                .flat_map(|w| self.sigma.iter().map(move |c| format!("{w}{c}")))
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }
}

/// Symbols numbered `1..=|sigma|` in order, read in base `|sigma| + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordCodec {
    pub sigma: Vec<char>,
}

impl WordCodec {
    pub fn new(sigma: Vec<char>) -> Self {
        WordCodec { sigma }
    }

    pub fn base(&self) -> u64 {
        self.sigma.len() as u64 + 1
    }

    pub fn digits(&self, w: &str) -> Result<Vec<usize>, TmError> {
        w.chars()
            .map(|c| {
                self.sigma
                    .iter()
                    .position(|x| *x == c)
                    .map(|i| i + 1)
                    .ok_or(TmError::Symbol(c))
            })
            .collect()
    }
}

/// `num(w)`: digits base `|sigma| + 1`, first letter least significant.
pub fn num(codec: &WordCodec, w: &str) -> Result<u64, TmError> {
    let b = codec.base();
    codec
        .digits(w)?
        .iter()
        .rev()
        .try_fold(0u64, |acc, &d| acc.checked_mul(b)?.checked_add(d as u64))
        .ok_or(TmError::Overflow)
}

/// Inverse of [`num`]. Values with a zero digit below the leading one are
/// not codewords.
pub fn denum(n: u64, codec: &WordCodec) -> Result<String, TmError> {
    let b = codec.base();
    let mut rest = n;
    let mut w = String::new();
    while rest > 0 {
        let d = (rest % b) as usize;
        if d == 0 {
            return Err(TmError::NotCodeword(n));
        }
        w.push(codec.sigma[d - 1]);
        rest /= b;
    }
    Ok(w)
}

/// The counter automaton's input `(num(w), 0, 0)`.
pub fn initial_vector(w: &str, codec: &WordCodec) -> Result<Vec<u64>, TmError> {
    Ok(vec![num(codec, w)?, 0, 0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TmVerdict {
    Accept,
    Reject,
    SpaceExceeded,
    FuelExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TmOutcome {
    pub verdict: TmVerdict,
    pub steps: u64,
    /// Cells spanned by the input and every head position so far.
    pub space: usize,
}

/// Runs `m` on `w`. The input occupies cells `0..|w|` and the head starts
/// on cell 0. A step that moves the head outside `space_bound` cells stops
/// the run with `SpaceExceeded`. Reaching a state with no rule rejects.
pub fn tm_run(m: &TuringMachine, w: &str, space_bound: usize, fuel: u64) -> Result<TmOutcome, TmError> {
    let input = m.codec().digits(w)?;
    let (mut lo, mut hi) = (0i64, input.len().max(1) as i64 - 1);
    let mut tape: HashMap<i64, usize> = input.iter().enumerate().map(|(i, &d)| (i as i64, d)).collect();
    let (mut q, mut head, mut steps) = (m.q0, 0i64, 0u64);
    let space = |lo: i64, hi: i64| (hi - lo + 1) as usize;
    let out = |verdict, steps, lo, hi| {
        Ok(TmOutcome {
            verdict,
            steps,
            space: space(lo, hi),
        })
    };
    if space(lo, hi) > space_bound {
        return out(TmVerdict::SpaceExceeded, 0, lo, hi);
    }
    loop {
        if q == m.qacc {
            return out(TmVerdict::Accept, steps, lo, hi);
        }
        if q == m.qrej {
            return out(TmVerdict::Reject, steps, lo, hi);
        }
        let a = tape.get(&head).copied().unwrap_or(0);
        let Some(act) = m.action(q, a) else {
            return out(TmVerdict::Reject, steps, lo, hi);
        };
        if steps == fuel {
            return out(TmVerdict::FuelExceeded, steps, lo, hi);
        }
        tape.insert(head, act.write);
        head += match act.mv {
            Move::L => -1,
            Move::R => 1,
            Move::S => 0,
        };
        steps += 1;
        if space(lo.min(head), hi.max(head)) > space_bound {
            return out(TmVerdict::SpaceExceeded, steps, lo, hi);
        }
        lo = lo.min(head);
        hi = hi.max(head);
        q = act.next;
    }
}
