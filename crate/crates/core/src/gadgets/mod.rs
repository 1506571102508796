//! Bounded zero tests and the arithmetic and quantifier components built
//! from them.
//!
//! Every counter except the testing pair `u1`, `u2` is bounded by `N` and
//! carries a hat twin. A configuration is valid when `u2 = N * u1`; a zero
//! test on a nonzero counter cannot restore that equation, so a run that
//! starts and ends valid has passed all its zero tests honestly.

mod block;
mod budget;
mod hat;
mod walk;

use indexmap::IndexSet;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{find_path, PathResult, SearchLimits, SlackPrune, System};
use crate::poly::Poly;
use crate::program::{CompactRun, Configuration, CounterProgram, ProgramBuilder, ProgramError};

pub use block::{lower, Block, Layout, LoopPolicy, Op, U1, U2};
pub use budget::Budget;
pub use hat::{hat_expand, hat_expand_with_map, hat_name, HatMap, HAT_SUFFIX};
pub use walk::{Chooser, WalkError, Walker};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error("the body of a universal quantifier over `{0}` changes `{0}`")]
    BodyChangesVariable(String),
    #[error("counter `{0}` is reserved")]
    Reserved(String),
    #[error("value {value} of `{name}` exceeds N = {n}")]
    OutOfRange { name: String, value: u64, n: u64 },
    #[error("unknown gadget `{0}`")]
    Unknown(String),
}

/// A block with a zero-test budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub block: Block,
    pub budget: Budget,
    /// Counters whose value may differ between entry and exit.
    pub modifies: IndexSet<String>,
}

/// Auxiliary counters used by the literal gadgets: the working copies of
/// the three operands and the shared transfer counter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Aux {
    pub copies: [String; 3],
    pub t: String,
}

impl Default for Aux {
    fn default() -> Self {
        Aux {
            copies: ["_a1".into(), "_a2".into(), "_a3".into()],
            t: "_t".into(),
        }
    }
}

fn set(names: &[&str]) -> IndexSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn n_poly() -> Poly {
    Poly::n()
}

pub fn zero_test(v: &str) -> Component {
    Component {
        name: format!("zero-test[{v}]"),
        block: Block::zero(v),
        budget: Budget::constant(1),
        modifies: IndexSet::new(),
    }
}

fn copy_block(x: &str, x2: &str, t: &str) -> Block {
    Block::seq(vec![
        Block::maximal(Block::leaf(vec![Op::dec(x2)])),
        Block::zero(x2),
        Block::maximal(Block::leaf(vec![Op::dec(x), Op::inc(x2), Op::inc(t)])),
        Block::zero(x),
        Block::maximal(Block::leaf(vec![Op::dec(t), Op::inc(x)])),
        Block::zero(t),
    ])
}

/// Sets `x2` to the value of `x`, using `t` as scratch.
pub fn copy(x: &str, x2: &str, t: &str) -> Component {
    Component {
        name: format!("copy[{x},{x2}]"),
        block: copy_block(x, x2, t),
        budget: Budget::constant(3),
        modifies: set(&[x2]),
    }
}

fn copies(ops: [&str; 3], aux: &Aux) -> Vec<Block> {
    (0..3).map(|i| copy_block(ops[i], &aux.copies[i], &aux.t)).collect()
}

fn aux_set(aux: &Aux) -> IndexSet<String> {
    let mut s: IndexSet<String> = aux.copies.iter().cloned().collect();
    s.insert(aux.t.clone());
    s
}

fn sum_loop(aux: &Aux) -> Block {
    let [a1, a2, a3] = &aux.copies;
    Block::maximal(Block::seq(vec![
        Block::leaf(vec![Op::dec(a3)]),
        Block::or(Block::leaf(vec![Op::dec(a1)]), Block::leaf(vec![Op::dec(a2)])),
    ]))
}

/// Valid iff `x + y = z`.
pub fn addition(x: &str, y: &str, z: &str, aux: &Aux) -> Component {
    let [a1, a2, a3] = &aux.copies;
    let mut parts = copies([x, y, z], aux);
    parts.push(sum_loop(aux));
    parts.extend([Block::zero(a1), Block::zero(a2), Block::zero(a3)]);
    Component {
        name: format!("addition[{x},{y},{z}]"),
        block: Block::seq(parts),
        budget: Budget::constant(12),
        modifies: aux_set(aux),
    }
}

/// Valid iff `x + y != z`.
pub fn not_addition(x: &str, y: &str, z: &str, aux: &Aux) -> Component {
    let [a1, a2, a3] = &aux.copies;
    let mut parts = copies([x, y, z], aux);
    parts.push(sum_loop(aux));
    parts.push(Block::or(
        Block::seq(vec![
            Block::zero(a3),
            Block::or(Block::leaf(vec![Op::dec(a1)]), Block::leaf(vec![Op::dec(a2)])),
        ]),
        Block::seq(vec![Block::zero(a1), Block::zero(a2), Block::leaf(vec![Op::dec(a3)])]),
    ));
    Component {
        name: format!("not-addition[{x},{y},{z}]"),
        block: Block::seq(parts),
        budget: Budget::constant(11),
        modifies: aux_set(aux),
    }
}

/// Valid iff `x * y = z`.
pub fn multiplication(x: &str, y: &str, z: &str, aux: &Aux) -> Component {
    let [a1, a2, a3] = &aux.copies;
    let t = aux.t.as_str();
    let mut parts = copies([x, y, z], aux);
    parts.push(Block::maximal(Block::seq(vec![
        Block::maximal(Block::leaf(vec![Op::dec(a1), Op::inc(t), Op::dec(a3)])),
        Block::zero(a1),
        Block::maximal(Block::leaf(vec![Op::inc(a1), Op::dec(t)])),
        Block::zero(t),
        Block::leaf(vec![Op::dec(a2)]),
    ])));
    parts.extend([Block::zero(a2), Block::zero(a3)]);
    Component {
        name: format!("multiplication[{x},{y},{z}]"),
        block: Block::seq(parts),
        // 9 for the copies, 2 per outer iteration (at most N), 2 at the end.
        budget: Budget::Poly(n_poly().scale(2) + Poly::constant(11)),
        modifies: aux_set(aux),
    }
}

/// Valid iff `x * y != z`. Written with explicit gotos: inside the inner
/// loop a run may leave for the branch that checks `z' = 0` while a
/// transfer is still pending (`x' > 0`, `y' > 0`).
pub fn not_multiplication(x: &str, y: &str, z: &str, aux: &Aux) -> Component {
    let [a1, a2, a3] = &aux.copies;
    let t = aux.t.as_str();
    let template = ProgramBuilder::<u64>::new()
        .skip() // 1: copies
        .goto(&[3, 17]) // 2: outer loop
        .goto(&[4, 9]) // 3: inner loop
        .goto(&[5, 20]) // 4: leave for the z' = 0 branch
        .dec(a1, 1)
        .inc(t, 1)
        .dec(a3, 1)
        .goto(&[3])
        .skip() // 9: zero x'
        .goto(&[11, 14])
        .inc(a1, 1)
        .dec(t, 1)
        .goto(&[10])
        .skip() // 14: zero t
        .dec(a2, 1)
        .goto(&[2])
        .skip() // 17: zero y'
        .dec(a3, 1)
        .goto(&[24])
        .skip() // 20: zero z'
        .dec(a2, 1)
        .dec(a1, 1)
        .skip() // 23: drain t, left over by the escape from line 4
        .build()
        .expect("well-formed template");
    let holes = vec![
        (1, Block::seq(copies([x, y, z], aux))),
        (9, Block::zero(a1)),
        (14, Block::zero(t)),
        (17, Block::zero(a2)),
        (20, Block::zero(a3)),
        (23, Block::seq(vec![Block::maximal(Block::leaf(vec![Op::dec(t)])), Block::zero(t)])),
    ];
    Component {
        name: format!("not-multiplication[{x},{y},{z}]"),
        block: Block::Template { program: template, holes },
        // 9 for the copies, 2 per completed outer iteration (at most N), 1 at the
        // end. The escape from line 4 completes at most N - 1 iterations and
        // pays one more test for draining t.
        budget: Budget::Poly(n_poly().scale(2) + Poly::constant(10)),
        modifies: aux_set(aux),
    }
}

/// Sets `v` to any value in `0..=N`. The leading drain makes the gadget
/// usable when `v` is not zero on entry (inside an enclosing loop).
pub fn exists(v: &str) -> Component {
    Component {
        name: format!("exists[{v}]"),
        block: Block::seq(vec![
            Block::maximal(Block::leaf(vec![Op::dec(v)])),
            Block::pump(Block::leaf(vec![Op::inc(v)]), v),
        ]),
        budget: Budget::zero(),
        modifies: set(&[v]),
    }
}

/// Runs `body` for every value of `v` in `0..=N`.
///
/// ```text
/// loop v -= 1; zero-test v
/// loop { body; v += 1 }
/// body
/// zero-test v^
/// ```
/// The loop covers `0..N`, the trailing copy of the body covers `N`, and
/// the final test forces the loop to have run `N` times.
pub fn forall(v: &str, body: Component) -> Result<Component, GadgetError> {
    if body.modifies.contains(v) {
        return Err(GadgetError::BodyChangesVariable(v.to_string()));
    }
    let mut modifies = body.modifies.clone();
    modifies.insert(v.to_string());
    let budget = Budget::sum([
        Budget::times(n_poly() + Poly::constant(1), body.budget.clone()),
        Budget::constant(2),
    ]);
    Ok(Component {
        name: format!("forall[{v}]({})", body.name),
        block: Block::seq(vec![
            Block::maximal(Block::leaf(vec![Op::dec(v)])),
            Block::zero(v),
            Block::saturate(Block::seq(vec![body.block.clone(), Block::leaf(vec![Op::inc(v)])]), v),
            body.block,
            Block::zero(&hat_name(v)),
        ]),
        budget,
        modifies,
    })
}

/// Sequential composition; budgets add up.
pub fn seq(parts: Vec<Component>) -> Component {
    let name = parts.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join("; ");
    let budget = Budget::sum(parts.iter().map(|c| c.budget.clone()));
    let modifies = parts.iter().flat_map(|c| c.modifies.iter().cloned()).collect();
    Component {
        name,
        block: Block::seq(parts.into_iter().map(|c| c.block).collect()),
        budget,
        modifies,
    }
}

/// Choice; the budget is the larger one.
pub fn alt(a: Component, b: Component) -> Component {
    Component {
        name: format!("({}) or ({})", a.name, b.name),
        budget: Budget::max([a.budget.clone(), b.budget.clone()]),
        modifies: a.modifies.union(&b.modifies).cloned().collect(),
        block: Block::or(a.block, b.block),
    }
}

/// Looks up a literal gadget by name, as used on the command line.
pub fn by_name(name: &str) -> Result<Component, GadgetError> {
    let aux = Aux::default();
    Ok(match name {
        "zero-test" => zero_test("v"),
        "copy" => copy("x", "x'", "t"),
        "addition" => addition("x", "y", "z", &aux),
        "not-addition" => not_addition("x", "y", "z", &aux),
        "multiplication" => multiplication("x", "y", "z", &aux),
        "not-multiplication" => not_multiplication("x", "y", "z", &aux),
        "exists" => exists("v"),
        _ => return Err(GadgetError::Unknown(name.to_string())),
    })
}

pub const GADGET_NAMES: &[&str] = &[
    "zero-test",
    "copy",
    "addition",
    "not-addition",
    "multiplication",
    "not-multiplication",
    "exists",
];

/// A component lowered on its own, with every non-testing counter bounded.
#[derive(Clone, Debug)]
pub struct Instance {
    pub component: Component,
    pub program: CounterProgram<u64>,
    pub layout: Layout,
    pub hats: HatMap,
}

#[derive(Clone, Debug, Serialize)]
pub struct GadgetManifest {
    pub name: String,
    pub budget_poly: Budget,
    pub counters: Vec<String>,
}

impl Component {
    /// Counters used by the block, testing counters excluded, hats excluded.
    pub fn bounded_counters(&self) -> IndexSet<String> {
        let mut c = self.block.counters();
        c.shift_remove(U1);
        c.shift_remove(U2);
        let hats: Vec<String> = c.iter().filter(|n| n.ends_with(HAT_SUFFIX)).cloned().collect();
        for h in hats {
            c.shift_remove(&h);
            c.insert(h.trim_end_matches(HAT_SUFFIX).to_string());
        }
        c
    }

    pub fn instantiate(&self) -> Result<Instance, GadgetError> {
        let hats = HatMap::for_counters(self.bounded_counters());
        let (program, layout) = lower(&self.block, &hats)?;
        Ok(Instance {
            component: self.clone(),
            program,
            layout,
            hats,
        })
    }

    pub fn manifest(&self, program: &CounterProgram<u64>) -> GadgetManifest {
        GadgetManifest {
            name: self.name.clone(),
            budget_poly: self.budget.clone(),
            counters: program.counters().iter().cloned().collect(),
        }
    }
}

impl Instance {
    /// Entry valuation: the given counters as listed, every other bounded
    /// counter zero, hats complementary, and `2 * tests` units in `u1`.
    pub fn initial(&self, n: u64, values: &[(&str, u64)], tests: u64) -> Result<Vec<u64>, GadgetError> {
        let mut out = self.program.zero_valuation();
        for b in self.hats.bounded() {
            let v = values.iter().find(|(k, _)| *k == b).map_or(0, |(_, v)| *v);
            if v > n {
                return Err(GadgetError::OutOfRange {
                    name: b.to_string(),
                    value: v,
                    n,
                });
            }
            if let Some(i) = self.program.counter_index(b) {
                out[i] = v;
            }
            if let Some(i) = self.program.counter_index(&hat_name(b)) {
                out[i] = n - v;
            }
        }
        if let Some(i) = self.program.counter_index(U1) {
            out[i] = 2 * tests;
        }
        if let Some(i) = self.program.counter_index(U2) {
            out[i] = 2 * tests * n;
        }
        Ok(out)
    }

    /// Default provisioning: twice the budget at `n`.
    pub fn default_tests(&self, n: u64) -> u64 {
        self.component.budget.eval(n).map_or(0, |b| b.max(0) as u64)
    }

    /// Searches for a valid run: from line 1 to the halt line, ending with
    /// `u2 = N * u1`.
    pub fn valid_run(&self, n: u64, init: &[u64], limits: &SearchLimits) -> PathResult {
        let sys = System::from(&self.program);
        let (u1, u2) = match (self.program.counter_index(U1), self.program.counter_index(U2)) {
            (Some(a), Some(b)) => (a, b),
            // No zero tests: every run to the halt line is valid.
            _ => {
                let halt = self.program.halt_line();
                return find_path(&sys, 1, init, limits, &|_| true, &|l, _| l == halt);
            }
        };
        let mut limits = limits.clone();
        limits.slack = Some(SlackPrune { u1, u2, n });
        let halt = self.program.halt_line();
        let goal = |l: usize, v: &[u64]| l == halt && v[u2] as u128 == n as u128 * v[u1] as u128;
        find_path(&sys, 1, init, &limits, &|_| true, &goal)
    }

    /// The canonical valid run, or `None` if the walker finds none.
    pub fn witness(&self, n: u64, init: Vec<u64>, chooser: &Chooser<'_>) -> Result<CompactRun<u64>, WalkError> {
        let start = Configuration::new(1, init);
        let mut w = Walker::new(&self.program, &self.hats, n, start.clone(), chooser);
        w.walk(&self.component.block, &self.layout, 1)?;
        Ok(w.into_run(start))
    }
}

#[cfg(test)]
mod tests;
