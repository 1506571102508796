//! Compilation of normalized queries into a single component.
//!
//! The program is `C0; Q1 ... Qm; matrix; finalize` where `C0` loads the
//! constants, each quantifier wraps what follows it, and `finalize` spends
//! the remaining zero tests on the always-zero counter `_c0` and then
//! empties every other counter. The program depends only on the query;
//! `N` and the free values enter through the initial configuration.

use indexmap::IndexMap;
use serde::Serialize;

use super::ast::{Formula, Quantifier, Query, Rel, Term};
use super::normal::{is_normalized, normalize, split_prefix};
use super::oracle::{bind_free, eval, Env};
use super::FoError;
use crate::engine::{zero_reach, ReachResult, SearchLimits, SlackPrune, StatsMeta, System};
use crate::gadgets::{
    self, addition, hat_name, multiplication, not_addition, not_multiplication, Aux, Block, Budget, Component, HatMap,
    Layout, Op, Walker, U1, U2,
};
use crate::poly::Poly;
use crate::program::{CompactRun, Configuration, CounterProgram};

/// Name of the counter holding constant `a`.
pub fn constant_counter(a: u64) -> String {
    format!("_c{a}")
}

/// Which counters play which part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Roles {
    pub free: Vec<String>,
    pub quantified: Vec<String>,
    pub constants: Vec<String>,
    pub auxiliary: Vec<String>,
    pub hats: IndexMap<String, String>,
    pub testing: [String; 2],
}

#[derive(Clone, Debug)]
pub struct CompiledProgram {
    /// The normalized query.
    pub query: Query,
    pub prefix: Vec<(Quantifier, String)>,
    pub program: CounterProgram<u64>,
    pub block: Block,
    pub layout: Layout,
    pub hats: HatMap,
    pub roles: Roles,
    /// Literal occurrences in the matrix.
    pub k: usize,
    /// Quantified variables.
    pub m: usize,
    /// Zero tests the quantifier chain may spend, by construction.
    pub component_budget: Budget,
    /// `(K * (2N + 12))^max(M, 1)`.
    pub test_budget: Poly,
    /// Zero tests provisioned in `u1`: the test budget, or the test budget
    /// plus the component budget when the former does not dominate.
    pub provision: Poly,
    /// First line of the finalize block.
    pub finalize_line: usize,
    constants: Vec<u64>,
}

fn term_counter(t: &Term) -> String {
    match t {
        Term::Var(v) => v.clone(),
        Term::Const(a) => constant_counter(*a),
    }
}

fn literal(rel: Rel, args: &[Term; 3], positive: bool, aux: &Aux) -> Component {
    let [a, b, c] = [0, 1, 2].map(|i| term_counter(&args[i]));
    let make = match (rel, positive) {
        (Rel::Add, true) => addition,
        (Rel::Add, false) => not_addition,
        (Rel::Mul, true) => multiplication,
        (Rel::Mul, false) => not_multiplication,
    };
    make(&a, &b, &c, aux)
}

fn matrix(f: &Formula, aux: &Aux) -> Result<Component, FoError> {
    Ok(match f {
        Formula::Lit { rel, args, positive } => literal(*rel, args, *positive, aux),
        Formula::And(a, b) => gadgets::seq(vec![matrix(a, aux)?, matrix(b, aux)?]),
        Formula::Or(a, b) => gadgets::alt(matrix(a, aux)?, matrix(b, aux)?),
        _ => return Err(FoError::NotNormalized),
    })
}

fn drain(name: &str) -> Block {
    Block::maximal(Block::Raw(vec![Op::Dec(name.to_string(), 1)]))
}

/// Normalizes and compiles a query.
pub fn compile(q: &Query) -> Result<CompiledProgram, FoError> {
    compile_normalized(&normalize(q))
}

/// Compiles a query that is already prenex, sugar-free and in negation
/// normal form.
pub fn compile_normalized(q: &Query) -> Result<CompiledProgram, FoError> {
    if !is_normalized(&q.formula) {
        return Err(FoError::NotNormalized);
    }
    let (prefix, body) = split_prefix(&q.formula);
    let aux = Aux::default();
    let mut chain = matrix(body, &aux)?;
    for (quant, v) in prefix.iter().rev() {
        chain = match quant {
            Quantifier::Exists => gadgets::seq(vec![gadgets::exists(v), chain]),
            Quantifier::ForAll => gadgets::forall(v, chain)?,
        };
    }

    let mut constants = vec![0];
    q.formula.constants(&mut constants);
    constants.sort_unstable();
    let loads: Vec<Op> = constants
        .iter()
        .filter(|&&a| a > 0)
        .map(|&a| Op::Inc(constant_counter(a), a))
        .collect();

    let free = q.free.clone();
    let quantified: Vec<String> = prefix.iter().map(|(_, v)| v.clone()).collect();
    let constant_names: Vec<String> = constants.iter().map(|&a| constant_counter(a)).collect();
    let mut auxiliary: Vec<String> = aux.copies.to_vec();
    auxiliary.push(aux.t.clone());
    let used = chain.block.counters();
    auxiliary.retain(|a| used.contains(a));

    let bounded: Vec<String> = free
        .iter()
        .chain(&quantified)
        .chain(&constant_names)
        .chain(&auxiliary)
        .cloned()
        .collect();
    let mut order = Vec::with_capacity(2 * bounded.len() + 2);
    for b in &bounded {
        order.push(b.clone());
        order.push(hat_name(b));
    }
    order.push(U1.to_string());
    order.push(U2.to_string());

    let mut finalize = vec![Block::maximal(Block::zero(&constant_counter(0)))];
    finalize.extend(order.iter().filter(|c| *c != U1 && *c != U2).map(|c| drain(c)));
    let block = Block::seq(vec![Block::leaf(loads), chain.block.clone(), Block::seq(finalize)]);

    let hats = HatMap::for_counters(&bounded);
    let (program, layout) = gadgets::lower(&block, &hats)?;
    let program = program.with_counter_order(&order);
    let finalize_line = 1 + layout.children[2].offset;

    let k = body.literal_count();
    let m = prefix.len();
    let per = Poly::constant(k as i128) * (Poly::n().scale(2) + Poly::constant(12));
    let test_budget = per.pow(m.max(1) as u32);
    let upper = chain.budget.upper_poly();
    let provision = if test_budget.dominates(&upper) {
        test_budget.clone()
    } else {
        &test_budget + &upper
    };

    Ok(CompiledProgram {
        query: q.clone(),
        prefix,
        program,
        block,
        layout,
        hats: hats.clone(),
        roles: Roles {
            free,
            quantified,
            constants: constant_names,
            auxiliary,
            hats: bounded.iter().map(|b| (b.clone(), hat_name(b))).collect(),
            testing: [U1.to_string(), U2.to_string()],
        },
        k,
        m,
        component_budget: chain.budget,
        test_budget,
        provision,
        finalize_line,
        constants,
    })
}

/// One entry of the initial configuration map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionEntry {
    pub counter: String,
    pub poly: Poly,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub budget_poly: Poly,
    pub component_budget: Budget,
    pub provision_poly: Poly,
    pub layout: Roles,
    pub reduction_map: Vec<ReductionEntry>,
    pub finalize_line: usize,
    pub query: String,
}

impl CompiledProgram {
    /// The initial value of every counter as a polynomial in `N` and the
    /// free variables.
    pub fn reduction_map(&self) -> Vec<ReductionEntry> {
        let u1 = self.provision.scale(2);
        self.program
            .counters()
            .iter()
            .map(|c| {
                let poly = if self.roles.free.contains(c) {
                    Poly::var(c)
                } else if let Some(x) = self.roles.free.iter().find(|x| hat_name(x) == *c) {
                    Poly::n() - Poly::var(x)
                } else if c == U1 {
                    u1.clone()
                } else if c == U2 {
                    &u1 * &Poly::n()
                } else if self.hats.twin(c).is_some() && !self.hats.is_primary(c) {
                    Poly::n()
                } else {
                    Poly::zero()
                };
                ReductionEntry {
                    counter: c.clone(),
                    poly,
                }
            })
            .collect()
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            k: self.k,
            m: self.m,
            budget_poly: self.test_budget.clone(),
            component_budget: self.component_budget.clone(),
            provision_poly: self.provision.clone(),
            layout: self.roles.clone(),
            reduction_map: self.reduction_map(),
            finalize_line: self.finalize_line,
            query: self.query.to_string(),
        }
    }

    /// Evaluates the reduction map.
    pub fn initial_configuration(&self, n: u64, values: &[u64]) -> Result<Configuration<u64>, FoError> {
        let env = bind_free(&self.query, n, values)?;
        if let Some(&a) = self.constants.iter().find(|&&a| a > n) {
            return Err(FoError::ConstantTooLarge { value: a, n });
        }
        let lookup = |v: &str| -> Option<i128> {
            if v == "N" {
                return Some(n as i128);
            }
            env.iter().find(|(x, _)| x == v).map(|(_, x)| *x as i128)
        };
        let vals = self
            .reduction_map()
            .iter()
            .map(|e| {
                e.poly
                    .eval_with(lookup)
                    .and_then(|x| u64::try_from(x).ok())
                    .ok_or(FoError::Overflow)
            })
            .collect::<Result<Vec<u64>, _>>()?;
        Ok(Configuration::new(1, vals))
    }

    pub fn system(&self) -> System {
        System::from(&self.program)
    }

    pub fn slack(&self, n: u64) -> SlackPrune {
        SlackPrune {
            u1: self.program.counter_index(U1).expect("testing counter"),
            u2: self.program.counter_index(U2).expect("testing counter"),
            n,
        }
    }

    /// Zero reachability from the initial configuration. Slack pruning is
    /// enabled unless `limits` already sets it.
    pub fn zero_reach(&self, n: u64, values: &[u64], limits: &SearchLimits) -> Result<ReachResult, FoError> {
        let init = self.initial_configuration(n, values)?;
        let mut limits = limits.clone();
        limits.slack.get_or_insert(self.slack(n));
        Ok(zero_reach(&self.system(), &init.values, &limits))
    }

    pub fn stats_meta(&self, n: u64) -> StatsMeta {
        let idx = |c: &str| self.program.counter_index(c).expect("declared counter");
        StatsMeta {
            zero_test_counter: Some(idx(U1)),
            hat_pairs: self.roles.hats.iter().map(|(a, b)| (idx(a), idx(b))).collect(),
            n,
            check_before_line: Some(self.finalize_line),
        }
    }

    /// The valid run whose quantifier choices come from the oracle, or
    /// `None` when the query is false.
    pub fn witness_run(&self, n: u64, values: &[u64]) -> Result<Option<CompactRun<u64>>, FoError> {
        let env = bind_free(&self.query, n, values)?;
        if !eval(&self.query.formula, n, &mut env.clone()) {
            return Ok(None);
        }
        let start = self.initial_configuration(n, values)?;
        let (_, matrix) = split_prefix(&self.query.formula);
        let chooser = |v: &str, w: &Walker<'_>| -> Option<u64> {
            let i = self.prefix.iter().position(|(_, p)| p == v)?;
            let mut env: Env = env.clone();
            env.extend(self.prefix[..i].iter().map(|(_, p)| (p.clone(), w.value(p))));
            let rest = &self.prefix[i + 1..];
            (0..=n).find(|&d| {
                env.push((v.to_string(), d));
                let ok = eval_prefix(rest, matrix, n, &mut env);
                env.pop();
                ok
            })
        };
        let mut walker = Walker::new(&self.program, &self.hats, n, start.clone(), &chooser);
        walker
            .walk(&self.block, &self.layout, 1)
            .map_err(FoError::Witness)?;
        Ok(Some(walker.into_run(start)))
    }
}

fn eval_prefix(prefix: &[(Quantifier, String)], matrix: &Formula, n: u64, env: &mut Env) -> bool {
    let Some(((q, v), rest)) = prefix.split_first() else {
        return eval(matrix, n, env);
    };
    let mut check = |d: u64| {
        env.push((v.clone(), d));
        let r = eval_prefix(rest, matrix, n, env);
        env.pop();
        r
    };
    match q {
        Quantifier::Exists => (0..=n).any(&mut check),
        Quantifier::ForAll => (0..=n).all(&mut check),
    }
}
