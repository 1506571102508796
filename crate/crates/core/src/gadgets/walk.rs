//! Builds valid runs by walking a block tree over its lowered program.
//!
//! Zero tests are treated as ideal: a `ZeroTest` node fails unless its
//! counter is zero, and otherwise both transfer loops run to completion.
//! `Or` tries the left branch first. Loops follow their [`LoopPolicy`].
//! [`Block::Template`] fragments are crossed by a shortest local
//! search. Failed attempts are rolled back, so the emitted run only
//! contains steps that were kept.

use std::collections::HashMap;

use super::block::{Block, Layout, LoopPolicy, U1, U2};
use super::hat::HatMap;
use crate::engine::{find_path, PathResult, SearchLimits, SlackPrune, System};
use crate::program::{apply_line, CompactRun, Configuration, CounterProgram, StepOutcome};

/// Supplies the target value of a pumped counter.
pub type Chooser<'a> = dyn Fn(&str, &Walker<'_>) -> Option<u64> + 'a;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WalkError {
    /// No valid run through the block from the current configuration.
    NoRun,
    /// The step budget ran out.
    TooLong,
    /// Local search gave up.
    SearchLimit,
}

pub struct Walker<'a> {
    program: &'a CounterProgram<u64>,
    system: Option<System>,
    hats: &'a HatMap,
    n: u64,
    chooser: &'a Chooser<'a>,
    cur: Configuration<u64>,
    lines: Vec<u32>,
    u1: Option<usize>,
    u2: Option<usize>,
    max_steps: usize,
    local_cache: HashMap<(usize, Vec<u64>), Option<Vec<u32>>>,
    error: Option<WalkError>,
}

struct Snapshot {
    cur: Configuration<u64>,
    len: usize,
}

impl<'a> Walker<'a> {
    pub fn new(
        program: &'a CounterProgram<u64>,
        hats: &'a HatMap,
        n: u64,
        start: Configuration<u64>,
        chooser: &'a Chooser<'a>,
    ) -> Self {
        Walker {
            program,
            system: None,
            hats,
            n,
            chooser,
            cur: start,
            lines: Vec::new(),
            u1: program.counter_index(U1),
            u2: program.counter_index(U2),
            max_steps: usize::MAX,
            local_cache: HashMap::new(),
            error: None,
        }
    }

    pub fn with_max_steps(mut self, max: usize) -> Self {
        self.max_steps = max;
        self
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn current(&self) -> &Configuration<u64> {
        &self.cur
    }

    /// Current value of a counter; unknown names read as zero.
    pub fn value(&self, name: &str) -> u64 {
        self.program
            .counter_index(name)
            .map_or(0, |i| self.cur.values[i])
    }

    pub fn into_run(self, start: Configuration<u64>) -> CompactRun<u64> {
        CompactRun {
            start,
            lines: self.lines,
        }
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            cur: self.cur.clone(),
            len: self.lines.len(),
        }
    }

    fn restore(&mut self, s: Snapshot) {
        self.cur = s.cur;
        self.lines.truncate(s.len);
    }

    /// Executes the current line, continuing at `to`.
    fn step(&mut self, to: usize) -> bool {
        if self.lines.len() >= self.max_steps {
            self.error.get_or_insert(WalkError::TooLong);
            return false;
        }
        match apply_line(self.program, self.cur.line, &self.cur.values) {
            StepOutcome::Next(values) if to == self.cur.line + 1 => {
                self.cur.values = values;
            }
            StepOutcome::Jump(ts) if ts.contains(&to) => {}
            _ => return false,
        }
        self.cur.line = to;
        self.lines.push(to as u32);
        true
    }

    fn fall_through(&mut self) -> bool {
        let next = self.cur.line + 1;
        self.step(next)
    }

    /// Walks `block`, which starts at line `start`, from the current
    /// configuration (which must sit at `start`) to its terminal line.
    pub fn walk(&mut self, block: &Block, layout: &Layout, start: usize) -> Result<(), WalkError> {
        debug_assert_eq!(self.cur.line, start);
        let snap = self.snapshot();
        if self.go(block, layout, start) {
            Ok(())
        } else {
            self.restore(snap);
            Err(self.error.take().unwrap_or(WalkError::NoRun))
        }
    }

    fn go(&mut self, block: &Block, layout: &Layout, start: usize) -> bool {
        if self.error.is_some() {
            return false;
        }
        match block {
            Block::Leaf(_) | Block::Raw(_) => {
                for _ in 1..layout.len {
                    if !self.fall_through() {
                        return false;
                    }
                }
                true
            }
            Block::Seq(parts) => {
                for (b, l) in parts.iter().zip(&layout.children) {
                    if !self.go(b, l, start + l.offset) || !self.fall_through() {
                        return false;
                    }
                }
                true
            }
            Block::Or(a, b) => {
                let (la, lb) = (&layout.children[0], &layout.children[1]);
                let terminal = layout.terminal(start);
                let snap = self.snapshot();
                if self.step(start + la.offset)
                    && self.go(a, la, start + la.offset)
                    && self.fall_through()
                    && self.step(terminal)
                {
                    return true;
                }
                if self.error.is_some() {
                    return false;
                }
                self.restore(snap);
                self.step(start + lb.offset) && self.go(b, lb, start + lb.offset) && self.fall_through()
            }
            Block::Loop(body, policy) => self.go_loop(body, policy, layout, start),
            Block::ZeroTest(v) => {
                if self.value(v) != 0 {
                    return false;
                }
                let l = &layout.children[0];
                let inner = Block::zero_test_body(v, self.hats).expect("lowered before");
                self.go(&inner, l, start + l.offset)
            }
            Block::Template { .. } => self.go_local(block, layout, start),
        }
    }

    fn iterate(&mut self, body: &Block, layout: &Layout, start: usize) -> bool {
        let lb = &layout.children[0];
        self.step(start + lb.offset) && self.go(body, lb, start + lb.offset) && self.fall_through() && self.step(start)
    }

    fn go_loop(&mut self, body: &Block, policy: &LoopPolicy, layout: &Layout, start: usize) -> bool {
        let exit = layout.terminal(start);
        match policy {
            LoopPolicy::Maximal => loop {
                let snap = self.snapshot();
                if self.iterate(body, layout, start) && self.cur.values != snap.cur.values {
                    continue;
                }
                if self.error.is_some() {
                    return false;
                }
                self.restore(snap);
                return self.step(exit);
            },
            LoopPolicy::Pump(var) => {
                let Some(target) = (self.chooser)(var, self) else {
                    return false;
                };
                while self.value(var) < target {
                    if !self.iterate(body, layout, start) {
                        return false;
                    }
                }
                self.value(var) == target && self.step(exit)
            }
            LoopPolicy::Saturate(var) => {
                while self.value(var) < self.n {
                    let before = self.value(var);
                    if !self.iterate(body, layout, start) || self.value(var) <= before {
                        return false;
                    }
                }
                self.step(exit)
            }
        }
    }

    /// Shortest path through an opaque fragment that ends valid, i.e. with
    /// `u2 = N * u1`.
    fn go_local(&mut self, block: &Block, layout: &Layout, start: usize) -> bool {
        let (Some(u1), Some(u2)) = (self.u1, self.u2) else {
            return false;
        };
        let mut footprint: Vec<usize> = Vec::new();
        for c in block.counters() {
            if c == U1 || c == U2 {
                continue;
            }
            footprint.extend(self.program.counter_index(&c));
            if let Some(h) = self.hats.twin(&c) {
                footprint.extend(self.program.counter_index(h));
            }
        }
        let key = (start, footprint.iter().map(|&i| self.cur.values[i]).collect::<Vec<_>>());
        let path = match self.local_cache.get(&key) {
            Some(p) => p.clone(),
            None => {
                let terminal = layout.terminal(start);
                let n = self.n;
                let system = self.system.get_or_insert_with(|| System::from(self.program));
                let limits = SearchLimits {
                    max_states: Some(20_000_000),
                    slack: Some(SlackPrune { u1, u2, n }),
                    ..SearchLimits::default()
                };
                let allowed = |l: usize| l >= start && l <= terminal;
                let goal = |l: usize, v: &[u64]| l == terminal && v[u2] as u128 == n as u128 * v[u1] as u128;
                let found = match find_path(system, start, &self.cur.values, &limits, &allowed, &goal) {
                    PathResult::Found(cs) => Some(cs[1..].iter().map(|c| c.line as u32).collect::<Vec<_>>()),
                    PathResult::NotFound => None,
                    PathResult::LimitExceeded(_) => {
                        self.error = Some(WalkError::SearchLimit);
                        return false;
                    }
                };
                self.local_cache.insert(key, found.clone());
                found
            }
        };
        match path {
            Some(lines) => lines.into_iter().all(|l| self.step(l as usize)),
            None => false,
        }
    }
}
