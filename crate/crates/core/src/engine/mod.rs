//! Bounded explicit-state zero-reachability search.
//!
//! Breadth-first search from `(start, init)` for `(target, 0)`. Successors
//! are expanded in location order and, within a goto, in target order, so
//! verdicts and certificates are deterministic. States live in a flat arena
//! that doubles as the BFS queue; the visited set is a hash table of arena
//! indices. Values are stored at the narrowest width that holds the initial
//! valuation and the caps, and the search is repeated at a wider width if an
//! increment overflows.

mod dfs;
mod stats;
mod system;

use std::hash::BuildHasher;
use std::time::{Duration, Instant};

use hashbrown::{DefaultHashBuilder, HashTable};
use serde::Serialize;

use crate::num::{CounterValue, Width};
use crate::program::{Configuration, Run};

pub use dfs::dfs_zero_reach;
pub use stats::{run_stats, RunStats, StatsMeta};
pub use system::{Edge, System};

/// Prunes states with `u2 > n * u1`.
///
/// Sound for compiled programs whose testing counters are only touched by
/// zero-test gadgets: no gadget lowers `u2 - n * u1` once it completes, so
/// such a state can never reach the all-zero target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SlackPrune {
    pub u1: usize,
    pub u2: usize,
    pub n: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_states: Option<usize>,
    pub max_depth: Option<usize>,
    /// Per-counter upper bounds; states exceeding one are discarded.
    pub caps: Option<Vec<Option<u64>>>,
    pub time: Option<Duration>,
    pub slack: Option<SlackPrune>,
}

impl SearchLimits {
    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn states(max: usize) -> Self {
        SearchLimits {
            max_states: Some(max),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub explored: usize,
    pub depth: usize,
    pub pruned: usize,
    pub elapsed_ms: u128,
    /// Which limit stopped the search, if any.
    pub stopped_by: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReachResult {
    Reachable(Run<u64>),
    Unreachable { explored: usize, exhaustive: bool },
    LimitExceeded(SearchStats),
}

impl ReachResult {
    pub fn is_reachable(&self) -> bool {
        matches!(self, ReachResult::Reachable(_))
    }

    pub fn is_unreachable(&self) -> bool {
        matches!(self, ReachResult::Unreachable { .. })
    }
}

/// Reachable configurations with an exhaustiveness flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachSet {
    pub configs: Vec<Configuration<u64>>,
    pub exhaustive: bool,
}

impl ReachSet {
    /// Valuations reachable at location `loc`, sorted.
    pub fn values_at(&self, loc: usize) -> Vec<Vec<u64>> {
        let mut v: Vec<Vec<u64>> = self
            .configs
            .iter()
            .filter(|c| c.line == loc)
            .map(|c| c.values.clone())
            .collect();
        v.sort();
        v
    }
}

enum Outcome {
    Found(Vec<Configuration<u64>>),
    Done { explored: usize, overflowed: bool },
    Stopped(SearchStats),
}

struct Arena<V> {
    dim: usize,
    values: Vec<V>,
    locs: Vec<u32>,
    parents: Vec<u32>,
}

impl<V: CounterValue> Arena<V> {
    fn len(&self) -> usize {
        self.locs.len()
    }

    fn state(&self, i: usize) -> (u32, &[V]) {
        (self.locs[i], &self.values[i * self.dim..(i + 1) * self.dim])
    }

    fn push(&mut self, loc: u32, values: &[V], parent: u32) {
        self.locs.push(loc);
        self.values.extend_from_slice(values);
        self.parents.push(parent);
    }

    fn config(&self, i: usize) -> Configuration<u64> {
        let (loc, vals) = self.state(i);
        Configuration::new(loc as usize, vals.iter().map(|v| v.widen() as u64).collect())
    }

    fn trace(&self, mut i: usize) -> Vec<Configuration<u64>> {
        let mut out = vec![self.config(i)];
        while self.parents[i] != u32::MAX {
            i = self.parents[i] as usize;
            out.push(self.config(i));
        }
        out.reverse();
        out
    }
}

fn hash_state<V: CounterValue>(h: &DefaultHashBuilder, loc: u32, values: &[V]) -> u64 {
    h.hash_one((loc, values))
}

/// Where a search starts and what it looks for.
struct Query<'a, V> {
    start: usize,
    goal: Option<&'a dyn Fn(u32, &[V]) -> bool>,
    allowed: Option<&'a dyn Fn(u32) -> bool>,
    /// Per-location frozen counters (see [`System::frozen_counters`]).
    frozen: Option<&'a [Option<Vec<usize>>]>,
}

/// The BFS proper. `visit` sees every newly discovered state.
fn bfs<V: CounterValue>(
    sys: &System,
    init: &[V],
    limits: &SearchLimits,
    query: Query<'_, V>,
    mut visit: impl FnMut(u32, &[V]),
) -> Outcome {
    let started = Instant::now();
    let dim = sys.dim();
    let hasher = DefaultHashBuilder::default();
    let mut arena = Arena {
        dim,
        values: Vec::new(),
        locs: Vec::new(),
        parents: Vec::new(),
    };
    let mut table: HashTable<u32> = HashTable::new();
    let caps: Option<Vec<Option<V>>> = limits.caps.as_ref().map(|cs| {
        cs.iter()
            .map(|c| c.map(|c| V::from_u64(c).unwrap_or(V::max_value())))
            .collect()
    });
    let within = |vals: &[V]| -> bool {
        if let Some(caps) = &caps {
            if caps.iter().zip(vals).any(|(c, v)| matches!(c, Some(c) if v > c)) {
                return false;
            }
        }
        if let Some(s) = &limits.slack {
            if vals[s.u2].widen() > (s.n as u128) * vals[s.u1].widen() {
                return false;
            }
        }
        true
    };
    let is_goal = |loc: u32, vals: &[V]| query.goal.is_some_and(|g| g(loc, vals));
    let allowed = |loc: u32| query.allowed.is_none_or(|a| a(loc));
    let dead = |loc: u32, vals: &[V]| {
        query.frozen.is_some_and(|f| match &f[loc as usize - 1] {
            None => true,
            Some(cs) => cs.iter().any(|&c| !vals[c].is_zero()),
        })
    };
    let mut stats = SearchStats::default();
    let stop = |mut stats: SearchStats, why: &str, explored: usize| {
        stats.explored = explored;
        stats.elapsed_ms = started.elapsed().as_millis();
        stats.stopped_by = Some(why.to_string());
        Outcome::Stopped(stats)
    };

    let start = query.start as u32;
    if !within(init) || dead(start, init) {
        return Outcome::Done {
            explored: 0,
            overflowed: false,
        };
    }
    arena.push(start, init, u32::MAX);
    table.insert_unique(hash_state(&hasher, start, init), 0, |&i| {
        let (l, v) = arena.state(i as usize);
        hash_state(&hasher, l, v)
    });
    visit(start, init);
    if is_goal(start, init) {
        return Outcome::Found(arena.trace(0));
    }

    let max_states = limits.max_states.unwrap_or(usize::MAX).min(u32::MAX as usize - 1);
    let mut overflowed = false;
    let mut scratch: Vec<V> = Vec::with_capacity(dim);
    let mut head = 0usize;
    let mut level_end = 1usize;
    let mut depth = 0usize;
    while head < arena.len() {
        if head == level_end {
            depth += 1;
            level_end = arena.len();
            stats.depth = depth;
        }
        if let Some(md) = limits.max_depth {
            if depth >= md {
                return stop(stats, "max_depth", arena.len());
            }
        }
        if head.is_multiple_of(4096) {
            if let Some(t) = limits.time {
                if started.elapsed() > t {
                    return stop(stats, "time", arena.len());
                }
            }
        }
        let (loc, _) = arena.state(head);
        for edge in sys.edges(loc as usize) {
            let vals = &arena.values[head * dim..(head + 1) * dim];
            match System::fire(edge, vals, &mut scratch) {
                Ok(()) => {}
                Err(true) => {
                    overflowed = true;
                    continue;
                }
                Err(false) => continue,
            }
            if !within(&scratch) {
                stats.pruned += 1;
                continue;
            }
            let to = edge.to as u32;
            if !allowed(to) {
                continue;
            }
            if dead(to, &scratch) {
                stats.pruned += 1;
                continue;
            }
            let h = hash_state(&hasher, to, &scratch);
            let found = table
                .find(h, |&i| {
                    let (l, v) = arena.state(i as usize);
                    l == to && v == scratch.as_slice()
                })
                .is_some();
            if found {
                continue;
            }
            if arena.len() >= max_states {
                return stop(stats, "max_states", arena.len());
            }
            let idx = arena.len() as u32;
            arena.push(to, &scratch, head as u32);
            table.insert_unique(h, idx, |&i| {
                let (l, v) = arena.state(i as usize);
                hash_state(&hasher, l, v)
            });
            visit(to, &scratch);
            if is_goal(to, &scratch) {
                return Outcome::Found(arena.trace(idx as usize));
            }
        }
        head += 1;
    }
    Outcome::Done {
        explored: arena.len(),
        overflowed,
    }
}

fn narrow_width(init: &[u64], limits: &SearchLimits) -> Width {
    let mut max = init.iter().copied().max().unwrap_or(0) as u128;
    if let Some(caps) = &limits.caps {
        for c in caps.iter().flatten() {
            max = max.max(*c as u128);
        }
    }
    Width::for_max(max).unwrap_or(Width::U64)
}

fn convert<V: CounterValue>(init: &[u64]) -> Vec<V> {
    init.iter().map(|v| V::from_u64(*v).expect("width chosen to fit")).collect()
}

fn run_at<V: CounterValue>(sys: &System, init: &[u64], limits: &SearchLimits) -> Outcome {
    let target = sys.target() as u32;
    let goal = |loc: u32, vals: &[V]| loc == target && vals.iter().all(|v| v.is_zero());
    let frozen = sys.frozen_counters();
    let query = Query {
        start: sys.start(),
        goal: Some(&goal),
        allowed: None,
        frozen: Some(&frozen),
    };
    bfs::<V>(sys, &convert::<V>(init), limits, query, |_, _| {})
}

/// Searches for a run from `(start, init)` to `(target, 0)`.
pub fn zero_reach(sys: &System, init: &[u64], limits: &SearchLimits) -> ReachResult {
    assert_eq!(init.len(), sys.dim(), "initial valuation must cover every counter");
    let mut width = narrow_width(init, limits);
    loop {
        let out = match width {
            Width::U16 => run_at::<u16>(sys, init, limits),
            Width::U32 => run_at::<u32>(sys, init, limits),
            Width::U64 => run_at::<u64>(sys, init, limits),
        };
        match out {
            Outcome::Found(configs) => return ReachResult::Reachable(Run::new(configs)),
            Outcome::Stopped(s) => return ReachResult::LimitExceeded(s),
            Outcome::Done { overflowed, explored } => {
                if !overflowed {
                    return ReachResult::Unreachable {
                        explored,
                        exhaustive: true,
                    };
                }
                width = match width {
                    Width::U16 => Width::U32,
                    Width::U32 => Width::U64,
                    Width::U64 => {
                        return ReachResult::LimitExceeded(SearchStats {
                            explored,
                            stopped_by: Some("value overflow".into()),
                            ..SearchStats::default()
                        })
                    }
                };
            }
        }
    }
}

/// Every configuration reachable from `(start, init)` within the limits.
pub fn reach_set(sys: &System, init: &[u64], limits: &SearchLimits) -> ReachSet {
    let mut configs = Vec::new();
    let query = Query {
        start: sys.start(),
        goal: None,
        allowed: None,
        frozen: None,
    };
    let out = bfs::<u64>(sys, init, limits, query, |l, v| {
        configs.push(Configuration::new(l as usize, v.to_vec()))
    });
    let exhaustive = matches!(out, Outcome::Done { overflowed: false, .. });
    ReachSet { configs, exhaustive }
}

/// Outcome of [`find_path`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathResult {
    Found(Vec<Configuration<u64>>),
    NotFound,
    LimitExceeded(SearchStats),
}

/// Shortest path from `(start, init)` to any configuration satisfying
/// `goal`, visiting only locations accepted by `allowed`. Values are
/// `u64`; blocked overflow is not retried.
pub fn find_path(
    sys: &System,
    start: usize,
    init: &[u64],
    limits: &SearchLimits,
    allowed: &dyn Fn(usize) -> bool,
    goal: &dyn Fn(usize, &[u64]) -> bool,
) -> PathResult {
    let g = |l: u32, v: &[u64]| goal(l as usize, v);
    let a = |l: u32| allowed(l as usize);
    let query = Query {
        start,
        goal: Some(&g),
        allowed: Some(&a),
        frozen: None,
    };
    match bfs::<u64>(sys, init, limits, query, |_, _| {}) {
        Outcome::Found(c) => PathResult::Found(c),
        Outcome::Done { .. } => PathResult::NotFound,
        Outcome::Stopped(s) => PathResult::LimitExceeded(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{is_zero_terminating, parse_program, validate_run, CounterProgram};
    use crate::vass::program_to_vass;

    fn sys(text: &str) -> (CounterProgram<u64>, System) {
        let p = parse_program(text).unwrap();
        let s = System::from(&p);
        (p, s)
    }

    const FIG1: &str = "goto 2 or 4\nx -= 3\ngoto 1\nx += 1\nhalt";

    #[test]
    fn example_program_never_zero_terminates() {
        let (_, s) = sys(FIG1);
        for x in 0..=10 {
            let r = zero_reach(&s, &[x], &SearchLimits::unbounded());
            assert!(matches!(r, ReachResult::Unreachable { exhaustive: true, .. }), "x = {x}");
        }
        let rs = reach_set(&s, &[7], &SearchLimits::unbounded());
        assert!(rs.exhaustive);
        assert_eq!(rs.values_at(5), vec![vec![2], vec![5], vec![8]]);
    }

    #[test]
    fn frozen_counters_prune() {
        let (_, s) = sys("goto 2 or 4\nx += 1\ngoto 1\ny -= 1\nhalt");
        let f = s.frozen_counters();
        assert_eq!(f[0], Some(vec![0]));
        assert_eq!(f[4], Some(vec![0, 1]));
        // x can only grow, so the search stops as soon as it is positive.
        let r = zero_reach(&s, &[0, 1], &SearchLimits::states(100));
        assert!(r.is_reachable());
        assert!(zero_reach(&s, &[1, 1], &SearchLimits::states(100)).is_unreachable());
        let (_, s) = sys("goto 1\nhalt");
        assert_eq!(s.frozen_counters()[0], None);
    }

    #[test]
    fn forced_decrement_certificate() {
        let (p, s) = sys("x -= 1\nhalt");
        match zero_reach(&s, &[1], &SearchLimits::unbounded()) {
            ReachResult::Reachable(run) => {
                assert_eq!(run.len(), 2);
                assert!(validate_run(&p, run.iter()));
                assert!(is_zero_terminating(&p, run.iter()));
            }
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn halt_alone() {
        let (_, s) = sys("halt");
        let rs = reach_set(&s, &[], &SearchLimits::unbounded());
        assert_eq!(rs.configs, vec![Configuration::new(1, vec![])]);
        assert!(zero_reach(&s, &[], &SearchLimits::unbounded()).is_reachable());
    }

    #[test]
    fn limits_are_reported_not_guessed() {
        // Unbounded growth: x stays odd and can be pumped forever.
        let (_, s) = sys("goto 2 or 4\nx += 2\ngoto 1\ngoto 5 or 7\nx -= 2\ngoto 4\nhalt");
        let r = zero_reach(&s, &[1], &SearchLimits::states(50));
        assert!(matches!(r, ReachResult::LimitExceeded(ref st) if st.stopped_by.as_deref() == Some("max_states")));
        let r = zero_reach(
            &s,
            &[1],
            &SearchLimits {
                max_depth: Some(3),
                ..SearchLimits::default()
            },
        );
        assert!(matches!(r, ReachResult::LimitExceeded(_)));
    }

    #[test]
    fn shortest_certificate_is_deterministic() {
        let (p, s) = sys("goto 2 or 4\nx += 1\ngoto 1\ny -= 2\nx -= 2\nhalt");
        let a = zero_reach(&s, &[0, 2], &SearchLimits::states(10_000));
        let b = zero_reach(&s, &[0, 2], &SearchLimits::states(10_000));
        assert_eq!(a, b);
        let ReachResult::Reachable(run) = a else { panic!() };
        assert!(validate_run(&p, run.iter()) && is_zero_terminating(&p, run.iter()));
        assert_eq!(run.len(), 10);
    }

    #[test]
    fn overflow_retries_wider() {
        let (_, s) = sys("x += 60000\nx += 60000\nx -= 60000\nx -= 60000\nhalt");
        assert!(zero_reach(&s, &[0], &SearchLimits::unbounded()).is_reachable());
    }

    #[test]
    fn caps_discard_states() {
        let (_, s) = sys("x += 5\nx -= 5\nhalt");
        let limits = SearchLimits {
            caps: Some(vec![Some(4)]),
            ..SearchLimits::default()
        };
        assert!(zero_reach(&s, &[0], &limits).is_unreachable());
    }

    #[test]
    fn program_and_vass_agree() {
        let text = "goto 2 or 5\nx -= 1\ny += 1\ngoto 1\ngoto 6 or 9\ny -= 1\nz += 2\ngoto 5\nz -= 1\ngoto 9 or 11\nhalt";
        let (p, s) = sys(text);
        let v = System::from(&program_to_vass(&p).unwrap());
        for x in 0..=3 {
            for y in 0..=3 {
                for z in 0..=3 {
                    let a = zero_reach(&s, &[x, y, z], &SearchLimits::states(100_000));
                    let b = zero_reach(&v, &[x, y, z], &SearchLimits::states(100_000));
                    assert_eq!(a.is_reachable(), b.is_reachable());
                    assert!(a.is_reachable() || a.is_unreachable());
                }
            }
        }
    }

    #[test]
    fn zero_test_edges() {
        let (_, s) = sys("zero-test x\nhalt");
        assert!(zero_reach(&s, &[0], &SearchLimits::unbounded()).is_reachable());
        assert!(zero_reach(&s, &[1], &SearchLimits::unbounded()).is_unreachable());
    }
}
