//! Substitution of one program into a `skip` line of another, and the
//! sequencing, choice and loop combinators built on it.

use indexmap::IndexSet;

use super::{CounterProgram, Instruction, ProgramError};
use crate::num::CounterValue;

/// Replaces line `k` (which must be `skip`) of `c1` by the body of `c2`.
///
/// The result has `len(c1) + len(c2) - 1` lines. The halt of `c2` becomes
/// `skip`, so control falls through to the old line `k + 1`. Counters are
/// matched by name; the counters of `c1` come first.
pub fn substitute<V: CounterValue>(
    c1: &CounterProgram<V>,
    k: usize,
    c2: &CounterProgram<V>,
) -> Result<CounterProgram<V>, ProgramError> {
    let m1 = c1.len();
    let m2 = c2.len();
    if k == 0 || k >= m1 {
        return Err(ProgramError::Substitution {
            line: k,
            reason: format!("line must be in 1..={}", m1 - 1),
        });
    }
    if c1.line(k) != Some(&Instruction::Skip) {
        return Err(ProgramError::Substitution {
            line: k,
            reason: "line is not skip".into(),
        });
    }

    let mut counters: IndexSet<String> = c1.counters().clone();
    let remap2: Vec<usize> = c2
        .counters()
        .iter()
        .map(|c| counters.insert_full(c.clone()).0)
        .collect();

    let shift1 = |j: usize| if j > k { j + m2 - 1 } else { j };
    let mut lines = Vec::with_capacity(m1 + m2 - 1);
    lines.extend(c1.lines[..k - 1].iter().cloned().map(|i| i.map_targets(shift1)));
    lines.extend(c2.lines.iter().cloned().map(|i| match i {
        Instruction::Halt => Instruction::Skip,
        other => other.map_counter(|c| remap2[c]).map_targets(|j| j + k - 1),
    }));
    lines.extend(c1.lines[k..].iter().cloned().map(|i| i.map_targets(shift1)));
    CounterProgram::new(counters, lines)
}

fn skeleton<V: CounterValue>(lines: Vec<Instruction<V>>) -> CounterProgram<V> {
    CounterProgram::new(IndexSet::new(), lines).expect("valid skeleton")
}

/// `c1 ; c2`.
pub fn seq<V: CounterValue>(c1: &CounterProgram<V>, c2: &CounterProgram<V>) -> CounterProgram<V> {
    seq_all(&[c1, c2])
}

/// Sequential composition of any number of programs.
pub fn seq_all<V: CounterValue>(parts: &[&CounterProgram<V>]) -> CounterProgram<V> {
    let mut lines = vec![Instruction::Skip; parts.len()];
    lines.push(Instruction::Halt);
    let mut p = skeleton(lines);
    let mut at = 1;
    for c in parts {
        p = substitute(&p, at, c).expect("skip line");
        at += c.len();
    }
    p
}

/// Nondeterministic choice between `c1` and `c2`.
///
/// ```text
/// 1 goto 2 or 4
/// 2 c1
/// 3 goto 5
/// 4 c2
/// 5 halt
/// ```
pub fn alt<V: CounterValue>(c1: &CounterProgram<V>, c2: &CounterProgram<V>) -> CounterProgram<V> {
    let p = skeleton(vec![
        Instruction::Goto(vec![2, 4]),
        Instruction::Skip,
        Instruction::Goto(vec![5]),
        Instruction::Skip,
        Instruction::Halt,
    ]);
    let p = substitute(&p, 2, c1).expect("skip line");
    substitute(&p, 3 + c1.len(), c2).expect("skip line")
}

/// Zero or more iterations of `c`.
///
/// ```text
/// 1 goto 2 or 4
/// 2 c
/// 3 goto 1
/// 4 halt
/// ```
pub fn looped<V: CounterValue>(c: &CounterProgram<V>) -> CounterProgram<V> {
    let p = skeleton(vec![
        Instruction::Goto(vec![2, 4]),
        Instruction::Skip,
        Instruction::Goto(vec![1]),
        Instruction::Halt,
    ]);
    substitute(&p, 2, c).expect("skip line")
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeSet, VecDeque};

    use super::*;
    use crate::program::{parse_program, render_program, successors, Configuration};
    use proptest::prelude::*;

    fn p(text: &str) -> CounterProgram<u64> {
        parse_program(text).unwrap()
    }

    /// Reachable (line, values) set with all values capped at `cap`.
    fn reach(prog: &CounterProgram<u64>, start: Vec<u64>, cap: u64) -> BTreeSet<Configuration<u64>> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        let s = Configuration::new(1, start);
        seen.insert(s.clone());
        queue.push_back(s);
        while let Some(c) = queue.pop_front() {
            for n in successors(prog, &c) {
                if n.values.iter().all(|v| *v <= cap) && seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    fn halting_values(prog: &CounterProgram<u64>, start: Vec<u64>, cap: u64) -> BTreeSet<Vec<u64>> {
        reach(prog, start, cap)
            .into_iter()
            .filter(|c| c.line == prog.halt_line())
            .map(|c| c.values)
            .collect()
    }

    #[test]
    fn line_count() {
        let c1 = p("skip\nskip\nhalt");
        let c2 = p("x += 1\nhalt");
        let r = substitute(&c1, 2, &c2).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(render_program(&r), "counters x\nskip\nx += 1\nskip\nhalt\n");
    }

    #[test]
    fn halt_only_is_identity() {
        let c1 = p("x += 1\nskip\ngoto 1 or 4\nhalt");
        let r = substitute(&c1, 2, &CounterProgram::halt()).unwrap();
        assert_eq!(r, c1);
    }

    #[test]
    fn rejects_bad_lines() {
        let c1 = p("x += 1\nskip\nhalt");
        assert!(substitute(&c1, 1, &CounterProgram::halt()).is_err());
        assert!(substitute(&c1, 3, &CounterProgram::halt()).is_err());
        assert!(substitute(&c1, 0, &CounterProgram::halt()).is_err());
    }

    #[test]
    fn targets_rebased() {
        let c1 = p("goto 2 or 3\nskip\nx += 1\ngoto 1\nhalt");
        let c2 = p("goto 2\ny -= 1\nhalt");
        let r = substitute(&c1, 2, &c2).unwrap();
        assert_eq!(
            render_program(&r),
            "counters x, y\ngoto 2 or 5\ngoto 3\ny -= 1\nskip\nx += 1\ngoto 1\nhalt\n"
        );
    }

    #[test]
    fn loop_then_increment_matches_example() {
        let fig1 = p("goto 2 or 4\nx -= 3\ngoto 1\nx += 1\nhalt");
        let built = seq(&looped(&p("x -= 3\nhalt")), &p("x += 1\nhalt"));
        for x in 0..=12 {
            assert_eq!(
                halting_values(&built, vec![x], 20),
                halting_values(&fig1, vec![x], 20),
                "x = {x}"
            );
        }
        assert_eq!(halting_values(&built, vec![7], 20), [vec![2], vec![5], vec![8]].into());
    }

    #[test]
    fn loop_can_skip_body() {
        let l = looped(&p("x -= 1\nhalt"));
        assert!(halting_values(&l, vec![0], 3).contains(&vec![0]));
        assert_eq!(l.len(), 5);
    }

    #[test]
    fn alt_of_same_program() {
        let c = p("x += 1\ny -= 1\nhalt");
        let a = alt(&c, &c);
        let s = seq(&CounterProgram::halt(), &c);
        assert_eq!(a.len(), 2 * c.len() + 3);
        for x in 0..=3 {
            for y in 0..=3 {
                assert_eq!(halting_values(&a, vec![x, y], 4), halting_values(&s, vec![x, y], 4));
            }
        }
    }

    #[test]
    fn seq_all_lengths() {
        let c = p("x += 1\nhalt");
        let s = seq_all(&[&c, &c, &c]);
        assert_eq!(s.len(), 3 * 2 + 1);
        assert_eq!(halting_values(&s, vec![0], 5), [vec![3]].into());
    }

    // Hand inlining through an explicit jump table, independent of the
    // shifting arithmetic in `substitute`.
    fn inline_by_hand(
        c1: &CounterProgram<u64>,
        k: usize,
        c2: &CounterProgram<u64>,
    ) -> CounterProgram<u64> {
        let mut pos1 = vec![0usize; c1.len() + 1];
        let mut pos2 = vec![0usize; c2.len() + 1];
        let mut next = 1;
        for l in 1..=c1.len() {
            if l == k {
                for (m, slot) in pos2.iter_mut().enumerate().skip(1) {
                    *slot = next + m - 1;
                }
                pos1[l] = next;
                next += c2.len();
            } else {
                pos1[l] = next;
                next += 1;
            }
        }
        let names: IndexSet<String> = c1.counters().iter().chain(c2.counters()).cloned().collect();
        let idx = |prog: &CounterProgram<u64>, c: usize| names.get_index_of(prog.counter_name(c)).unwrap();
        let conv = |prog: &CounterProgram<u64>, ins: &Instruction<u64>, pos: &[usize]| match ins {
            Instruction::Inc { counter, amount } => Instruction::Inc {
                counter: idx(prog, *counter),
                amount: *amount,
            },
            Instruction::Dec { counter, amount } => Instruction::Dec {
                counter: idx(prog, *counter),
                amount: *amount,
            },
            Instruction::ZeroTest(c) => Instruction::ZeroTest(idx(prog, *c)),
            Instruction::Goto(ts) => Instruction::Goto(ts.iter().map(|t| pos[*t]).collect()),
            Instruction::Skip => Instruction::Skip,
            Instruction::Halt => Instruction::Halt,
        };
        let mut lines = Vec::new();
        for l in 1..=c1.len() {
            if l == k {
                for ins in c2.lines() {
                    lines.push(match ins {
                        Instruction::Halt => Instruction::Skip,
                        i => conv(c2, i, &pos2),
                    });
                }
            } else {
                lines.push(conv(c1, c1.line(l).unwrap(), &pos1));
            }
        }
        CounterProgram::new(names, lines).unwrap()
    }

    fn arb_fragment(with_skip: bool) -> impl Strategy<Value = CounterProgram<u64>> {
        (2usize..=6).prop_flat_map(move |n| {
            let body = n - 1;
            let ins = prop_oneof![
                (0usize..2, 1u64..3).prop_map(|(c, a)| (0u8, c, a, vec![])),
                (0usize..2, 1u64..3).prop_map(|(c, a)| (1u8, c, a, vec![])),
                proptest::collection::vec(1usize..=n, 1..3).prop_map(|t| (2u8, 0, 0, t)),
                Just((3u8, 0, 0, vec![])),
            ];
            (proptest::collection::vec(ins, body), 0..body)
        })
        .prop_map(move |(raw, skip_at)| {
            let mut lines: Vec<Instruction<u64>> = raw
                .into_iter()
                .map(|(k, c, a, t)| match k {
                    0 => Instruction::Inc { counter: c, amount: a },
                    1 => Instruction::Dec { counter: c, amount: a },
                    2 => Instruction::Goto(t),
                    _ => Instruction::Skip,
                })
                .collect();
            if with_skip {
                lines[skip_at] = Instruction::Skip;
            }
            lines.push(Instruction::Halt);
            let names = if with_skip { ["x", "y"] } else { ["y", "z"] };
            CounterProgram::new(names.iter().map(|s| s.to_string()).collect(), lines).unwrap()
        })
    }

    proptest! {
        #[test]
        fn substitution_matches_hand_inlining(
            c1 in arb_fragment(true),
            c2 in arb_fragment(false),
            x in 0u64..=3, y in 0u64..=3, z in 0u64..=3,
        ) {
            let k = (1..c1.len()).find(|l| c1.line(*l) == Some(&Instruction::Skip)).unwrap();
            let got = substitute(&c1, k, &c2).unwrap();
            let want = inline_by_hand(&c1, k, &c2);
            prop_assert_eq!(got.counters(), want.counters());
            prop_assert_eq!(reach(&got, vec![x, y, z], 3), reach(&want, vec![x, y, z], 3));
        }
    }
}
