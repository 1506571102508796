//! Structured program fragments and their lowering to counter programs.
//!
//! A [`Block`] is lowered bottom-up through the substitution combinators.
//! Lowering also returns a [`Layout`] recording where every sub-block landed,
//! which the witness walker uses to step through the program.

use indexmap::IndexSet;

use super::hat::HatMap;
use crate::program::{alt, looped, seq_all, CounterProgram, Instruction, ProgramError};

pub const U1: &str = "u1";
pub const U2: &str = "u2";

/// A counter update in a block body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Inc(String, u64),
    Dec(String, u64),
}

impl Op {
    pub fn inc(v: &str) -> Op {
        Op::Inc(v.to_string(), 1)
    }

    pub fn dec(v: &str) -> Op {
        Op::Dec(v.to_string(), 1)
    }
}

/// How the witness walker drives a loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoopPolicy {
    /// Iterate while the body can be completed.
    Maximal,
    /// Iterate until the named counter holds the value supplied by the
    /// walker's chooser.
    Pump(String),
    /// Iterate until the named counter reaches `N`; every iteration must
    /// complete.
    Saturate(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    /// Updates written without hats; lowering mirrors them.
    Leaf(Vec<Op>),
    /// Updates emitted exactly as written.
    Raw(Vec<Op>),
    Seq(Vec<Block>),
    Or(Box<Block>, Box<Block>),
    Loop(Box<Block>, LoopPolicy),
    /// The bounded zero-test gadget on a counter.
    ZeroTest(String),
    /// A program written with explicit gotos and without hats. Each hole
    /// is a `skip` line that is replaced by a lowered block. The witness
    /// walker crosses templates by local search.
    Template {
        program: CounterProgram<u64>,
        holes: Vec<(usize, Block)>,
    },
}

impl Block {
    pub fn leaf(ops: Vec<Op>) -> Block {
        Block::Leaf(ops)
    }

    pub fn seq(parts: Vec<Block>) -> Block {
        Block::Seq(parts)
    }

    pub fn or(a: Block, b: Block) -> Block {
        Block::Or(Box::new(a), Box::new(b))
    }

    pub fn maximal(body: Block) -> Block {
        Block::Loop(Box::new(body), LoopPolicy::Maximal)
    }

    pub fn pump(body: Block, var: &str) -> Block {
        Block::Loop(Box::new(body), LoopPolicy::Pump(var.to_string()))
    }

    pub fn saturate(body: Block, var: &str) -> Block {
        Block::Loop(Box::new(body), LoopPolicy::Saturate(var.to_string()))
    }

    pub fn zero(v: &str) -> Block {
        Block::ZeroTest(v.to_string())
    }

    /// The zero-test gadget spelled out: drain the hat into `v`, move it all
    /// back, and pay two units of `u1`.
    pub fn zero_test_body(v: &str, hats: &HatMap) -> Result<Block, ProgramError> {
        let h = hats
            .twin(v)
            .ok_or_else(|| ProgramError::Substitution {
                line: 0,
                reason: format!("zero test on `{v}` which has no hat twin"),
            })?
            .to_string();
        Ok(Block::Seq(vec![
            Block::maximal(Block::Raw(vec![
                Op::inc(v),
                Op::Dec(h.clone(), 1),
                Op::dec(U2),
            ])),
            Block::maximal(Block::Raw(vec![Op::dec(v), Op::Inc(h, 1), Op::dec(U2)])),
            Block::Raw(vec![Op::Dec(U1.to_string(), 2)]),
        ]))
    }

    /// Counters mentioned, in first-use order (hats not included).
    pub fn counters(&self) -> IndexSet<String> {
        let mut out = IndexSet::new();
        self.collect_counters(&mut out);
        out
    }

    fn collect_counters(&self, out: &mut IndexSet<String>) {
        match self {
            Block::Leaf(ops) | Block::Raw(ops) => {
                for op in ops {
                    let (Op::Inc(v, _) | Op::Dec(v, _)) = op;
                    out.insert(v.clone());
                }
            }
            Block::Seq(bs) => bs.iter().for_each(|b| b.collect_counters(out)),
            Block::Or(a, b) => {
                a.collect_counters(out);
                b.collect_counters(out);
            }
            Block::Loop(b, _) => b.collect_counters(out),
            Block::ZeroTest(v) => {
                out.insert(v.clone());
                out.insert(U1.into());
                out.insert(U2.into());
            }
            Block::Template { program, holes } => {
                out.extend(program.counters().iter().cloned());
                for (_, b) in holes {
                    b.collect_counters(out);
                }
            }
        }
    }
}

/// Where a lowered block sits. `offset` is relative to the parent's first
/// line; `len` counts the block's lines including its terminal line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub offset: usize,
    pub len: usize,
    pub children: Vec<Layout>,
}

impl Layout {
    /// Terminal line of a block starting at `start`.
    pub fn terminal(&self, start: usize) -> usize {
        start + self.len - 1
    }
}

fn ops_program(ops: &[Op]) -> Result<CounterProgram<u64>, ProgramError> {
    let mut counters = IndexSet::new();
    let mut lines = Vec::with_capacity(ops.len() + 1);
    for op in ops {
        let (ins, v) = match op {
            Op::Inc(v, c) => ((true, *c), v),
            Op::Dec(v, c) => ((false, *c), v),
        };
        let counter = counters.insert_full(v.clone()).0;
        lines.push(if ins.0 {
            Instruction::Inc { counter, amount: ins.1 }
        } else {
            Instruction::Dec { counter, amount: ins.1 }
        });
    }
    lines.push(Instruction::Halt);
    CounterProgram::new(counters, lines)
}

/// Lowers a block to a program, mirroring leaf updates on hats.
pub fn lower(block: &Block, hats: &HatMap) -> Result<(CounterProgram<u64>, Layout), ProgramError> {
    let leaf = |p: CounterProgram<u64>| {
        let len = p.len();
        (
            p,
            Layout {
                offset: 0,
                len,
                children: Vec::new(),
            },
        )
    };
    Ok(match block {
        Block::Leaf(ops) => leaf(super::hat::hat_expand_with_map(&ops_program(ops)?, hats)?.0),
        Block::Raw(ops) => leaf(ops_program(ops)?),
        Block::Template { program, holes } => {
            let (mut p, map) = super::hat::hat_expand_with_map(program, hats)?;
            let mut holes: Vec<&(usize, Block)> = holes.iter().collect();
            holes.sort_by_key(|(l, _)| std::cmp::Reverse(*l));
            for (line, b) in holes {
                let (q, _) = lower(b, hats)?;
                p = crate::program::substitute(&p, map[*line], &q)?;
            }
            leaf(p)
        }
        Block::Seq(parts) => {
            let lowered = parts
                .iter()
                .map(|b| lower(b, hats))
                .collect::<Result<Vec<_>, _>>()?;
            let progs: Vec<&CounterProgram<u64>> = lowered.iter().map(|(p, _)| p).collect();
            let p = seq_all(&progs);
            let mut offset = 0;
            let mut children = Vec::with_capacity(lowered.len());
            for (q, mut l) in lowered.into_iter().map(|(q, l)| (q.len(), l)) {
                l.offset = offset;
                offset += q;
                children.push(l);
            }
            let len = p.len();
            (p, Layout { offset: 0, len, children })
        }
        Block::Or(a, b) => {
            let (pa, mut la) = lower(a, hats)?;
            let (pb, mut lb) = lower(b, hats)?;
            la.offset = 1;
            lb.offset = 2 + pa.len();
            let p = alt(&pa, &pb);
            let len = p.len();
            (
                p,
                Layout {
                    offset: 0,
                    len,
                    children: vec![la, lb],
                },
            )
        }
        Block::Loop(body, _) => {
            let (pb, mut lb) = lower(body, hats)?;
            lb.offset = 1;
            let p = looped(&pb);
            let len = p.len();
            (
                p,
                Layout {
                    offset: 0,
                    len,
                    children: vec![lb],
                },
            )
        }
        Block::ZeroTest(v) => {
            let (p, mut l) = lower(&Block::zero_test_body(v, hats)?, hats)?;
            l.offset = 0;
            let len = p.len();
            (
                p,
                Layout {
                    offset: 0,
                    len,
                    children: vec![l],
                },
            )
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::render_program;

    #[test]
    fn leaf_is_hat_expanded_raw_is_not() {
        let hats = HatMap::for_counters(["x"]);
        let (p, l) = lower(&Block::Leaf(vec![Op::inc("x")]), &hats).unwrap();
        assert_eq!(render_program(&p), "counters x, x^\nx += 1\nx^ -= 1\nhalt\n");
        assert_eq!(l.len, 3);
        let (p, _) = lower(&Block::Raw(vec![Op::inc("x")]), &hats).unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn zero_test_shape() {
        let hats = HatMap::for_counters(["v"]);
        let (p, l) = lower(&Block::zero("v"), &hats).unwrap();
        let text = render_program(&p);
        assert_eq!(
            text,
            "counters v, v^, u2, u1\n\
             goto 2 or 7\nv += 1\nv^ -= 1\nu2 -= 1\nskip\ngoto 1\nskip\n\
             goto 9 or 14\nv -= 1\nv^ += 1\nu2 -= 1\nskip\ngoto 8\nskip\n\
             u1 -= 2\nskip\nhalt\n"
        );
        assert_eq!(l.len, p.len());
        // zero test on the hat tests via its twin
        let (q, _) = lower(&Block::zero("v^"), &hats).unwrap();
        assert!(render_program(&q).contains("v^ += 1\nv -= 1"));
        assert!(lower(&Block::zero("w"), &hats).is_err());
    }

    #[test]
    fn layout_offsets_match_skeletons() {
        let hats = HatMap::new();
        let a = Block::Raw(vec![Op::inc("a"), Op::inc("a")]);
        let b = Block::Raw(vec![Op::inc("b")]);
        let (p, l) = lower(&Block::or(a.clone(), b.clone()), &hats).unwrap();
        assert_eq!(p.len(), 3 + 2 + 3);
        assert_eq!((l.children[0].offset, l.children[1].offset), (1, 5));
        let (p, l) = lower(&Block::seq(vec![a.clone(), b.clone(), a.clone()]), &hats).unwrap();
        assert_eq!(p.len(), 3 + 2 + 3 + 1);
        assert_eq!(l.children.iter().map(|c| c.offset).collect::<Vec<_>>(), vec![0, 3, 5]);
        let (p, l) = lower(&Block::maximal(b), &hats).unwrap();
        assert_eq!(p.len(), 2 + 3);
        assert_eq!(l.children[0].offset, 1);
    }
}
