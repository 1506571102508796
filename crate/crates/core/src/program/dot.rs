use std::fmt::Write;

use super::{CounterProgram, Instruction};
use crate::num::CounterValue;

/// Control-flow graph of a program in Graphviz format. Nodes are lines.
pub fn program_to_dot<V: CounterValue>(p: &CounterProgram<V>) -> String {
    let mut out = String::from("digraph program {\n  node [shape=box, fontname=monospace];\n");
    for (i, ins) in p.lines().iter().enumerate() {
        let l = i + 1;
        let label = match ins {
            Instruction::Inc { counter, amount } => format!("{} += {}", p.counter_name(*counter), amount),
            Instruction::Dec { counter, amount } => format!("{} -= {}", p.counter_name(*counter), amount),
            Instruction::Goto(_) => "goto".to_string(),
            Instruction::Skip => "skip".to_string(),
            Instruction::Halt => "halt".to_string(),
            Instruction::ZeroTest(c) => format!("zero-test {}", p.counter_name(*c)),
        };
        let _ = writeln!(out, "  l{l} [label=\"{l}: {}\"];", label.replace('"', "\\\""));
        match ins {
            Instruction::Goto(ts) => {
                for t in ts {
                    let _ = writeln!(out, "  l{l} -> l{t};");
                }
            }
            Instruction::Halt => {}
            _ => {
                let _ = writeln!(out, "  l{l} -> l{};", l + 1);
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;

    #[test]
    fn edges_follow_control_flow() {
        let p = parse_program::<u64>("goto 2 or 4\nx -= 3\ngoto 1\nx += 1\nhalt").unwrap();
        let d = program_to_dot(&p);
        for e in ["l1 -> l2;", "l1 -> l4;", "l2 -> l3;", "l3 -> l1;", "l4 -> l5;"] {
            assert!(d.contains(e), "{e}");
        }
        assert!(!d.contains("l5 ->"));
    }
}
