//! Text form of counter programs.
//!
//! ```text
//! # comment
//! counters x, y        # optional; if present every counter must be listed
//! goto 2 or 4
//! x -= 3
//! goto 1
//! x += 1
//! halt
//! ```
//!
//! Blank lines, comments and the `counters` directive do not count as
//! program lines.

use indexmap::IndexSet;

use super::{CounterProgram, Instruction, ProgramError};
use crate::num::CounterValue;

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ProgramError {
    ProgramError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

pub(crate) fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '^' | '.')
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn col(&self) -> usize {
        self.src[..self.pos].chars().count() + 1
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == ' ' || c == '\t' || c == '\r' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        if rest.starts_with(kw) && !rest[kw.len()..].starts_with(|c: char| is_name_char(c) || c == '-') {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn name(&mut self) -> Result<String, ProgramError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if is_name_start(c) => self.pos += c.len_utf8(),
            _ => return Err(syntax(self.line, self.col(), "expected counter name")),
        }
        while let Some(c) = self.peek() {
            if is_name_char(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn number<T: std::str::FromStr>(&mut self) -> Result<T, ProgramError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(syntax(self.line, self.col(), "expected a natural number"));
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| syntax(self.line, start + 1, "number out of range"))
    }

    fn finish(&mut self) -> Result<(), ProgramError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(syntax(self.line, self.col(), "unexpected trailing input"))
        }
    }
}

enum RawInstr<V> {
    Inc(String, V),
    Dec(String, V),
    Goto(Vec<usize>),
    Skip,
    Halt,
    ZeroTest(String),
}

/// Parses the text form of a counter program.
pub fn parse_program<V: CounterValue>(text: &str) -> Result<CounterProgram<V>, ProgramError> {
    let mut declared: Option<IndexSet<String>> = None;
    let mut raw: Vec<(usize, RawInstr<V>)> = Vec::new();

    for (i, src_line) in text.lines().enumerate() {
        let lineno = i + 1;
        let code = match src_line.find('#') {
            Some(k) => &src_line[..k],
            None => src_line,
        };
        let mut cur = Cursor {
            src: code,
            pos: 0,
            line: lineno,
        };
        if cur.at_end() {
            continue;
        }
        if cur.keyword("counters") {
            if declared.is_some() {
                return Err(syntax(lineno, 1, "duplicate counters directive"));
            }
            let mut set = IndexSet::new();
            if !cur.at_end() {
                loop {
                    let n = cur.name()?;
                    if !set.insert(n.clone()) {
                        return Err(ProgramError::DuplicateCounter(n));
                    }
                    if !cur.eat(",") {
                        break;
                    }
                }
            }
            cur.finish()?;
            declared = Some(set);
            continue;
        }
        let instr = if cur.keyword("goto") {
            let mut ts = vec![cur.number::<usize>()?];
            while cur.keyword("or") {
                ts.push(cur.number()?);
            }
            RawInstr::Goto(ts)
        } else if cur.keyword("skip") {
            RawInstr::Skip
        } else if cur.keyword("halt") {
            RawInstr::Halt
        } else if cur.eat("zero-test") {
            RawInstr::ZeroTest(cur.name()?)
        } else {
            let name = cur.name()?;
            if cur.eat("+=") {
                RawInstr::Inc(name, cur.number()?)
            } else if cur.eat("-=") || cur.eat("\u{2212}=") {
                RawInstr::Dec(name, cur.number()?)
            } else {
                return Err(syntax(lineno, cur.col(), "expected `+=` or `-=`"));
            }
        };
        cur.finish()?;
        raw.push((lineno, instr));
    }

    let strict = declared.is_some();
    let mut counters = declared.unwrap_or_default();
    let mut resolve = |name: String, src: usize| -> Result<usize, ProgramError> {
        if let Some(i) = counters.get_index_of(&name) {
            Ok(i)
        } else if strict {
            Err(ProgramError::UndeclaredCounter { line: src, name })
        } else {
            Ok(counters.insert_full(name).0)
        }
    };

    let len = raw.len();
    let mut lines = Vec::with_capacity(len);
    for (idx, (src, r)) in raw.into_iter().enumerate() {
        let ins = match r {
            RawInstr::Inc(n, amount) => Instruction::Inc {
                counter: resolve(n, src)?,
                amount,
            },
            RawInstr::Dec(n, amount) => Instruction::Dec {
                counter: resolve(n, src)?,
                amount,
            },
            RawInstr::Goto(ts) => {
                if let Some(&t) = ts.iter().find(|t| **t == 0 || **t > len) {
                    return Err(ProgramError::TargetOutOfRange {
                        line: idx + 1,
                        target: t,
                        len,
                    });
                }
                Instruction::Goto(ts)
            }
            RawInstr::Skip => Instruction::Skip,
            RawInstr::Halt => Instruction::Halt,
            RawInstr::ZeroTest(n) => Instruction::ZeroTest(resolve(n, src)?),
        };
        lines.push(ins);
    }
    CounterProgram::new(counters, lines)
}

/// Renders a program in the text form accepted by [`parse_program`].
pub fn render_program<V: CounterValue>(p: &CounterProgram<V>) -> String {
    let mut out = String::new();
    if !p.counters().is_empty() {
        out.push_str("counters ");
        out.push_str(&p.counters().iter().cloned().collect::<Vec<_>>().join(", "));
        out.push('\n');
    }
    for ins in p.lines() {
        match ins {
            Instruction::Inc { counter, amount } => {
                out.push_str(&format!("{} += {}\n", p.counter_name(*counter), amount))
            }
            Instruction::Dec { counter, amount } => {
                out.push_str(&format!("{} -= {}\n", p.counter_name(*counter), amount))
            }
            Instruction::Goto(ts) => {
                let ts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                out.push_str(&format!("goto {}\n", ts.join(" or ")));
            }
            Instruction::Skip => out.push_str("skip\n"),
            Instruction::Halt => out.push_str("halt\n"),
            Instruction::ZeroTest(c) => out.push_str(&format!("zero-test {}\n", p.counter_name(*c))),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_example_with_unicode_minus() {
        let p: CounterProgram<u64> =
            parse_program("goto 2 or 4\n  x\u{2212}=3\n  goto 1\nx+=1\nhalt").unwrap();
        assert_eq!(p.len(), 5);
        assert_eq!(p.counters().len(), 1);
        assert_eq!(p.line(1), Some(&Instruction::Goto(vec![2, 4])));
        assert_eq!(
            p.line(2),
            Some(&Instruction::Dec {
                counter: 0,
                amount: 3
            })
        );
    }

    #[test]
    fn smallest_program() {
        let p: CounterProgram<u64> = parse_program("halt").unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.counters().is_empty());
    }

    #[test]
    fn goto_out_of_range() {
        let e = parse_program::<u64>("goto 7\nskip\nhalt").unwrap_err();
        assert!(matches!(e, ProgramError::TargetOutOfRange { target: 7, .. }));
    }

    #[test]
    fn undeclared_counter_with_directive() {
        let e = parse_program::<u64>("counters x\ny += 1\nhalt").unwrap_err();
        assert_eq!(
            e,
            ProgramError::UndeclaredCounter {
                line: 2,
                name: "y".into()
            }
        );
    }

    #[test]
    fn halt_misplaced_or_missing() {
        assert_eq!(
            parse_program::<u64>("halt\nskip\nhalt").unwrap_err(),
            ProgramError::MisplacedHalt { line: 1 }
        );
        assert_eq!(parse_program::<u64>("skip").unwrap_err(), ProgramError::MissingHalt);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = parse_program::<u64>("skip\n x *= 2\nhalt").unwrap_err();
        assert_eq!(
            e,
            ProgramError::Syntax {
                line: 2,
                column: 4,
                message: "expected `+=` or `-=`".into()
            }
        );
        assert!(matches!(
            parse_program::<u64>("goto 2 3\nhalt").unwrap_err(),
            ProgramError::Syntax { line: 1, .. }
        ));
    }

    #[test]
    fn comments_and_declared_order() {
        let p: CounterProgram<u64> =
            parse_program("# header\ncounters b, a, c\n\na += 1 # inc\nb -= 2\nhalt\n").unwrap();
        assert_eq!(p.counters().iter().collect::<Vec<_>>(), vec!["b", "a", "c"]);
        assert_eq!(p.len(), 3);
    }

    fn arb_program() -> impl Strategy<Value = CounterProgram<u64>> {
        (1usize..8).prop_flat_map(|n| {
            let instr = prop_oneof![
                (0usize..3, 0u64..5).prop_map(|(c, a)| (0u8, c, a, vec![])),
                (0usize..3, 0u64..5).prop_map(|(c, a)| (1u8, c, a, vec![])),
                proptest::collection::vec(1usize..=n + 1, 1..3).prop_map(|ts| (2u8, 0, 0, ts)),
                Just((3u8, 0, 0, vec![])),
                (0usize..3).prop_map(|c| (4u8, c, 0, vec![])),
            ];
            proptest::collection::vec(instr, n)
        })
        .prop_map(|raw| {
            let names: IndexSet<String> = ["x", "y'", "z^"].iter().map(|s| s.to_string()).collect();
            let mut lines: Vec<Instruction<u64>> = raw
                .into_iter()
                .map(|(k, c, a, ts)| match k {
                    0 => Instruction::Inc { counter: c, amount: a },
                    1 => Instruction::Dec { counter: c, amount: a },
                    2 => Instruction::Goto(ts),
                    3 => Instruction::Skip,
                    _ => Instruction::ZeroTest(c),
                })
                .collect();
            lines.push(Instruction::Halt);
            CounterProgram::new(names, lines).unwrap()
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(p in arb_program()) {
            let text = render_program(&p);
            let q: CounterProgram<u64> = parse_program(&text).unwrap();
            prop_assert_eq!(&q, &p);
            prop_assert_eq!(render_program(&q), text);
        }
    }
}
