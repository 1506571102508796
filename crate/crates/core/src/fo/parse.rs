//! Formula syntax.
//!
//! ```text
//! query   := ("free" name ("," name)* ";")? formula
//! formula := quant | or
//! quant   := ("exists" | "forall") name (("<" | "<=") term)? "." formula
//! or      := and ("or" (and | quant))*
//! and     := unary ("and" (unary | quant))*
//! unary   := "not" (unary | quant) | "(" formula ")" | atom
//! atom    := term op term (= | !=) term
//!          | term (= | !=) term (op term)?
//!          | term (< | <= | > | >=) term
//! ```
//! Names starting with `_`, and the names `N`, `u1`, `u2`, are reserved.

use super::ast::{Bound, Cmp, Formula, Quantifier, Query, Rel, Term};
use super::FoError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    Num(u64),
    Sym(&'static str),
}

const SYMBOLS: [&str; 13] = ["!=", "<=", ">=", "+", "*", "=", "<", ">", "(", ")", ".", ",", ";"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FoError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    'outer: while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i].parse().map_err(|_| FoError::Syntax {
                pos: start,
                msg: "number too large".into(),
            })?;
            out.push((Tok::Num(n), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            out.push((Tok::Name(text[start..i].to_string()), start));
            continue;
        }
        for s in SYMBOLS {
            if text[i..].starts_with(s) {
                out.push((Tok::Sym(s), i));
                i += s.len();
                continue 'outer;
            }
        }
        return Err(FoError::Syntax {
            pos: i,
            msg: format!("unexpected character `{c}`"),
        });
    }
    Ok(out)
}

const KEYWORDS: [&str; 5] = ["exists", "forall", "not", "and", "or"];

pub(crate) fn is_reserved(name: &str) -> bool {
    name.starts_with('_') || matches!(name, "N" | "u1" | "u2" | "free") || KEYWORDS.contains(&name)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    scope: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FoError> {
        Err(FoError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Name(n)) if n == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), FoError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn name(&mut self) -> Result<String, FoError> {
        match self.peek() {
            Some(Tok::Name(n)) if !KEYWORDS.contains(&n.as_str()) => {
                let n = n.clone();
                if is_reserved(&n) {
                    return self.err(format!("`{n}` is reserved"));
                }
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected a variable name"),
        }
    }

    fn term(&mut self) -> Result<Term, FoError> {
        if let Some(Tok::Num(n)) = self.peek() {
            let n = *n;
            self.pos += 1;
            return Ok(Term::Const(n));
        }
        let at = self.offset();
        let v = self.name()?;
        if !self.scope.contains(&v) {
            return Err(FoError::Unbound { name: v, pos: at });
        }
        Ok(Term::Var(v))
    }

    fn at_quant(&self) -> bool {
        matches!(self.peek(), Some(Tok::Name(n)) if n == "exists" || n == "forall")
    }

    fn formula(&mut self) -> Result<Formula, FoError> {
        if self.at_quant() {
            self.quant()
        } else {
            self.or()
        }
    }

    fn quant(&mut self) -> Result<Formula, FoError> {
        let q = if self.eat_kw("exists") {
            Quantifier::Exists
        } else if self.eat_kw("forall") {
            Quantifier::ForAll
        } else {
            return self.err("expected a quantifier");
        };
        let v = self.name()?;
        let bound = if self.eat_sym("<") {
            Some(Bound {
                strict: true,
                term: self.term()?,
            })
        } else if self.eat_sym("<=") {
            Some(Bound {
                strict: false,
                term: self.term()?,
            })
        } else {
            None
        };
        self.expect_sym(".")?;
        self.scope.push(v.clone());
        let body = self.formula();
        self.scope.pop();
        Ok(Formula::Quant(q, v, bound, Box::new(body?)))
    }

    fn operand(&mut self, next: fn(&mut Self) -> Result<Formula, FoError>) -> Result<Formula, FoError> {
        if self.at_quant() {
            self.quant()
        } else {
            next(self)
        }
    }

    fn or(&mut self) -> Result<Formula, FoError> {
        let mut f = self.and()?;
        while self.eat_kw("or") {
            let r = self.operand(Self::and)?;
            f = Formula::or(f, r);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, FoError> {
        let mut f = self.unary()?;
        while self.eat_kw("and") {
            let r = self.operand(Self::unary)?;
            f = Formula::and(f, r);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, FoError> {
        if self.eat_kw("not") {
            return Ok(Formula::not(self.operand(Self::unary)?));
        }
        if self.eat_sym("(") {
            let f = self.formula()?;
            self.expect_sym(")")?;
            return Ok(f);
        }
        self.atom()
    }

    fn rel(&mut self) -> Option<Rel> {
        if self.eat_sym("+") {
            Some(Rel::Add)
        } else if self.eat_sym("*") {
            Some(Rel::Mul)
        } else {
            None
        }
    }

    fn eq(&mut self) -> Option<bool> {
        if self.eat_sym("=") {
            Some(true)
        } else if self.eat_sym("!=") {
            Some(false)
        } else {
            None
        }
    }

    fn atom(&mut self) -> Result<Formula, FoError> {
        let a = self.term()?;
        if let Some(rel) = self.rel() {
            let b = self.term()?;
            let Some(positive) = self.eq() else {
                return self.err("expected `=` or `!=`");
            };
            let c = self.term()?;
            return Ok(Formula::lit(rel, a, b, c, positive));
        }
        if let Some(positive) = self.eq() {
            let b = self.term()?;
            if let Some(rel) = self.rel() {
                let c = self.term()?;
                return Ok(Formula::lit(rel, b, c, a, positive));
            }
            return Ok(Formula::Cmp(if positive { Cmp::Eq } else { Cmp::Neq }, a, b));
        }
        for (s, cmp, swap) in [("<", Cmp::Lt, false), ("<=", Cmp::Le, false), (">", Cmp::Lt, true), (">=", Cmp::Le, true)] {
            if self.eat_sym(s) {
                let b = self.term()?;
                return Ok(if swap { Formula::Cmp(cmp, b, a) } else { Formula::Cmp(cmp, a, b) });
            }
        }
        self.err("expected a relation")
    }
}

/// Parses a query. Every variable must be bound or declared free.
pub fn parse_query(text: &str) -> Result<Query, FoError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        end: text.len(),
        scope: Vec::new(),
    };
    let mut free = Vec::new();
    if p.eat_kw("free") {
        loop {
            let v = p.name()?;
            if free.contains(&v) {
                return p.err(format!("`{v}` declared twice"));
            }
            free.push(v);
            if !p.eat_sym(",") {
                break;
            }
        }
        p.expect_sym(";")?;
    }
    p.scope = free.clone();
    let formula = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected input after formula");
    }
    Ok(Query { free, formula })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_shape() {
        let q = parse_query("free x; not(x=0) and not(x=1) and forall y < x. forall z < x. not(x = y*z)").unwrap();
        assert_eq!(q.free, ["x"]);
        let Formula::And(left, right) = &q.formula else {
            panic!("{:?}", q.formula)
        };
        assert!(matches!(**left, Formula::And(..)));
        let Formula::Quant(Quantifier::ForAll, y, Some(b), body) = &**right else {
            panic!()
        };
        assert_eq!((y.as_str(), b.strict), ("y", true));
        let Formula::Quant(_, _, _, inner) = &**body else { panic!() };
        assert_eq!(
            **inner,
            Formula::not(Formula::mul(Term::var("y"), Term::var("z"), Term::var("x")))
        );
    }

    #[test]
    fn atoms() {
        let q = parse_query("free x; exists y. x = y+y").unwrap();
        assert_eq!(
            q.formula,
            Formula::exists("y", Formula::add(Term::var("y"), Term::var("y"), Term::var("x")))
        );
        let q = parse_query("free a, b; a > b or a + 2 != b").unwrap();
        assert_eq!(
            q.formula,
            Formula::or(
                Formula::Cmp(Cmp::Lt, Term::var("b"), Term::var("a")),
                Formula::lit(Rel::Add, Term::var("a"), Term::Const(2), Term::var("b"), false)
            )
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_query("free x; x = y*z"), Err(FoError::Unbound { .. })));
        assert!(matches!(parse_query("exists _t. _t = 0"), Err(FoError::Syntax { .. })));
        assert!(matches!(parse_query("free x; x +"), Err(FoError::Syntax { .. })));
        assert!(matches!(parse_query("free x; x = 1 )"), Err(FoError::Syntax { .. })));
        assert!(matches!(parse_query("free x, x; x = 1"), Err(FoError::Syntax { .. })));
        // a bound variable goes out of scope after its quantifier
        assert!(parse_query("(exists y. y = 0) and y = 1").is_err());
    }

    #[test]
    fn precedence() {
        let q = parse_query("free a, b, c; a = 0 or b = 0 and c = 0").unwrap();
        assert!(matches!(q.formula, Formula::Or(..)));
        let q = parse_query("free a; a = 0 and exists y. y = a or y = 1").unwrap();
        let Formula::And(_, r) = q.formula else { panic!() };
        assert!(matches!(*r, Formula::Quant(..)));
    }

    #[test]
    fn printer_round_trips() {
        for text in [
            "free x; not (x = 0) and not (x = 1) and (forall y < x. forall z < x. not x * y = z)",
            "free a, b, c; (a = 0 or b = 0) and c = 0 or a + b != c",
            "forall y. exists z. y + z = 3 and (exists w <= y. w * w = z)",
            "free x; x = 0 and (x = 1 and x = 2)",
            "free x; not not x < 1",
        ] {
            let q = parse_query(text).unwrap();
            let printed = q.to_string();
            assert_eq!(parse_query(&printed).unwrap(), q, "{printed}");
        }
    }
}
