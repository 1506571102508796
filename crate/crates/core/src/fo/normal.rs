//! Desugaring and prenex normal form.

use super::ast::{Bound, Cmp, Formula, Quantifier, Query, Rel, Term};

struct Fresh {
    used: Vec<String>,
}

impl Fresh {
    fn new(q: &Query) -> Self {
        let mut used = q.free.clone();
        q.formula.names(&mut used);
        Fresh { used }
    }

    fn name(&mut self, base: &str) -> String {
        let mut k = 1;
        loop {
            let cand = format!("{base}{k}");
            if !self.used.contains(&cand) {
                self.used.push(cand.clone());
                return cand;
            }
            k += 1;
        }
    }
}

fn zero() -> Term {
    Term::Const(0)
}

fn cmp(fresh: &mut Fresh, c: Cmp, a: Term, b: Term) -> Formula {
    match c {
        Cmp::Eq => Formula::add(a, zero(), b),
        Cmp::Neq => Formula::lit(Rel::Add, a, zero(), b, false),
        Cmp::Lt => {
            let d = fresh.name("d");
            Formula::exists(
                &d,
                Formula::and(
                    Formula::add(a.clone(), Term::Var(d.clone()), b.clone()),
                    Formula::lit(Rel::Add, a, zero(), b, false),
                ),
            )
        }
        Cmp::Le => {
            let d = fresh.name("d");
            Formula::exists(&d, Formula::add(a, Term::Var(d.clone()), b))
        }
    }
}

fn bound_cmp(v: &str, b: &Bound) -> Formula {
    Formula::Cmp(if b.strict { Cmp::Lt } else { Cmp::Le }, Term::var(v), b.term.clone())
}

fn desugar_in(fresh: &mut Fresh, f: &Formula) -> Formula {
    match f {
        Formula::Lit { .. } => f.clone(),
        Formula::Cmp(c, a, b) => cmp(fresh, *c, a.clone(), b.clone()),
        Formula::Not(g) => Formula::not(desugar_in(fresh, g)),
        Formula::And(a, b) => Formula::and(desugar_in(fresh, a), desugar_in(fresh, b)),
        Formula::Or(a, b) => Formula::or(desugar_in(fresh, a), desugar_in(fresh, b)),
        Formula::Quant(q, v, bound, body) => {
            let body = match bound {
                None => (**body).clone(),
                Some(b) => match q {
                    Quantifier::ForAll => Formula::or(Formula::not(bound_cmp(v, b)), (**body).clone()),
                    Quantifier::Exists => Formula::and(bound_cmp(v, b), (**body).clone()),
                },
            };
            Formula::Quant(*q, v.clone(), None, Box::new(desugar_in(fresh, &body)))
        }
    }
}

/// Rewrites comparisons and bounded quantifiers into `+`/`*` literals.
/// `0` stands for the constant-zero counter.
pub fn desugar(q: &Query) -> Query {
    let mut fresh = Fresh::new(q);
    Query {
        free: q.free.clone(),
        formula: desugar_in(&mut fresh, &q.formula),
    }
}

/// Pushes negations down to literals. Expects a sugar-free formula.
pub fn nnf(f: &Formula) -> Formula {
    fn go(f: &Formula, neg: bool) -> Formula {
        match f {
            Formula::Lit { rel, args, positive } => Formula::Lit {
                rel: *rel,
                args: args.clone(),
                positive: *positive != neg,
            },
            Formula::Cmp(..) => {
                if neg {
                    Formula::not(f.clone())
                } else {
                    f.clone()
                }
            }
            Formula::Not(g) => go(g, !neg),
            Formula::And(a, b) if neg => Formula::or(go(a, true), go(b, true)),
            Formula::Or(a, b) if neg => Formula::and(go(a, true), go(b, true)),
            Formula::And(a, b) => Formula::and(go(a, false), go(b, false)),
            Formula::Or(a, b) => Formula::or(go(a, false), go(b, false)),
            Formula::Quant(q, v, bound, body) => {
                let q = if neg { q.dual() } else { *q };
                Formula::Quant(q, v.clone(), bound.clone(), Box::new(go(body, neg)))
            }
        }
    }
    go(f, false)
}

fn rename(f: &Formula, from: &str, to: &str) -> Formula {
    let t = |x: &Term| match x {
        Term::Var(v) if v == from => Term::var(to),
        _ => x.clone(),
    };
    match f {
        Formula::Lit { rel, args, positive } => Formula::Lit {
            rel: *rel,
            args: [t(&args[0]), t(&args[1]), t(&args[2])],
            positive: *positive,
        },
        Formula::Cmp(c, a, b) => Formula::Cmp(*c, t(a), t(b)),
        Formula::Not(g) => Formula::not(rename(g, from, to)),
        Formula::And(a, b) => Formula::and(rename(a, from, to), rename(b, from, to)),
        Formula::Or(a, b) => Formula::or(rename(a, from, to), rename(b, from, to)),
        Formula::Quant(q, v, bound, body) => {
            let bound = bound.as_ref().map(|b| Bound {
                strict: b.strict,
                term: t(&b.term),
            });
            if v == from {
                Formula::Quant(*q, v.clone(), bound, body.clone())
            } else {
                Formula::Quant(*q, v.clone(), bound, Box::new(rename(body, from, to)))
            }
        }
    }
}

/// The quantifier prefix of a prenex formula and its matrix.
pub fn split_prefix(f: &Formula) -> (Vec<(Quantifier, String)>, &Formula) {
    let mut prefix = Vec::new();
    let mut cur = f;
    while let Formula::Quant(q, v, None, body) = cur {
        prefix.push((*q, v.clone()));
        cur = body;
    }
    (prefix, cur)
}

fn rebuild(prefix: &[(Quantifier, String)], matrix: Formula) -> Formula {
    prefix
        .iter()
        .rev()
        .fold(matrix, |f, (q, v)| Formula::Quant(*q, v.clone(), None, Box::new(f)))
}

fn prenex_in(fresh: &mut Fresh, bound: &mut Vec<String>, f: &Formula) -> (Vec<(Quantifier, String)>, Formula) {
    match f {
        Formula::Quant(q, v, _, body) => {
            let (name, body) = if bound.contains(v) {
                let n = fresh.name(v);
                let b = rename(body, v, &n);
                (n, b)
            } else {
                (v.clone(), (**body).clone())
            };
            bound.push(name.clone());
            let (mut prefix, matrix) = prenex_in(fresh, bound, &body);
            prefix.insert(0, (*q, name));
            (prefix, matrix)
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let (mut pa, ma) = prenex_in(fresh, bound, a);
            let (pb, mb) = prenex_in(fresh, bound, b);
            pa.extend(pb);
            let m = if matches!(f, Formula::And(..)) {
                Formula::and(ma, mb)
            } else {
                Formula::or(ma, mb)
            };
            (pa, m)
        }
        _ => (Vec::new(), f.clone()),
    }
}

/// Negation normal form with all quantifiers pulled to the front, left
/// to right in order of occurrence. A bound variable whose name is already
/// taken (free, or bound earlier) is renamed apart. Expects a sugar-free
/// query.
pub fn prenex_nnf(q: &Query) -> Query {
    let mut fresh = Fresh::new(q);
    let mut bound = q.free.clone();
    let (prefix, matrix) = prenex_in(&mut fresh, &mut bound, &nnf(&q.formula));
    Query {
        free: q.free.clone(),
        formula: rebuild(&prefix, matrix),
    }
}

/// Desugars and normalizes.
pub fn normalize(q: &Query) -> Query {
    prenex_nnf(&desugar(q))
}

/// True for prenex, sugar-free formulas with negation only on literals.
pub fn is_normalized(f: &Formula) -> bool {
    fn matrix_ok(f: &Formula) -> bool {
        match f {
            Formula::Lit { .. } => true,
            Formula::And(a, b) | Formula::Or(a, b) => matrix_ok(a) && matrix_ok(b),
            _ => false,
        }
    }
    let mut cur = f;
    while let Formula::Quant(_, _, bound, body) = cur {
        if bound.is_some() {
            return false;
        }
        cur = body;
    }
    matrix_ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fo::parse_query;

    fn norm(text: &str) -> Query {
        normalize(&parse_query(text).unwrap())
    }

    #[test]
    fn equality_uses_zero() {
        let q = desugar(&parse_query("free x, y; x = y").unwrap());
        assert_eq!(q.formula, Formula::add(Term::var("x"), Term::Const(0), Term::var("y")));
        let plain = parse_query("free x; exists y. y + y = x").unwrap();
        assert_eq!(desugar(&plain), plain);
    }

    #[test]
    fn negated_exists_becomes_forall() {
        let q = norm("free x; not exists y. y + y = x");
        assert_eq!(
            q.formula,
            Formula::forall("y", Formula::lit(Rel::Add, Term::var("y"), Term::var("y"), Term::var("x"), false))
        );
        assert!(is_normalized(&q.formula));
    }

    #[test]
    fn renames_apart() {
        let q = norm("free x; (exists y. y + y = x) and (exists y. y * y = x)");
        let (prefix, matrix) = split_prefix(&q.formula);
        assert_eq!(prefix, [(Quantifier::Exists, "y".to_string()), (Quantifier::Exists, "y1".to_string())]);
        assert_eq!(
            *matrix,
            Formula::and(
                Formula::add(Term::var("y"), Term::var("y"), Term::var("x")),
                Formula::mul(Term::var("y1"), Term::var("y1"), Term::var("x"))
            )
        );
    }

    #[test]
    fn prenex_input_unchanged() {
        let q = parse_query("free x; forall y. exists z. y + z = x or x * y != z").unwrap();
        assert_eq!(prenex_nnf(&q), q);
    }

    #[test]
    fn bounded_quantifiers_unfold() {
        let q = norm("free x; forall y < x. y * y != x");
        assert!(is_normalized(&q.formula));
        let (prefix, _) = split_prefix(&q.formula);
        // y, then the witness of y < x turned universal by the negation
        assert_eq!(prefix.len(), 2);
        assert_eq!(prefix[1].0, Quantifier::ForAll);
    }
}
