//! Brute-force evaluation over `{0, ..., N}`.

use super::ast::{Cmp, Formula, Quantifier, Query, Rel, Term};
use super::FoError;

/// Variable values, innermost binding last.
pub type Env = Vec<(String, u64)>;

fn value(env: &Env, t: &Term) -> u64 {
    match t {
        Term::Const(c) => *c,
        Term::Var(v) => env
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, x)| *x)
            .unwrap_or_else(|| panic!("unbound variable `{v}`")),
    }
}

/// Truth of a single literal. Operands and result must lie in the segment.
pub fn holds(rel: Rel, a: u64, b: u64, c: u64, n: u64) -> bool {
    if a > n || b > n || c > n {
        return false;
    }
    match rel {
        Rel::Add => a + b == c,
        Rel::Mul => a * b == c,
    }
}

/// Evaluates `f` with quantifiers ranging over `0..=n`.
pub fn eval(f: &Formula, n: u64, env: &mut Env) -> bool {
    match f {
        Formula::Lit { rel, args, positive } => {
            let [a, b, c] = [0, 1, 2].map(|i| value(env, &args[i]));
            holds(*rel, a, b, c, n) == *positive
        }
        Formula::Cmp(c, a, b) => {
            let (a, b) = (value(env, a), value(env, b));
            match c {
                Cmp::Eq => a == b,
                Cmp::Neq => a != b,
                Cmp::Lt => a < b,
                Cmp::Le => a <= b,
            }
        }
        Formula::Not(g) => !eval(g, n, env),
        Formula::And(a, b) => eval(a, n, env) && eval(b, n, env),
        Formula::Or(a, b) => eval(a, n, env) || eval(b, n, env),
        Formula::Quant(q, v, bound, body) => {
            let limit = bound.as_ref().map(|b| {
                let t = value(env, &b.term);
                if b.strict {
                    t.checked_sub(1)
                } else {
                    Some(t)
                }
            });
            let top = match limit {
                None => Some(n),
                Some(l) => l.map(|l| l.min(n)),
            };
            let mut range = top.into_iter().flat_map(|t| 0..=t);
            let mut check = |x: u64| {
                env.push((v.clone(), x));
                let r = eval(body, n, env);
                env.pop();
                r
            };
            match q {
                Quantifier::Exists => range.any(&mut check),
                Quantifier::ForAll => range.all(&mut check),
            }
        }
    }
}

pub(crate) fn bind_free(q: &Query, n: u64, values: &[u64]) -> Result<Env, FoError> {
    if values.len() != q.free.len() {
        return Err(FoError::Arity {
            expected: q.free.len(),
            got: values.len(),
        });
    }
    q.free
        .iter()
        .zip(values)
        .map(|(v, &x)| {
            if x > n {
                Err(FoError::OutOfSegment {
                    name: v.clone(),
                    value: x,
                    n,
                })
            } else {
                Ok((v.clone(), x))
            }
        })
        .collect()
}

/// Decides `<{0..N}, +, *> |= q(values)`.
pub fn eval_oracle(q: &Query, n: u64, values: &[u64]) -> Result<bool, FoError> {
    let mut env = bind_free(q, n, values)?;
    Ok(eval(&q.formula, n, &mut env))
}
