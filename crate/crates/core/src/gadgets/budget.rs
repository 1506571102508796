use std::fmt;

use serde::{Serialize, Serializer};

use crate::poly::Poly;

/// An upper bound on the number of zero tests, as a function of `N`.
///
/// Sums and products of polynomials stay polynomials. A maximum collapses
/// to one operand when that operand dominates the others coefficientwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Budget {
    Poly(Poly),
    Max(Vec<Budget>),
    Sum(Vec<Budget>),
    Times(Poly, Box<Budget>),
}

impl Budget {
    pub fn constant(c: i128) -> Budget {
        Budget::Poly(Poly::constant(c))
    }

    pub fn zero() -> Budget {
        Budget::constant(0)
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            Budget::Poly(p) => Some(p),
            _ => None,
        }
    }

    pub fn sum(parts: impl IntoIterator<Item = Budget>) -> Budget {
        let mut poly = Poly::zero();
        let mut rest = Vec::new();
        for b in parts {
            match b {
                Budget::Poly(p) => poly = poly + p,
                Budget::Sum(bs) => rest.extend(bs),
                other => rest.push(other),
            }
        }
        if rest.is_empty() {
            return Budget::Poly(poly);
        }
        if !poly.is_zero() {
            rest.insert(0, Budget::Poly(poly));
        }
        if rest.len() == 1 {
            rest.pop().expect("one element")
        } else {
            Budget::Sum(rest)
        }
    }

    pub fn max(parts: impl IntoIterator<Item = Budget>) -> Budget {
        let mut items: Vec<Budget> = Vec::new();
        for b in parts {
            match b {
                Budget::Max(bs) => items.extend(bs),
                other => items.push(other),
            }
        }
        let mut kept: Vec<Budget> = Vec::new();
        for b in items {
            if let Budget::Poly(p) = &b {
                if kept.iter().any(|k| matches!(k, Budget::Poly(q) if q.dominates(p))) {
                    continue;
                }
                kept.retain(|k| !matches!(k, Budget::Poly(q) if p.dominates(q)));
            } else if kept.contains(&b) {
                continue;
            }
            kept.push(b);
        }
        match kept.len() {
            0 => Budget::zero(),
            1 => kept.pop().expect("one element"),
            _ => Budget::Max(kept),
        }
    }

    pub fn times(factor: Poly, b: Budget) -> Budget {
        match b {
            Budget::Poly(p) => Budget::Poly(&factor * &p),
            other => Budget::Times(factor, Box::new(other)),
        }
    }

    /// A polynomial bound: maxima are replaced by sums.
    pub fn upper_poly(&self) -> Poly {
        match self {
            Budget::Poly(p) => p.clone(),
            Budget::Max(bs) | Budget::Sum(bs) => bs.iter().fold(Poly::zero(), |acc, b| acc + b.upper_poly()),
            Budget::Times(f, b) => f * &b.upper_poly(),
        }
    }

    pub fn eval(&self, n: u64) -> Option<i128> {
        match self {
            Budget::Poly(p) => p.eval_n(n),
            Budget::Max(bs) => bs.iter().map(|b| b.eval(n)).try_fold(0i128, |m, v| Some(m.max(v?))),
            Budget::Sum(bs) => bs.iter().map(|b| b.eval(n)).try_fold(0i128, |s, v| s.checked_add(v?)),
            Budget::Times(f, b) => f.eval_n(n)?.checked_mul(b.eval(n)?),
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |bs: &[Budget], sep: &str| bs.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(sep);
        match self {
            Budget::Poly(p) => write!(f, "{p}"),
            Budget::Max(bs) => write!(f, "max({})", join(bs, ", ")),
            Budget::Sum(bs) => write!(f, "{}", join(bs, " + ")),
            Budget::Times(p, b) => write!(f, "({p})*({b})"),
        }
    }
}

impl Serialize for Budget {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_collapses_when_dominated() {
        assert_eq!(Budget::max([Budget::constant(12), Budget::constant(11)]), Budget::constant(12));
        assert_eq!(Budget::max([Budget::constant(3), Budget::constant(3)]), Budget::constant(3));
        let two_n = Budget::Poly(Poly::n().scale(2));
        let m = Budget::max([two_n.clone(), Budget::constant(5)]);
        assert_eq!(m.to_string(), "max(2*N, 5)");
        assert_eq!(m.eval(1), Some(5));
        assert_eq!(m.eval(4), Some(8));
    }

    #[test]
    fn sums_and_products() {
        let s = Budget::sum([Budget::constant(3), Budget::constant(3)]);
        assert_eq!(s, Budget::constant(6));
        assert_eq!(Budget::sum(Vec::new()), Budget::zero());
        let t = Budget::times(Poly::n() + Poly::constant(1), Budget::constant(12));
        assert_eq!(t.to_string(), "12*N + 12");
    }
}
