//! Multivariate integer polynomials.
//!
//! Used for zero-test budgets (univariate in `N`) and for the initial
//! configuration maps of compiled formulas (polynomials in `N` and the free
//! variables).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::ops::{Add, Mul, Sub};

use serde::{Serialize, Serializer};

/// A monomial: variable names with positive exponents, sorted by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(name.to_string(), 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut m: BTreeMap<String, u32> = self.0.iter().cloned().collect();
        for (v, e) in &other.0 {
            *m.entry(v.clone()).or_insert(0) += e;
        }
        Monomial(m.into_iter().collect())
    }
}

/// A polynomial with `i128` coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, i128>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: i128) -> Self {
        let mut p = Poly::zero();
        if c != 0 {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(name: &str) -> Self {
        let mut p = Poly::zero();
        p.terms.insert(Monomial::var(name), 1);
        p
    }

    /// The variable `N`, the segment bound.
    pub fn n() -> Self {
        Poly::var("N")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i128)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, k: i128) -> Poly {
        let mut p = Poly::zero();
        for (m, c) in &self.terms {
            p.insert(m.clone(), c * k);
        }
        p
    }

    fn insert(&mut self, m: Monomial, c: i128) {
        let slot = self.terms.entry(m).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
    }

    /// Evaluates with checked arithmetic; unknown variables evaluate via `env`.
    pub fn eval_with(&self, env: impl Fn(&str) -> Option<i128>) -> Option<i128> {
        let mut total: i128 = 0;
        for (m, c) in &self.terms {
            let mut term = *c;
            for (v, e) in &m.0 {
                let base = env(v)?;
                for _ in 0..*e {
                    term = term.checked_mul(base)?;
                }
            }
            total = total.checked_add(term)?;
        }
        Some(total)
    }

    /// Evaluates a polynomial whose only variable is `N`.
    pub fn eval_n(&self, n: u64) -> Option<i128> {
        self.eval_with(|v| (v == "N").then_some(n as i128))
    }

    /// True if every coefficient is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| *c >= 0)
    }

    /// Coefficientwise domination; implies `self(v) >= other(v)` for all
    /// nonnegative inputs.
    pub fn dominates(&self, other: &Poly) -> bool {
        (self - other).is_nonnegative()
    }

    pub fn variables(&self) -> Vec<String> {
        let mut vs: Vec<String> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.insert(m.clone(), *c);
        }
        p
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.insert(m.clone(), -*c);
        }
        p
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut p = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                p.insert(m1.mul(m2), c1 * c2);
            }
        }
        p
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Monomial, &i128)> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(a.0.cmp(b.0)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if m.0.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsePolyError(pub String);

impl fmt::Display for ParsePolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad polynomial: {}", self.0)
    }
}

impl std::error::Error for ParsePolyError {}

/// Reads the format written by `Display`: `c*a^i*b^j` terms joined by
/// ` + ` and ` - `.
impl FromStr for Poly {
    type Err = ParsePolyError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = || ParsePolyError(text.to_string());
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        let mut out = Poly::zero();
        let mut rest = compact.as_str();
        let mut sign = 1i128;
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        }
        loop {
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let (term, tail) = rest.split_at(end);
            let mut p = Poly::constant(sign);
            for factor in term.split('*') {
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => (b, e.parse::<u32>().map_err(|_| err())?),
                    None => (factor, 1),
                };
                let f = if let Ok(c) = base.parse::<i128>() {
                    Poly::constant(c)
                } else if !base.is_empty() && base.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    Poly::var(base)
                } else {
                    return Err(err());
                };
                p = &p * &f.pow(exp);
            }
            out = out + p;
            if tail.is_empty() {
                return Ok(out);
            }
            sign = if tail.starts_with('-') { -1 } else { 1 };
            rest = &tail[1..];
        }
    }
}
