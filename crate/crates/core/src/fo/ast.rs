use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(u64),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// The two ternary relations: `a + b = c` and `a * b = c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Add,
    Mul,
}

/// Comparisons, removed by [`desugar`](super::desugar).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cmp {
    Eq,
    Neq,
    Lt,
    Le,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    ForAll,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Exists => Quantifier::ForAll,
            Quantifier::ForAll => Quantifier::Exists,
        }
    }
}

/// `v < term` (strict) or `v <= term` restricting a quantifier.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bound {
    pub strict: bool,
    pub term: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `args[0] (+|*) args[1] = args[2]`, or its negation when `positive`
    /// is false.
    Lit {
        rel: Rel,
        args: [Term; 3],
        positive: bool,
    },
    Cmp(Cmp, Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Quant(Quantifier, String, Option<Bound>, Box<Formula>),
}

impl Formula {
    pub fn lit(rel: Rel, a: Term, b: Term, c: Term, positive: bool) -> Formula {
        Formula::Lit {
            rel,
            args: [a, b, c],
            positive,
        }
    }

    pub fn add(a: Term, b: Term, c: Term) -> Formula {
        Formula::lit(Rel::Add, a, b, c, true)
    }

    pub fn mul(a: Term, b: Term, c: Term) -> Formula {
        Formula::lit(Rel::Mul, a, b, c, true)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Quant(Quantifier::Exists, v.to_string(), None, Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::Quant(Quantifier::ForAll, v.to_string(), None, Box::new(body))
    }

    /// Number of `Lit` occurrences.
    pub fn literal_count(&self) -> usize {
        match self {
            Formula::Lit { .. } => 1,
            Formula::Cmp(..) => 0,
            Formula::Not(f) | Formula::Quant(_, _, _, f) => f.literal_count(),
            Formula::And(a, b) | Formula::Or(a, b) => a.literal_count() + b.literal_count(),
        }
    }

    /// Constants mentioned anywhere, including in quantifier bounds.
    pub fn constants(&self, out: &mut Vec<u64>) {
        let mut term = |t: &Term| {
            if let Term::Const(c) = t {
                if !out.contains(c) {
                    out.push(*c);
                }
            }
        };
        match self {
            Formula::Lit { args, .. } => args.iter().for_each(&mut term),
            Formula::Cmp(_, a, b) => {
                term(a);
                term(b);
            }
            Formula::Not(f) => f.constants(out),
            Formula::Quant(_, _, bound, f) => {
                if let Some(b) = bound {
                    term(&b.term);
                }
                f.constants(out);
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.constants(out);
                b.constants(out);
            }
        }
    }

    /// Every variable name, bound or free.
    pub fn names(&self, out: &mut Vec<String>) {
        let mut term = |t: &Term| {
            if let Term::Var(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        };
        match self {
            Formula::Lit { args, .. } => args.iter().for_each(&mut term),
            Formula::Cmp(_, a, b) => {
                term(a);
                term(b);
            }
            Formula::Not(f) => f.names(out),
            Formula::Quant(_, v, bound, f) => {
                if let Some(b) = bound {
                    term(&b.term);
                }
                if !out.contains(v) {
                    out.push(v.clone());
                }
                f.names(out);
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.names(out);
                b.names(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Quant(..) => 0,
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            _ => 3,
        }
    }
}

struct Prec<'a>(&'a Formula, u8);

impl fmt::Display for Prec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.precedence() < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Lit { rel, args, positive } => {
                let op = match rel {
                    Rel::Add => '+',
                    Rel::Mul => '*',
                };
                let eq = if *positive { "=" } else { "!=" };
                write!(f, "{} {op} {} {eq} {}", args[0], args[1], args[2])
            }
            Formula::Cmp(c, a, b) => {
                let op = match c {
                    Cmp::Eq => "=",
                    Cmp::Neq => "!=",
                    Cmp::Lt => "<",
                    Cmp::Le => "<=",
                };
                write!(f, "{a} {op} {b}")
            }
            Formula::Not(g) => write!(f, "not {}", Prec(g, 3)),
            Formula::And(a, b) => write!(f, "{} and {}", Prec(a, 2), Prec(b, 3)),
            Formula::Or(a, b) => write!(f, "{} or {}", Prec(a, 1), Prec(b, 2)),
            Formula::Quant(q, v, bound, body) => {
                let q = match q {
                    Quantifier::Exists => "exists",
                    Quantifier::ForAll => "forall",
                };
                write!(f, "{q} {v}")?;
                if let Some(b) = bound {
                    write!(f, " {} {}", if b.strict { "<" } else { "<=" }, b.term)?;
                }
                write!(f, ". {body}")
            }
        }
    }
}

/// A formula together with its declared free variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Query {
    pub free: Vec<String>,
    pub formula: Formula,
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.free.is_empty() {
            write!(f, "free {}; ", self.free.join(", "))?;
        }
        write!(f, "{}", self.formula)
    }
}
