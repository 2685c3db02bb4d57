use std::fmt;

/// First-order formulas over relation symbols and equality. Terms are variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Atom { rel: String, args: Vec<String> },
    Eq(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall { var: String, sort: Option<String>, body: Box<Formula> },
    Exists { var: String, sort: Option<String>, body: Box<Formula> },
}

impl Formula {
    pub fn atom(rel: &str, args: &[&str]) -> Formula {
        Formula::Atom { rel: rel.into(), args: args.iter().map(|s| s.to_string()).collect() }
    }

    pub fn eq(a: &str, b: &str) -> Formula {
        Formula::Eq(a.into(), b.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Formula) -> Formula {
        Formula::Iff(Box::new(self), Box::new(other))
    }

    pub fn forall(var: &str, body: Formula) -> Formula {
        Formula::Forall { var: var.into(), sort: None, body: Box::new(body) }
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Exists { var: var.into(), sort: None, body: Box::new(body) }
    }

    /// Conjunction of all parts; `true` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::Const(true))
    }

    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::or).unwrap_or(Formula::Const(false))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Const(_) | Formula::Atom { .. } | Formula::Eq(..) => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Forall { .. } | Formula::Exists { .. } => false,
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            let see = |v: &String, bound: &Vec<String>, out: &mut Vec<String>| {
                if !bound.contains(v) && !out.contains(v) {
                    out.push(v.clone());
                }
            };
            match f {
                Formula::Const(_) => {}
                Formula::Atom { args, .. } => args.iter().for_each(|v| see(v, bound, out)),
                Formula::Eq(a, b) => {
                    see(a, bound, out);
                    see(b, bound, out);
                }
                Formula::Not(a) => go(a, bound, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Forall { var, body, .. } | Formula::Exists { var, body, .. } => {
                    bound.push(var.clone());
                    go(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

fn is_infix(rel: &str) -> bool {
    rel == "<"
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(true) => write!(f, "true"),
            Formula::Const(false) => write!(f, "false"),
            Formula::Atom { rel, args } if is_infix(rel) && args.len() == 2 => {
                write!(f, "{} {rel} {}", args[0], args[1])
            }
            Formula::Atom { rel, args } => write!(f, "{rel}({})", args.join(", ")),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(a) => match a.as_ref() {
                Formula::Eq(x, y) => write!(f, "{x} != {y}"),
                a => write!(f, "!{}", Paren(a)),
            },
            Formula::And(a, b) => write!(f, "{} & {}", Paren(a), Paren(b)),
            Formula::Or(a, b) => write!(f, "{} | {}", Paren(a), Paren(b)),
            Formula::Implies(a, b) => write!(f, "{} -> {}", Paren(a), Paren(b)),
            Formula::Iff(a, b) => write!(f, "{} <-> {}", Paren(a), Paren(b)),
            Formula::Forall { var, sort, body } => quant(f, "forall", var, sort, body),
            Formula::Exists { var, sort, body } => quant(f, "exists", var, sort, body),
        }
    }
}

fn quant(f: &mut fmt::Formatter<'_>, q: &str, var: &str, sort: &Option<String>, body: &Formula) -> fmt::Result {
    match sort {
        Some(s) => write!(f, "{q} {var}:{s}. {body}"),
        None => write!(f, "{q} {var}. {body}"),
    }
}

/// Parenthesises anything that is not atomic.
struct Paren<'a>(&'a Formula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::Const(_) | Formula::Atom { .. } | Formula::Eq(..) => write!(f, "{}", self.0),
            Formula::Not(a) if matches!(a.as_ref(), Formula::Eq(..) | Formula::Atom { .. }) => {
                write!(f, "{}", self.0)
            }
            other => write!(f, "({other})"),
        }
    }
}
