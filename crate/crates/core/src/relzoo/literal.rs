//! One-variable literal systems over a cyclically ordered D-relation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::Structure;

/// The system
/// `{CO(a,x,b) : (a,b) in P} + {D(a,b;c,x) : L} + {D(x,a;b,c) : R} + {x != a : Q}`,
/// optionally with equations `x = a`.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct LiteralSystem {
    #[serde(default)]
    pub p: Vec<(usize, usize)>,
    #[serde(default)]
    pub l: Vec<(usize, usize, usize)>,
    #[serde(default)]
    pub r: Vec<(usize, usize, usize)>,
    #[serde(default)]
    pub q: Vec<usize>,
    #[serde(default)]
    pub eq: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LiteralReport {
    /// Least solution of the whole system.
    pub solution: Option<usize>,
    /// Least solution of the cyclic-order part with the inequations.
    pub reduced_solution: Option<usize>,
    /// The density criterion on `P`: `b != a'` and not `CO(a,b,a') & CO(b,a',b')`.
    pub density_criterion: bool,
    /// Whether dropping the D-literals preserved solvability here.
    pub reduction_agrees: bool,
    /// Whether the density criterion predicted solvability of the reduced system.
    pub criterion_agrees: bool,
}

pub fn solve_literal_system(m: &Structure, s: &LiteralSystem) -> Result<LiteralReport> {
    let d = m.rel_index("D")?;
    let co = m.rel_index("CO")?;
    let n = m.len();
    let mut params: Vec<usize> = Vec::new();
    for &(a, b) in &s.p {
        params.extend([a, b]);
    }
    for &(a, b, c) in s.l.iter().chain(&s.r) {
        params.extend([a, b, c]);
        if !m.holds(co, &[a, b, c]) {
            return Err(Error::input(format!("triple ({a},{b},{c}) of L or R is not in CO")));
        }
    }
    for &p in params.iter().chain(&s.q).chain(&s.eq) {
        if p >= n {
            return Err(Error::input(format!("parameter {p} out of range")));
        }
    }
    if let Some(p) = params.iter().find(|p| !s.q.contains(p)) {
        return Err(Error::input(format!("parameter {p} is missing from Q")));
    }
    let reduced = |x: usize| s.p.iter().all(|&(a, b)| m.holds(co, &[a, x, b])) && !s.q.contains(&x);
    let full = |x: usize| {
        reduced(x)
            && s.eq.iter().all(|&a| a == x)
            && s.l.iter().all(|&(a, b, c)| m.holds(d, &[a, b, c, x]))
            && s.r.iter().all(|&(a, b, c)| m.holds(d, &[x, a, b, c]))
    };
    let solution = (0..n).find(|&x| full(x));
    let reduced_solution = (0..n).find(|&x| reduced(x));
    let density_criterion = s.p.iter().all(|&(a, b)| {
        s.p.iter().all(|&(a2, b2)| b != a2 && !(m.holds(co, &[a, b, a2]) && m.holds(co, &[b, a2, b2])))
    });
    Ok(LiteralReport {
        solution,
        reduced_solution,
        density_criterion,
        reduction_agrees: solution.is_some() == reduced_solution.is_some(),
        criterion_agrees: density_criterion == reduced_solution.is_some(),
    })
}
