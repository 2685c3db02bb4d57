use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Budget, Error, Result};
use crate::logic::Formula;
use crate::structures::{for_each_tuple, Structure};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateSet {
    /// Each symbol of `A` read as the same symbol of `M` (`n = 1`).
    Identity,
    /// Atoms over the variables of `M`'s symbols, and their negations.
    Literals,
    /// Literals and conjunctions or disjunctions of two of them.
    #[default]
    Pairs,
}

impl fmt::Display for TemplateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemplateSet::Identity => "identity",
            TemplateSet::Literals => "literals",
            TemplateSet::Pairs => "pairs",
        })
    }
}

impl FromStr for TemplateSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(TemplateSet::Identity),
            "literals" => Ok(TemplateSet::Literals),
            "pairs" => Ok(TemplateSet::Pairs),
            _ => Err(Error::input(format!("unknown template set `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConfigOptions {
    /// Points of `A` go to `n`-tuples of `M`.
    pub n: usize,
    pub templates: TemplateSet,
    /// Allow equality literals between variables.
    pub equality: bool,
    pub injective: bool,
    pub budget: u64,
}

impl Default for ConfigOptions {
    fn default() -> Self {
        ConfigOptions { n: 1, templates: TemplateSet::Pairs, equality: false, injective: true, budget: 1 << 26 }
    }
}

/// A quantifier-free formula with its variables in argument order and its
/// truth table over `M`.
#[derive(Clone, Debug)]
pub struct Template {
    pub formula: Formula,
    pub vars: Vec<String>,
    table: Vec<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Interpretation {
    pub symbol: String,
    pub vars: Vec<String>,
    pub formula: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Configuration {
    pub interpretation: Vec<Interpretation>,
    /// `map[a]` is the `n`-tuple of `M` coding the point `a` of `A`.
    pub map: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigReport {
    pub n: usize,
    pub templates: TemplateSet,
    pub templates_per_symbol: Vec<usize>,
    pub combinations: u64,
    pub nodes: u64,
    pub found: Option<Configuration>,
}

/// Variable for coordinate `c` of argument `j`.
fn var(j: usize, c: usize, n: usize) -> String {
    if n == 1 {
        format!("x{}", j + 1)
    } else {
        format!("x{}_{}", j + 1, c + 1)
    }
}

fn table_of(m: &Structure, width: usize, f: impl Fn(&[usize]) -> bool) -> Vec<bool> {
    let mut t = Vec::with_capacity(m.len().pow(width as u32));
    for_each_tuple(m.len(), width, |x| t.push(f(x)));
    t
}

/// Templates for an `r`-ary symbol coded in `n`-tuples, distinct by truth table.
pub fn templates(m: &Structure, r: usize, opts: &ConfigOptions) -> Result<Vec<Template>> {
    let n = opts.n;
    let width = r * n;
    let vars: Vec<String> = (0..r).flat_map(|j| (0..n).map(move |c| var(j, c, n))).collect();
    let mut literals: Vec<Template> = Vec::new();
    for (p, sym) in m.signature().relations().iter().enumerate() {
        let arity = sym.arity();
        let mut places = Vec::new();
        for_each_tuple(width, arity, |t| places.push(t.to_vec()));
        for pos in places {
            let atom = Formula::Atom { rel: sym.name.clone(), args: pos.iter().map(|&q| vars[q].clone()).collect() };
            let table = table_of(m, width, |x| {
                let args: Vec<usize> = pos.iter().map(|&q| x[q]).collect();
                m.holds(p, &args)
            });
            let neg: Vec<bool> = table.iter().map(|b| !b).collect();
            literals.push(Template { formula: atom.clone(), vars: vars.clone(), table });
            literals.push(Template { formula: atom.not(), vars: vars.clone(), table: neg });
        }
    }
    if opts.equality {
        for a in 0..width {
            for b in a + 1..width {
                let eq = Formula::eq(&vars[a], &vars[b]);
                let table = table_of(m, width, |x| x[a] == x[b]);
                let neg: Vec<bool> = table.iter().map(|b| !b).collect();
                literals.push(Template { formula: eq.clone(), vars: vars.clone(), table });
                literals.push(Template { formula: eq.not(), vars: vars.clone(), table: neg });
            }
        }
    }
    let mut out = literals.clone();
    if opts.templates == TemplateSet::Pairs {
        for a in 0..literals.len() {
            for b in a + 1..literals.len() {
                let (x, y) = (&literals[a], &literals[b]);
                out.push(Template {
                    formula: x.formula.clone().and(y.formula.clone()),
                    vars: vars.clone(),
                    table: x.table.iter().zip(&y.table).map(|(p, q)| *p && *q).collect(),
                });
                out.push(Template {
                    formula: x.formula.clone().or(y.formula.clone()),
                    vars: vars.clone(),
                    table: x.table.iter().zip(&y.table).map(|(p, q)| *p || *q).collect(),
                });
            }
        }
    }
    let mut seen = HashSet::new();
    out.retain(|t| seen.insert(t.table.clone()));
    Ok(out)
}

/// Searches templates `I(R)` and maps `f: A -> M^n` with
/// `A |= R(a) <-> M |= I(R)(f(a))` for every symbol and tuple.
pub fn find_configuration(m: &Structure, a: &Structure, opts: &ConfigOptions) -> Result<ConfigReport> {
    for s in [m, a] {
        if !s.signature().is_one_sorted() || !s.signature().is_relational() {
            return Err(Error::Unsupported(format!(
                "configurations need one-sorted relational structures; `{}` is not",
                s.name()
            )));
        }
    }
    if opts.n == 0 {
        return Err(Error::input("n must be at least 1"));
    }
    if a.is_empty() {
        return Err(Error::input("the structure to configure is empty"));
    }
    let n = opts.n;
    let per_symbol: Vec<Vec<Template>> = a
        .signature()
        .relations()
        .iter()
        .map(|sym| {
            let r = sym.arity();
            if opts.templates == TemplateSet::Identity {
                if n != 1 {
                    return Err(Error::input("identity templates need n = 1"));
                }
                let p = m.rel_index(&sym.name)?;
                if m.signature().relations()[p].arity() != r {
                    return Err(Error::Signature(format!("`{}` has different arities in A and M", sym.name)));
                }
                let vars: Vec<String> = (0..r).map(|j| var(j, 0, 1)).collect();
                let table = table_of(m, r, |x| m.holds(p, x));
                Ok(vec![Template { formula: Formula::Atom { rel: sym.name.clone(), args: vars.clone() }, vars, table }])
            } else {
                templates(m, r, opts)
            }
        })
        .collect::<Result<_>>()?;
    let counts: Vec<usize> = per_symbol.iter().map(Vec::len).collect();
    let combinations = counts.iter().try_fold(1u64, |acc, &c| acc.checked_mul(c as u64)).unwrap_or(u64::MAX);
    let mut budget = Budget::new("configuration search nodes", opts.budget);
    let index_points = m.len().pow(n as u32);
    if opts.injective && index_points < a.len() {
        return Ok(ConfigReport {
            n,
            templates: opts.templates,
            templates_per_symbol: counts,
            combinations,
            nodes: 0,
            found: None,
        });
    }
    // Constraints indexed by their largest point.
    let mut due: Vec<Vec<(usize, Vec<usize>, bool)>> = vec![Vec::new(); a.len()];
    for (r, sym) in a.signature().relations().iter().enumerate() {
        for_each_tuple(a.len(), sym.arity(), |t| {
            let top = t.iter().copied().max().unwrap_or(0);
            due[top].push((r, t.to_vec(), a.holds(r, t)));
        });
    }
    let mut choice = vec![0usize; counts.len()];
    if counts.contains(&0) {
        return Ok(ConfigReport { n, templates: opts.templates, templates_per_symbol: counts, combinations, nodes: 0, found: None });
    }
    let digits: Vec<Vec<usize>> = {
        let mut d = Vec::with_capacity(index_points);
        for_each_tuple(m.len(), n, |t| d.push(t.to_vec()));
        d
    };
    loop {
        let chosen: Vec<&Template> = choice.iter().enumerate().map(|(r, &c)| &per_symbol[r][c]).collect();
        {
            let mut search = Search {
                chosen: &chosen,
                due: &due,
                digits: &digits,
                base: m.len(),
                injective: opts.injective,
                f: Vec::with_capacity(a.len()),
                used: vec![false; index_points],
                budget: &mut budget,
            };
            if search.run(a.len())? {
                let map = search.f.iter().map(|&c| digits[c].clone()).collect();
                let interpretation = a
                    .signature()
                    .relations()
                    .iter()
                    .zip(&chosen)
                    .map(|(s, t)| Interpretation { symbol: s.name.clone(), vars: t.vars.clone(), formula: t.formula.to_string() })
                    .collect();
                return Ok(ConfigReport {
                    n,
                    templates: opts.templates,
                    templates_per_symbol: counts,
                    combinations,
                    nodes: budget.used(),
                    found: Some(Configuration { interpretation, map }),
                });
            }
        }
        // Odometer over template choices, last symbol fastest.
        let mut pos = counts.len();
        loop {
            if pos == 0 {
                return Ok(ConfigReport {
                    n,
                    templates: opts.templates,
                    templates_per_symbol: counts,
                    combinations,
                    nodes: budget.used(),
                    found: None,
                });
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < counts[pos] {
                break;
            }
            choice[pos] = 0;
        }
    }
}

struct Search<'a> {
    chosen: &'a [&'a Template],
    due: &'a [Vec<(usize, Vec<usize>, bool)>],
    digits: &'a [Vec<usize>],
    base: usize,
    injective: bool,
    f: Vec<usize>,
    used: Vec<bool>,
    budget: &'a mut Budget,
}

impl Search<'_> {
    fn run(&mut self, size: usize) -> Result<bool> {
        let t = self.f.len();
        if t == size {
            return Ok(true);
        }
        for code in 0..self.digits.len() {
            if self.injective && self.used[code] {
                continue;
            }
            self.budget.tick()?;
            self.f.push(code);
            if self.consistent(t) {
                self.used[code] = true;
                if self.run(size)? {
                    return Ok(true);
                }
                self.used[code] = false;
            }
            self.f.pop();
        }
        Ok(false)
    }

    fn consistent(&self, t: usize) -> bool {
        self.due[t].iter().all(|(r, tuple, want)| {
            let mut idx = 0usize;
            for &p in tuple {
                for &d in &self.digits[self.f[p]] {
                    idx = idx * self.base + d;
                }
            }
            self.chosen[*r].table[idx] == *want
        })
    }
}
