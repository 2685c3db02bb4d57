use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use crate::logic::{qf_type, qf_type_main};
use crate::structures::{automorphism_group, AutomorphismGroup, Elem, Structure};

/// What "same type" means for image tuples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    /// Equal quantifier-free types.
    #[default]
    QfType,
    /// Same orbit under the automorphism group of the target.
    Orbit,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::QfType => "qftype",
            Pattern::Orbit => "orbit",
        })
    }
}

impl FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qftype" => Ok(Pattern::QfType),
            "orbit" => Ok(Pattern::Orbit),
            _ => Err(Error::input(format!("unknown pattern mode `{s}`"))),
        }
    }
}

/// A map from the main sort of `index` to `k`-tuples of `target`.
#[derive(Clone, Debug)]
pub struct IndexedSequence {
    pub index: Structure,
    pub target: Structure,
    pub k: usize,
    pub map: Vec<Vec<Elem>>,
    pub mode: Pattern,
}

impl IndexedSequence {
    pub fn new(index: Structure, target: Structure, map: Vec<Vec<Elem>>) -> Result<Self> {
        if map.len() != index.len() {
            return Err(Error::input(format!("sequence has {} terms for an index of size {}", map.len(), index.len())));
        }
        let k = map.first().map_or(1, Vec::len);
        for (i, t) in map.iter().enumerate() {
            if t.len() != k {
                return Err(Error::input(format!("term {i} has length {} instead of {k}", t.len())));
            }
            for e in t {
                if e.sort >= target.sizes().len() || e.id >= target.size(e.sort) {
                    return Err(Error::Sort(format!("term {i} has an element outside `{}`", target.name())));
                }
            }
        }
        Ok(IndexedSequence { index, target, k, map, mode: Pattern::QfType })
    }

    /// Terms given as main-sort ids.
    pub fn from_main(index: Structure, target: Structure, map: Vec<Vec<usize>>) -> Result<Self> {
        let map = map.into_iter().map(|t| t.into_iter().map(Elem::main).collect()).collect();
        IndexedSequence::new(index, target, map)
    }

    pub fn with_mode(mut self, mode: Pattern) -> Self {
        self.mode = mode;
        self
    }

    /// The same index and terms pushed through `f` into `target`.
    pub fn map_terms(&self, target: Structure, f: impl Fn(Elem) -> Elem) -> Result<IndexedSequence> {
        let map = self.map.iter().map(|t| t.iter().map(|&e| f(e)).collect()).collect();
        Ok(IndexedSequence::new(self.index.clone(), target, map)?.with_mode(self.mode))
    }

    pub fn is_indiscernible(&self) -> Result<IndiscernibilityReport> {
        is_indiscernible(self)
    }
}

/// Two index tuples of the same type whose images differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndiscernibilityReport {
    pub indiscernible: bool,
    /// Index tuples were compared up to this length.
    pub arity: usize,
    pub witness: Option<Violation>,
}

pub const DEFAULT_TUPLE_BUDGET: u64 = 1 << 22;

/// Largest index arity that can matter for `target`. For qf-types over a
/// relational signature (unary functions allowed) the type of a long tuple is
/// determined by its subtuples touching at most `max(2, arity)` indices.
pub fn locality(target: &Structure, mode: Pattern) -> Option<usize> {
    if mode != Pattern::QfType {
        return None;
    }
    let sig = target.signature();
    if sig.functions().iter().any(|f| f.args.len() > 1) {
        return None;
    }
    Some(sig.max_arity().max(2))
}

/// The injective index tuples of each length, grouped by qf-type. Only groups
/// with two or more members that contain an increasing tuple are kept: any
/// other group is a coordinate permutation of a kept one.
#[derive(Clone, Debug)]
pub struct IndexClasses {
    pub size: usize,
    pub arity: usize,
    pub classes: Vec<Vec<Vec<usize>>>,
}

impl IndexClasses {
    pub fn new(index: &Structure, arity: usize) -> Result<Self> {
        IndexClasses::with_budget(index, arity, DEFAULT_TUPLE_BUDGET)
    }

    pub fn with_budget(index: &Structure, arity: usize, budget: u64) -> Result<Self> {
        let n = index.len();
        let arity = arity.min(n);
        let mut budget = Budget::new("index tuples", budget);
        let mut classes = Vec::new();
        for len in 1..=arity {
            let mut groups: IndexMap<Vec<u32>, Vec<Vec<usize>>> = IndexMap::new();
            let mut err = None;
            injective_tuples(n, len, &mut |t| {
                if err.is_some() {
                    return;
                }
                if let Err(e) = budget.tick() {
                    err = Some(e);
                    return;
                }
                let key = qf_type_main(index, t).as_words().to_vec();
                groups.entry(key).or_default().push(t.to_vec());
            });
            if let Some(e) = err {
                return Err(e);
            }
            classes.extend(
                groups.into_values().filter(|g| g.len() > 1 && g.iter().any(|t| t.windows(2).all(|w| w[0] < w[1]))),
            );
        }
        Ok(IndexClasses { size: n, arity, classes })
    }

    /// The first pair of same-type index tuples with different images.
    pub fn first_violation(&self, eval: &PatternEval, map: &[Vec<Elem>]) -> Option<Violation> {
        let mut buf = Vec::new();
        for class in &self.classes {
            let base = eval.key(image(map, &class[0], &mut buf));
            for t in &class[1..] {
                if eval.key(image(map, t, &mut buf)) != base {
                    return Some(Violation { first: class[0].clone(), second: t.clone() });
                }
            }
        }
        None
    }
}

fn image<'a>(map: &[Vec<Elem>], t: &[usize], buf: &'a mut Vec<Elem>) -> &'a [Elem] {
    buf.clear();
    for &i in t {
        buf.extend_from_slice(&map[i]);
    }
    buf
}

/// Calls `f` on every injective `len`-tuple over `0..n` in lexicographic order.
pub fn injective_tuples(n: usize, len: usize, f: &mut impl FnMut(&[usize])) {
    fn go(n: usize, len: usize, t: &mut Vec<usize>, used: &mut [bool], f: &mut impl FnMut(&[usize])) {
        if t.len() == len {
            f(t);
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                t.push(x);
                go(n, len, t, used, f);
                t.pop();
                used[x] = false;
            }
        }
    }
    go(n, len, &mut Vec::with_capacity(len), &mut vec![false; n], f);
}

/// Computes comparable keys for tuples of a fixed target.
pub struct PatternEval<'a> {
    target: &'a Structure,
    mode: Pattern,
    group: Option<AutomorphismGroup>,
}

impl<'a> PatternEval<'a> {
    pub fn new(target: &'a Structure, mode: Pattern) -> Result<Self> {
        let group = match mode {
            Pattern::QfType => None,
            Pattern::Orbit => Some(automorphism_group(target)?),
        };
        Ok(PatternEval { target, mode, group })
    }

    pub fn mode(&self) -> Pattern {
        self.mode
    }

    pub fn key(&self, tuple: &[Elem]) -> Vec<u32> {
        match &self.group {
            None => qf_type(self.target, tuple).as_words().to_vec(),
            Some(g) => {
                let least = g.tuple_orbit(tuple).into_iter().min().expect("orbit contains the tuple");
                least.iter().flat_map(|e| [e.sort as u32, e.id as u32]).collect()
            }
        }
    }
}

/// Checks index tuples up to the index size.
pub fn is_indiscernible(s: &IndexedSequence) -> Result<IndiscernibilityReport> {
    is_indiscernible_upto(s, s.index.len())
}

pub fn is_indiscernible_upto(s: &IndexedSequence, n_max: usize) -> Result<IndiscernibilityReport> {
    let arity = locality(&s.target, s.mode).map_or(n_max, |r| r.min(n_max)).min(s.index.len());
    let classes = IndexClasses::new(&s.index, arity)?;
    let eval = PatternEval::new(&s.target, s.mode)?;
    let witness = classes.first_violation(&eval, &s.map);
    Ok(IndiscernibilityReport { indiscernible: witness.is_none(), arity, witness })
}
