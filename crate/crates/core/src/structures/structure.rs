use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::signature::{Signature, SortId};
use crate::error::{Error, Result};

/// An element tagged with its sort.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elem {
    pub sort: SortId,
    pub id: usize,
}

impl Elem {
    pub fn new(sort: SortId, id: usize) -> Self {
        Elem { sort, id }
    }

    pub fn main(id: usize) -> Self {
        Elem { sort: 0, id }
    }
}

const DENSE_LIMIT: usize = 1 << 22;

fn strides(sizes: &[usize]) -> Option<(Vec<usize>, usize)> {
    let mut strides = vec![0; sizes.len()];
    let mut total = 1usize;
    for (i, &s) in sizes.iter().enumerate().rev() {
        strides[i] = total;
        total = total.checked_mul(s)?;
    }
    Some((strides, total))
}

#[derive(Clone, Debug)]
enum Membership {
    Dense { bits: Vec<u64>, strides: Vec<usize> },
    Sparse(HashSet<Vec<usize>>),
}

/// Tuples of one relation, kept sorted and deduplicated, with a membership index.
#[derive(Clone, Debug)]
pub struct Relation {
    tuples: Vec<Vec<usize>>,
    index: Membership,
}

impl Relation {
    fn empty(sizes: &[usize]) -> Self {
        let index = match strides(sizes) {
            Some((strides, total)) if total <= DENSE_LIMIT => {
                Membership::Dense { bits: vec![0; total.div_ceil(64).max(1)], strides }
            }
            _ => Membership::Sparse(HashSet::new()),
        };
        Relation { tuples: Vec::new(), index }
    }

    fn mark(&mut self, t: &[usize]) -> bool {
        match &mut self.index {
            Membership::Dense { bits, strides } => {
                let k: usize = t.iter().zip(strides.iter()).map(|(a, s)| a * s).sum();
                let fresh = bits[k >> 6] & (1 << (k & 63)) == 0;
                bits[k >> 6] |= 1 << (k & 63);
                fresh
            }
            Membership::Sparse(set) => set.insert(t.to_vec()),
        }
    }

    #[inline]
    pub fn contains(&self, t: &[usize]) -> bool {
        match &self.index {
            Membership::Dense { bits, strides } => {
                let k: usize = t.iter().zip(strides.iter()).map(|(a, s)| a * s).sum();
                bits[k >> 6] & (1 << (k & 63)) != 0
            }
            Membership::Sparse(set) => set.contains(t),
        }
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// Table of a function over the grid of its argument sorts, row-major.
/// `None` is the sentinel `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunTable {
    strides: Vec<usize>,
    values: Vec<Option<usize>>,
}

impl FunTable {
    #[inline]
    pub fn get(&self, args: &[usize]) -> Option<usize> {
        let k: usize = args.iter().zip(self.strides.iter()).map(|(a, s)| a * s).sum();
        self.values[k]
    }

    pub fn values(&self) -> &[Option<usize>] {
        &self.values
    }
}

#[derive(Clone, Debug)]
pub struct Structure {
    name: String,
    sig: Signature,
    sizes: Vec<usize>,
    rels: Vec<Relation>,
    funs: Vec<FunTable>,
}

impl Structure {
    /// A structure with empty relations. Functions start out as the constant `u`,
    /// which is only valid for partial symbols; total ones must be set.
    pub fn new(name: impl Into<String>, sig: Signature, sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() != sig.sort_count() {
            return Err(Error::Sort(format!(
                "{} sort sizes given for {} sorts",
                sizes.len(),
                sig.sort_count()
            )));
        }
        let rels = sig
            .relations()
            .iter()
            .map(|r| Relation::empty(&r.sorts.iter().map(|&s| sizes[s]).collect::<Vec<_>>()))
            .collect();
        let mut funs = Vec::new();
        for f in sig.functions() {
            let arg_sizes: Vec<usize> = f.args.iter().map(|&s| sizes[s]).collect();
            let (strides, total) = strides(&arg_sizes)
                .ok_or_else(|| Error::input(format!("table of `{}` too large", f.name)))?;
            funs.push(FunTable { strides, values: vec![None; total] });
        }
        Ok(Structure { name: name.into(), sig, sizes, rels, funs })
    }

    /// One-sorted structure of the given size.
    pub fn one_sorted(name: impl Into<String>, sig: Signature, size: usize) -> Result<Self> {
        Structure::new(name, sig, vec![size])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, sort: SortId) -> usize {
        self.sizes[sort]
    }

    /// Size of the main (first) sort.
    pub fn len(&self) -> usize {
        self.sizes[0]
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.iter().all(|&s| s == 0)
    }

    pub fn total_size(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn relation(&self, r: usize) -> &Relation {
        &self.rels[r]
    }

    pub fn relation_by_name(&self, name: &str) -> Option<&Relation> {
        self.sig.relation_index(name).map(|r| &self.rels[r])
    }

    pub fn rel_index(&self, name: &str) -> Result<usize> {
        self.sig
            .relation_index(name)
            .ok_or_else(|| Error::Signature(format!("no relation `{name}` in `{}`", self.name)))
    }

    #[inline]
    pub fn holds(&self, r: usize, t: &[usize]) -> bool {
        self.rels[r].contains(t)
    }

    pub fn function(&self, f: usize) -> &FunTable {
        &self.funs[f]
    }

    #[inline]
    pub fn apply(&self, f: usize, args: &[usize]) -> Option<usize> {
        self.funs[f].get(args)
    }

    fn check_tuple(&self, r: usize, t: &[usize]) -> Result<()> {
        let sym = &self.sig.relations()[r];
        if t.len() != sym.arity() {
            return Err(Error::input(format!(
                "tuple {t:?} has length {} but `{}` has arity {}",
                t.len(),
                sym.name,
                sym.arity()
            )));
        }
        for (&a, &s) in t.iter().zip(&sym.sorts) {
            if a >= self.sizes[s] {
                return Err(Error::input(format!(
                    "element {a} out of range for sort `{}` in `{}`",
                    self.sig.sorts()[s],
                    sym.name
                )));
            }
        }
        Ok(())
    }

    /// Replaces the tuples of relation `r`.
    pub fn set_relation(&mut self, r: usize, mut tuples: Vec<Vec<usize>>) -> Result<()> {
        for t in &tuples {
            self.check_tuple(r, t)?;
        }
        tuples.sort_unstable();
        tuples.dedup();
        let sizes: Vec<usize> =
            self.sig.relations()[r].sorts.iter().map(|&s| self.sizes[s]).collect();
        let mut rel = Relation::empty(&sizes);
        for t in &tuples {
            rel.mark(t);
        }
        rel.tuples = tuples;
        self.rels[r] = rel;
        Ok(())
    }

    pub fn insert(&mut self, r: usize, t: &[usize]) -> Result<()> {
        self.check_tuple(r, t)?;
        let rel = &mut self.rels[r];
        if rel.mark(t) {
            let pos = rel.tuples.binary_search_by(|x| x.as_slice().cmp(t)).unwrap_err();
            rel.tuples.insert(pos, t.to_vec());
        }
        Ok(())
    }

    /// Sets the table of function `f`; `values` follows the row-major argument grid.
    pub fn set_function(&mut self, f: usize, values: Vec<Option<usize>>) -> Result<()> {
        let sym = &self.sig.functions()[f];
        if values.len() != self.funs[f].values.len() {
            return Err(Error::input(format!(
                "table of `{}` has {} entries, expected {}",
                sym.name,
                values.len(),
                self.funs[f].values.len()
            )));
        }
        for v in &values {
            match v {
                None if !sym.partial => {
                    return Err(Error::input(format!("total function `{}` takes value u", sym.name)))
                }
                Some(x) if *x >= self.sizes[sym.result] => {
                    return Err(Error::input(format!(
                        "value {x} of `{}` outside its result sort",
                        sym.name
                    )))
                }
                _ => {}
            }
        }
        self.funs[f].values = values;
        Ok(())
    }

    /// Argument tuples of function `f` in the order used by its table.
    pub fn function_domain(&self, f: usize) -> Vec<Vec<usize>> {
        let sizes: Vec<usize> =
            self.sig.functions()[f].args.iter().map(|&s| self.sizes[s]).collect();
        grid(&sizes)
    }

    /// The substructure on the given per-sort subsets, renumbered in the order given.
    /// Fails if the subsets are not closed under the functions.
    pub fn induced(&self, subsets: &[Vec<usize>]) -> Result<Structure> {
        if subsets.len() != self.sizes.len() {
            return Err(Error::Sort("one subset per sort is required".into()));
        }
        let mut back: Vec<Vec<Option<usize>>> =
            self.sizes.iter().map(|&n| vec![None; n]).collect();
        for (s, sub) in subsets.iter().enumerate() {
            for (new, &old) in sub.iter().enumerate() {
                if old >= self.sizes[s] {
                    return Err(Error::input(format!("element {old} out of range")));
                }
                if back[s][old].replace(new).is_some() {
                    return Err(Error::input(format!("element {old} listed twice")));
                }
            }
        }
        let sizes = subsets.iter().map(Vec::len).collect();
        let mut out = Structure::new(self.name.clone(), self.sig.clone(), sizes)?;
        for (r, sym) in self.sig.relations().iter().enumerate() {
            let tuples = self.rels[r]
                .tuples
                .iter()
                .filter_map(|t| {
                    t.iter().zip(&sym.sorts).map(|(&a, &s)| back[s][a]).collect::<Option<Vec<_>>>()
                })
                .collect();
            out.set_relation(r, tuples)?;
        }
        for (f, sym) in self.sig.functions().iter().enumerate() {
            let new_sizes: Vec<usize> = sym.args.iter().map(|&s| subsets[s].len()).collect();
            let mut values = Vec::new();
            for args in grid(&new_sizes) {
                let old: Vec<usize> =
                    args.iter().zip(&sym.args).map(|(&a, &s)| subsets[s][a]).collect();
                values.push(match self.apply(f, &old) {
                    None => None,
                    Some(v) => Some(back[sym.result][v].ok_or_else(|| {
                        Error::Precondition(format!("subset not closed under `{}`", sym.name))
                    })?),
                });
            }
            out.set_function(f, values)?;
        }
        Ok(out)
    }

    /// Induced substructure of a one-sorted structure.
    pub fn induced_main(&self, subset: &[usize]) -> Result<Structure> {
        if !self.sig.is_one_sorted() {
            return Err(Error::Unsupported("induced_main on a many-sorted structure".into()));
        }
        self.induced(&[subset.to_vec()])
    }

    /// Renames elements: `perm[s][old] = new`.
    pub fn permuted(&self, perm: &[Vec<usize>]) -> Result<Structure> {
        let mut inv: Vec<Vec<usize>> = Vec::new();
        for (s, p) in perm.iter().enumerate() {
            let mut v = vec![usize::MAX; self.sizes[s]];
            for (old, &new) in p.iter().enumerate() {
                v[new] = old;
            }
            inv.push(v);
        }
        self.induced(&inv)
    }

    /// Keeps only the named relation symbols (functions are kept).
    pub fn reduct(&self, keep: &[&str]) -> Result<Structure> {
        for k in keep {
            self.rel_index(k)?;
        }
        let mut sig = Signature::with_sorts(self.sig.sorts().to_vec())?;
        let mut kept = Vec::new();
        for (r, sym) in self.sig.relations().iter().enumerate() {
            if keep.contains(&sym.name.as_str()) {
                sig.add_relation(&sym.name, sym.sorts.clone())?;
                kept.push(r);
            }
        }
        for f in self.sig.functions() {
            sig.add_function(&f.name, f.args.clone(), f.result, f.partial)?;
        }
        let mut out = Structure::new(self.name.clone(), sig, self.sizes.clone())?;
        for (i, &r) in kept.iter().enumerate() {
            out.set_relation(i, self.rels[r].tuples.clone())?;
        }
        for f in 0..self.funs.len() {
            out.funs[f] = self.funs[f].clone();
        }
        Ok(out)
    }

    /// Adds a relation symbol with the given tuples.
    pub fn with_relation(
        &self,
        name: &str,
        sorts: Vec<SortId>,
        tuples: Vec<Vec<usize>>,
    ) -> Result<Structure> {
        let mut sig = self.sig.clone();
        let r = sig.add_relation(name, sorts.clone())?;
        let mut out = self.clone();
        out.sig = sig;
        out.rels.push(Relation::empty(&sorts.iter().map(|&s| self.sizes[s]).collect::<Vec<_>>()));
        out.set_relation(r, tuples)?;
        Ok(out)
    }

    /// Adds `graph_f(args.., y)` for each function `f`, true iff `f(args..) = y`.
    /// This lets first-order formulas without function terms talk about functions.
    pub fn with_function_graphs(&self) -> Result<Structure> {
        let mut out = self.clone();
        for (f, sym) in self.sig.functions().iter().enumerate() {
            let tuples = self
                .function_domain(f)
                .into_iter()
                .filter_map(|mut args| {
                    let v = self.apply(f, &args)?;
                    args.push(v);
                    Some(args)
                })
                .collect();
            let mut sorts = sym.args.clone();
            sorts.push(sym.result);
            out = out.with_relation(&format!("graph_{}", sym.name), sorts, tuples)?;
        }
        Ok(out)
    }

    /// The one-sorted structure on `sort`, keeping relations that live entirely on it.
    pub fn sort_restriction(&self, sort: SortId) -> Result<Structure> {
        let mut sig = Signature::one_sorted();
        let mut kept = Vec::new();
        for (r, sym) in self.sig.relations().iter().enumerate() {
            if sym.sorts.iter().all(|&s| s == sort) {
                sig.add_relation(&sym.name, vec![0; sym.arity()])?;
                kept.push(r);
            }
        }
        let mut out = Structure::new(self.name.clone(), sig, vec![self.sizes[sort]])?;
        for (i, &r) in kept.iter().enumerate() {
            out.set_relation(i, self.rels[r].tuples.clone())?;
        }
        Ok(out)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        self.sizes.iter().enumerate().flat_map(|(s, &n)| (0..n).map(move |i| Elem::new(s, i)))
    }
}

/// All tuples over `sizes[0] x sizes[1] x ...` in lexicographic order.
pub fn grid(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if sizes.contains(&0) {
        return out;
    }
    let mut cur = vec![0; sizes.len()];
    loop {
        out.push(cur.clone());
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < sizes[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Visits every tuple in `0..n` of length `k` in lexicographic order.
pub fn for_each_tuple(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 {
        f(&[]);
        return;
    }
    if n == 0 {
        return;
    }
    let mut cur = vec![0; k];
    loop {
        f(&cur);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < n {
                break;
            }
            cur[i] = 0;
        }
    }
}
