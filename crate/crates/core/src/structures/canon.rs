//! Colour refinement, canonical labelling and automorphism groups.
//!
//! Canonical labelling is an individualisation-refinement search. Leaves are
//! compared by the encoding of the relabelled structure, and automorphisms
//! found along the way prune sibling branches in the same orbit.

use std::collections::{HashSet, VecDeque};

use super::embed::Embedding;
use super::structure::{Elem, Structure};
use crate::error::{Budget, Error, Result};

pub const DEFAULT_LEAF_BUDGET: u64 = 1_000_000;

struct Item {
    tag: u32,
    elems: Vec<usize>,
    // Function result, `Some(None)` for `u`. `None` for relation tuples.
    val: Option<Option<usize>>,
}

/// All elements of all sorts flattened into one index space.
struct Flat {
    n: usize,
    offsets: Vec<usize>,
    sort_of: Vec<usize>,
    items: Vec<Item>,
    inc: Vec<Vec<(u32, u32)>>,
    n_tags: usize,
    header: Vec<u32>,
}

const RESULT_POS: u32 = u32::MAX;

impl Flat {
    fn new(m: &Structure) -> Flat {
        let mut offsets = Vec::new();
        let mut sort_of = Vec::new();
        for (s, &k) in m.sizes().iter().enumerate() {
            offsets.push(sort_of.len());
            sort_of.extend(std::iter::repeat_n(s, k));
        }
        let n = sort_of.len();
        let sig = m.signature();
        let mut items = Vec::new();
        for (r, sym) in sig.relations().iter().enumerate() {
            for t in m.relation(r).tuples() {
                let elems = t.iter().zip(&sym.sorts).map(|(&a, &s)| offsets[s] + a).collect();
                items.push(Item { tag: r as u32, elems, val: None });
            }
        }
        let nr = sig.relations().len();
        for (f, sym) in sig.functions().iter().enumerate() {
            for args in m.function_domain(f) {
                let val = m.apply(f, &args).map(|v| offsets[sym.result] + v);
                let elems = args.iter().zip(&sym.args).map(|(&a, &s)| offsets[s] + a).collect();
                items.push(Item { tag: (nr + f) as u32, elems, val: Some(val) });
            }
        }
        let mut inc = vec![Vec::new(); n];
        for (i, it) in items.iter().enumerate() {
            for (p, &e) in it.elems.iter().enumerate() {
                inc[e].push((i as u32, p as u32));
            }
            if let Some(Some(v)) = it.val {
                inc[v].push((i as u32, RESULT_POS));
            }
        }
        let mut header: Vec<u32> = m.sizes().iter().map(|&k| k as u32).collect();
        // Nullary relations are not incident to any element.
        for (r, sym) in sig.relations().iter().enumerate() {
            if sym.arity() == 0 {
                header.push(r as u32);
                header.push(m.relation(r).len() as u32);
            }
        }
        Flat { n, offsets, sort_of, items, inc, n_tags: nr + sig.functions().len(), header }
    }

    fn initial(&self) -> Vec<u32> {
        self.sort_of.iter().map(|&s| s as u32).collect()
    }

    /// Refines `col` to an equitable colouring. Colours stay ordered by the old
    /// colour, so refinement never reorders existing cells.
    fn refine(&self, col: &mut Vec<u32>) {
        let mut classes = count_colours(col);
        loop {
            let mut keys: Vec<(u32, Vec<u32>, usize)> = (0..self.n)
                .map(|v| {
                    let mut entries: Vec<Vec<u32>> = self.inc[v]
                        .iter()
                        .map(|&(i, p)| {
                            let it = &self.items[i as usize];
                            let mut e = Vec::with_capacity(it.elems.len() + 3);
                            e.push(it.tag);
                            e.push(p);
                            e.extend(it.elems.iter().map(|&x| col[x]));
                            if let Some(val) = it.val {
                                e.push(val.map_or(u32::MAX, |x| col[x]));
                            }
                            e
                        })
                        .collect();
                    entries.sort_unstable();
                    let mut flat = Vec::new();
                    for e in entries {
                        flat.push(e.len() as u32);
                        flat.extend(e);
                    }
                    (col[v], flat, v)
                })
                .collect();
            keys.sort_unstable();
            let mut next = vec![0u32; self.n];
            let mut c = 0u32;
            for i in 0..keys.len() {
                if i > 0 && (keys[i].0 != keys[i - 1].0 || keys[i].1 != keys[i - 1].1) {
                    c += 1;
                }
                next[keys[i].2] = c;
            }
            let k = if self.n == 0 { 0 } else { c as usize + 1 };
            *col = next;
            if k == classes {
                return;
            }
            classes = k;
        }
    }

    fn individualise(&self, col: &[u32], v: usize) -> Vec<u32> {
        let mut out: Vec<u32> = col
            .iter()
            .enumerate()
            .map(|(x, &c)| 2 * c + u32::from(x != v && c == col[v]))
            .collect();
        compress(&mut out);
        self.refine(&mut out);
        out
    }

    /// Encodes the structure relabelled by a discrete colouring.
    fn encode(&self, lab: &[u32]) -> Vec<u32> {
        let mut groups: Vec<Vec<Vec<u32>>> = vec![Vec::new(); self.n_tags];
        for it in &self.items {
            let mut t: Vec<u32> = it.elems.iter().map(|&x| lab[x]).collect();
            if let Some(val) = it.val {
                t.push(val.map_or(u32::MAX, |x| lab[x]));
            }
            groups[it.tag as usize].push(t);
        }
        let mut code = self.header.clone();
        for mut g in groups {
            g.sort_unstable();
            code.push(g.len() as u32);
            for t in g {
                code.extend(t);
            }
        }
        code
    }
}

fn count_colours(col: &[u32]) -> usize {
    let set: HashSet<u32> = col.iter().copied().collect();
    set.len()
}

fn compress(col: &mut [u32]) {
    let mut vals: Vec<u32> = col.to_vec();
    vals.sort_unstable();
    vals.dedup();
    for c in col.iter_mut() {
        *c = vals.binary_search(c).unwrap() as u32;
    }
}

fn target_cell(col: &[u32]) -> Vec<usize> {
    let mut counts = vec![0usize; col.len()];
    for &c in col {
        counts[c as usize] += 1;
    }
    let c = match (0..col.len()).find(|&c| counts[c] > 1) {
        Some(c) => c as u32,
        None => return Vec::new(),
    };
    (0..col.len()).filter(|&v| col[v] == c).collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

struct Search<'a> {
    flat: &'a Flat,
    best: Option<(Vec<u32>, Vec<u32>)>,
    autos: Vec<Vec<usize>>,
    budget: Budget,
}

impl Search<'_> {
    fn node(&mut self, col: Vec<u32>, path: &mut Vec<usize>) -> Result<()> {
        let cell = target_cell(&col);
        if cell.is_empty() {
            return self.leaf(col);
        }
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() {
                let mut uf = UnionFind::new(self.flat.n);
                for g in &self.autos {
                    if path.iter().all(|&p| g[p] == p) {
                        for x in 0..self.flat.n {
                            uf.union(x, g[x]);
                        }
                    }
                }
                let rv = uf.find(v);
                if explored.iter().any(|&u| uf.find(u) == rv) {
                    continue;
                }
            }
            let child = self.flat.individualise(&col, v);
            path.push(v);
            self.node(child, path)?;
            path.pop();
            explored.push(v);
        }
        Ok(())
    }

    fn leaf(&mut self, lab: Vec<u32>) -> Result<()> {
        self.budget.tick()?;
        let code = self.flat.encode(&lab);
        match &self.best {
            None => self.best = Some((code, lab)),
            Some((best, best_lab)) => match code.cmp(best) {
                std::cmp::Ordering::Less => self.best = Some((code, lab)),
                std::cmp::Ordering::Equal => {
                    let mut inv = vec![0usize; lab.len()];
                    for (x, &l) in best_lab.iter().enumerate() {
                        inv[l as usize] = x;
                    }
                    let g: Vec<usize> = lab.iter().map(|&l| inv[l as usize]).collect();
                    if g.iter().enumerate().any(|(i, &x)| i != x) {
                        self.autos.push(g);
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
        }
        Ok(())
    }
}

fn label(flat: &Flat, mut col: Vec<u32>, budget: u64) -> Result<(Vec<u32>, Vec<u32>)> {
    flat.refine(&mut col);
    let mut s = Search { flat, best: None, autos: Vec::new(), budget: Budget::new("canonical labelling leaves", budget) };
    s.node(col, &mut Vec::new())?;
    Ok(s.best.unwrap_or_default())
}

/// An isomorphism invariant that separates non-isomorphic structures of the
/// same signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub Vec<u32>);

impl CanonicalForm {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|x| x.to_le_bytes()).collect()
    }
}

/// The canonical form and the labelling `lab[s][old] = new` that realises it.
pub fn canonical_labelling(m: &Structure) -> Result<(CanonicalForm, Vec<Vec<usize>>)> {
    canonical_labelling_with(m, DEFAULT_LEAF_BUDGET)
}

pub fn canonical_labelling_with(
    m: &Structure,
    budget: u64,
) -> Result<(CanonicalForm, Vec<Vec<usize>>)> {
    let flat = Flat::new(m);
    let (code, lab) = label(&flat, flat.initial(), budget)?;
    Ok((CanonicalForm(code), split_labelling(&flat, &lab)))
}

fn split_labelling(flat: &Flat, lab: &[u32]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (s, &off) in flat.offsets.iter().enumerate() {
        let end = flat.offsets.get(s + 1).copied().unwrap_or(flat.n);
        out.push((off..end).map(|v| lab[v] as usize - off).collect());
    }
    out
}

pub fn canonical_form(m: &Structure) -> Result<CanonicalForm> {
    Ok(canonical_labelling(m)?.0)
}

/// The canonically relabelled copy of `m`.
pub fn canonical_structure(m: &Structure) -> Result<Structure> {
    let (_, lab) = canonical_labelling(m)?;
    m.permuted(&lab)
}

/// An isomorphism `a -> b` if one exists.
pub fn isomorphism(a: &Structure, b: &Structure) -> Result<Option<Embedding>> {
    if a.signature() != b.signature() || a.sizes() != b.sizes() {
        return Ok(None);
    }
    let (ca, la) = canonical_labelling(a)?;
    let (cb, lb) = canonical_labelling(b)?;
    if ca != cb {
        return Ok(None);
    }
    let maps = la
        .iter()
        .zip(&lb)
        .map(|(la, lb)| {
            let mut inv = vec![0; lb.len()];
            for (x, &l) in lb.iter().enumerate() {
                inv[l] = x;
            }
            la.iter().map(|&l| inv[l]).collect()
        })
        .collect();
    Ok(Some(Embedding(maps)))
}

pub fn are_isomorphic(a: &Structure, b: &Structure) -> Result<bool> {
    Ok(isomorphism(a, b)?.is_some())
}

/// Automorphisms as per-sort permutations.
#[derive(Clone, Debug)]
pub struct AutomorphismGroup {
    sizes: Vec<usize>,
    pub generators: Vec<Embedding>,
    pub order: u128,
}

/// Computes generators and the exact order along a stabiliser chain. At each
/// level, every candidate image of the base point is tested by comparing
/// canonical forms with the prefix individualised.
pub fn automorphism_group(m: &Structure) -> Result<AutomorphismGroup> {
    automorphism_group_with(m, DEFAULT_LEAF_BUDGET)
}

pub fn automorphism_group_with(m: &Structure, budget: u64) -> Result<AutomorphismGroup> {
    let flat = Flat::new(m);
    let mut col = flat.initial();
    flat.refine(&mut col);
    let mut gens: Vec<Vec<usize>> = Vec::new();
    let mut order: u128 = 1;
    let mut prefix: Vec<usize> = Vec::new();
    loop {
        let cell = target_cell(&col);
        let Some(&base) = cell.first() else { break };
        let base_col = flat.individualise(&col, base);
        let (base_code, base_lab) = label(&flat, base_col.clone(), budget)?;
        let mut inv = vec![0usize; flat.n];
        for (x, &l) in base_lab.iter().enumerate() {
            inv[l as usize] = x;
        }
        // Orbit of `base` under the automorphisms found so far that fix the prefix.
        let mut orbit: Vec<usize> = vec![base];
        let closure = |orbit: &mut Vec<usize>, gens: &[Vec<usize>]| {
            let fixing: Vec<&Vec<usize>> =
                gens.iter().filter(|g| prefix.iter().all(|&p| g[p] == p)).collect();
            let mut i = 0;
            while i < orbit.len() {
                for g in &fixing {
                    let y = g[orbit[i]];
                    if !orbit.contains(&y) {
                        orbit.push(y);
                    }
                }
                i += 1;
            }
        };
        closure(&mut orbit, &gens);
        for &c in &cell[1..] {
            if orbit.contains(&c) {
                continue;
            }
            let (code, lab) = label(&flat, flat.individualise(&col, c), budget)?;
            if code == base_code {
                // base-side x and c-side y correspond when they share a label.
                let g: Vec<usize> = (0..flat.n).map(|x| inv[lab[x] as usize]).collect();
                // g maps the c-side onto the base side; invert so base -> c.
                let mut h = vec![0usize; flat.n];
                for (x, &y) in g.iter().enumerate() {
                    h[y] = x;
                }
                gens.push(h);
                closure(&mut orbit, &gens);
            }
        }
        order = order
            .checked_mul(orbit.len() as u128)
            .ok_or_else(|| Error::Unsupported("automorphism group order overflows u128".into()))?;
        col = base_col;
        prefix.push(base);
    }
    let generators = gens.iter().map(|g| split_perm(&flat, g)).collect();
    Ok(AutomorphismGroup { sizes: m.sizes().to_vec(), generators, order })
}

fn split_perm(flat: &Flat, g: &[usize]) -> Embedding {
    let mut out = Vec::new();
    for (s, &off) in flat.offsets.iter().enumerate() {
        let end = flat.offsets.get(s + 1).copied().unwrap_or(flat.n);
        out.push((off..end).map(|v| g[v] - off).collect());
    }
    Embedding(out)
}

impl AutomorphismGroup {
    /// Orbits of single elements of one sort, each sorted, ordered by least member.
    pub fn orbits(&self, sort: usize) -> Vec<Vec<usize>> {
        let n = self.sizes[sort];
        let mut uf = UnionFind::new(n);
        for g in &self.generators {
            for x in 0..n {
                uf.union(x, g.0[sort][x]);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut idx = vec![usize::MAX; n];
        for x in 0..n {
            let r = uf.find(x);
            if idx[r] == usize::MAX {
                idx[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[idx[r]].push(x);
        }
        groups
    }

    /// The orbit of a tuple of elements, in discovery order.
    pub fn tuple_orbit(&self, tuple: &[Elem]) -> Vec<Vec<Elem>> {
        let mut seen: HashSet<Vec<Elem>> = HashSet::new();
        let mut queue = VecDeque::new();
        let mut out = Vec::new();
        seen.insert(tuple.to_vec());
        queue.push_back(tuple.to_vec());
        while let Some(t) = queue.pop_front() {
            for g in &self.generators {
                let img: Vec<Elem> = t.iter().map(|&e| g.apply(e)).collect();
                if seen.insert(img.clone()) {
                    queue.push_back(img);
                }
            }
            out.push(t);
        }
        out
    }

    /// All group elements, or a budget error when there are more than `limit`.
    pub fn elements(&self, limit: u64) -> Result<Vec<Embedding>> {
        if self.order > limit as u128 {
            return Err(Error::Budget { what: "automorphism group elements", limit });
        }
        let id = Embedding::identity(&self.sizes);
        let mut seen: HashSet<Embedding> = HashSet::from([id.clone()]);
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            for g in &self.generators {
                let h = g.compose(&out[i]);
                if seen.insert(h.clone()) {
                    out.push(h);
                }
            }
            i += 1;
        }
        out.sort();
        Ok(out)
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }
}
