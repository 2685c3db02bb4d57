//! Full products, lexicographic sums, disjoint unions and free superpositions.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::classes::ClassFragment;
use crate::error::{Budget, Error, Result};
use crate::logic::Formula;
use crate::structures::{automorphism_group, canonical_form, subsets, Signature, SortId, Structure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    Full,
    Lex,
    Disjoint,
    Superposition,
}

impl fmt::Display for ProductKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProductKind::Full => "full",
            ProductKind::Lex => "lex",
            ProductKind::Disjoint => "disjoint",
            ProductKind::Superposition => "superposition",
        })
    }
}

impl FromStr for ProductKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "full" => ProductKind::Full,
            "lex" => ProductKind::Lex,
            "disjoint" => ProductKind::Disjoint,
            "superpose" | "superposition" => ProductKind::Superposition,
            _ => return Err(Error::input(format!("unknown product kind `{s}`"))),
        })
    }
}

/// Where a product came from: its kind, the factor names and, for lexicographic
/// sums, the rib name at each spine point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductTag {
    pub kind: ProductKind,
    pub factors: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ribs: Vec<String>,
}

/// Turns a symbol name into an identifier, so that prefixed copies stay parseable.
pub fn sanitize(name: &str) -> String {
    match name {
        "<" => "lt".into(),
        "<=" => "le".into(),
        _ => name.chars().map(|c| if c.is_alphanumeric() || c == '_' { c } else { '_' }).collect(),
    }
}

fn one_sorted(m: &Structure, what: &str) -> Result<()> {
    if m.signature().is_one_sorted() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("{what} of a many-sorted structure `{}`", m.name())))
    }
}

/// Copies the symbols of a one-sorted `m` onto sort `sort` of `sig` under `prefix`.
/// Returns the new relation and function indices.
fn copy_symbols(sig: &mut Signature, m: &Structure, sort: SortId, prefix: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let rels = m
        .signature()
        .relations()
        .iter()
        .map(|r| sig.add_relation(&format!("{prefix}{}", sanitize(&r.name)), vec![sort; r.arity()]))
        .collect::<Result<_>>()?;
    let funs = m
        .signature()
        .functions()
        .iter()
        .map(|f| sig.add_function(&format!("{prefix}{}", sanitize(&f.name)), vec![sort; f.args.len()], sort, f.partial))
        .collect::<Result<_>>()?;
    Ok((rels, funs))
}

fn fill_copy(out: &mut Structure, m: &Structure, rels: &[usize], funs: &[usize]) -> Result<()> {
    for (r, &nr) in rels.iter().enumerate() {
        out.set_relation(nr, m.relation(r).tuples().to_vec())?;
    }
    for (f, &nf) in funs.iter().enumerate() {
        out.set_function(nf, m.function(f).values().to_vec())?;
    }
    Ok(())
}

/// `m` with every symbol renamed to `prefix` + its sanitized name.
pub fn prefixed(m: &Structure, prefix: &str) -> Result<Structure> {
    one_sorted(m, "renaming")?;
    let mut sig = Signature::one_sorted();
    let (rels, funs) = copy_symbols(&mut sig, m, 0, prefix)?;
    let mut out = Structure::new(m.name(), sig, vec![m.len()])?;
    fill_copy(&mut out, m, &rels, &funs)?;
    Ok(out)
}

/// `M1 ⊠ M2`: sorts `main` (pairs, `(a, b)` has id `a * |M2| + b`), `left`
/// and `right` carrying the factors as `l_*` and `r_*`, and the projections
/// `pi1`, `pi2`. The main sort carries no other structure.
pub fn full_product(m1: &Structure, m2: &Structure) -> Result<Structure> {
    one_sorted(m1, "full product")?;
    one_sorted(m2, "full product")?;
    let mut sig = Signature::with_sorts(["main", "left", "right"])?;
    let (lr, lf) = copy_symbols(&mut sig, m1, 1, "l_")?;
    let (rr, rf) = copy_symbols(&mut sig, m2, 2, "r_")?;
    let p1 = sig.add_function("pi1", vec![0], 1, false)?;
    let p2 = sig.add_function("pi2", vec![0], 2, false)?;
    let (n1, n2) = (m1.len(), m2.len());
    let mut out = Structure::new(format!("{}x{}", m1.name(), m2.name()), sig, vec![n1 * n2, n1, n2])?;
    fill_copy(&mut out, m1, &lr, &lf)?;
    fill_copy(&mut out, m2, &rr, &rf)?;
    out.set_function(p1, (0..n1 * n2).map(|x| Some(x / n2)).collect())?;
    out.set_function(p2, (0..n1 * n2).map(|x| Some(x % n2)).collect())?;
    Ok(out)
}

/// `M[(N_a)]`: sorts `main` (fibres `{a} x N_a` in spine order) and `spine`
/// carrying `M` as `s_*`. Rib relations are lifted to `b_*` and hold only
/// inside a fibre; lifted rib functions are `u` on arguments from different
/// fibres. `v` maps each point to its spine point.
pub fn lex_sum(m: &Structure, ribs: &[Structure]) -> Result<Structure> {
    one_sorted(m, "lexicographic sum")?;
    if ribs.len() != m.len() {
        return Err(Error::input(format!("{} ribs given for a spine of size {}", ribs.len(), m.len())));
    }
    let Some(first) = ribs.first() else {
        return Err(Error::input("lexicographic sum over an empty spine"));
    };
    for r in ribs {
        one_sorted(r, "lexicographic sum")?;
        if r.signature() != first.signature() {
            return Err(Error::Signature(format!("rib `{}` has a different signature from `{}`", r.name(), first.name())));
        }
    }
    let mut sig = Signature::with_sorts(["main", "spine"])?;
    let (sr, sf) = copy_symbols(&mut sig, m, 1, "s_")?;
    let lifted_rels: Vec<usize> = first
        .signature()
        .relations()
        .iter()
        .map(|r| sig.add_relation(&format!("b_{}", sanitize(&r.name)), vec![0; r.arity()]))
        .collect::<Result<_>>()?;
    let lifted_funs: Vec<usize> = first
        .signature()
        .functions()
        .iter()
        .map(|f| sig.add_function(&format!("b_{}", sanitize(&f.name)), vec![0; f.args.len()], 0, true))
        .collect::<Result<_>>()?;
    let v = sig.add_function("v", vec![0], 1, false)?;
    let offsets: Vec<usize> = ribs
        .iter()
        .scan(0, |acc, r| {
            let o = *acc;
            *acc += r.len();
            Some(o)
        })
        .collect();
    let total: usize = ribs.iter().map(Structure::len).sum();
    let mut out = Structure::new(format!("{}[{}]", m.name(), ribs.len()), sig, vec![total, m.len()])?;
    fill_copy(&mut out, m, &sr, &sf)?;
    for (r, &nr) in lifted_rels.iter().enumerate() {
        let mut tuples = Vec::new();
        for (a, rib) in ribs.iter().enumerate() {
            tuples.extend(rib.relation(r).tuples().iter().map(|t| t.iter().map(|&x| offsets[a] + x).collect()));
        }
        out.set_relation(nr, tuples)?;
    }
    let fibre_of: Vec<usize> = (0..m.len()).flat_map(|a| std::iter::repeat_n(a, ribs[a].len())).collect();
    for (f, &nf) in lifted_funs.iter().enumerate() {
        let values = out
            .function_domain(nf)
            .into_iter()
            .map(|args| {
                let a = *args.first()?;
                let a = fibre_of[a];
                if args.iter().any(|&x| fibre_of[x] != a) {
                    return None;
                }
                let local: Vec<usize> = args.iter().map(|&x| x - offsets[a]).collect();
                ribs[a].apply(f, &local).map(|y| offsets[a] + y)
            })
            .collect();
        out.set_function(nf, values)?;
    }
    out.set_function(v, fibre_of.iter().map(|&a| Some(a)).collect())?;
    Ok(out)
}

fn fibre_map(sum: &Structure) -> Result<Vec<usize>> {
    let v = sum
        .signature()
        .function_index("v")
        .ok_or_else(|| Error::input(format!("`{}` is not a lexicographic sum", sum.name())))?;
    Ok(sum.function(v).values().iter().map(|x| x.expect("v is total")).collect())
}

/// Main-sort points over spine point `a`.
pub fn fibre(sum: &Structure, a: usize) -> Result<Vec<usize>> {
    Ok(fibre_map(sum)?.iter().enumerate().filter(|&(_, &b)| b == a).map(|(x, _)| x).collect())
}

/// Adds the unary spine relation `name` holding at `a` iff `N_a` satisfies
/// the sentence `phi`.
pub fn spine_predicate(sum: &Structure, ribs: &[Structure], name: &str, phi: &Formula) -> Result<Structure> {
    let spine = sum.signature().sort_index("spine").ok_or_else(|| Error::input("no spine sort"))?;
    if ribs.len() != sum.size(spine) {
        return Err(Error::input("one rib per spine point is required"));
    }
    let mut tuples = Vec::new();
    for (a, rib) in ribs.iter().enumerate() {
        if phi.compile(rib.signature())?.holds(rib)? {
            tuples.push(vec![a]);
        }
    }
    sum.with_relation(name, vec![spine], tuples)
}

/// Adds unary spine relations `rib_type_k`, one per isomorphism type of rib,
/// numbered in order of first appearance along the spine.
pub fn with_rib_types(sum: &Structure, ribs: &[Structure]) -> Result<Structure> {
    let spine = sum.signature().sort_index("spine").ok_or_else(|| Error::input("no spine sort"))?;
    let mut types = Vec::new();
    let mut members: Vec<Vec<Vec<usize>>> = Vec::new();
    for (a, rib) in ribs.iter().enumerate() {
        let key = canonical_form(rib)?;
        let k = match types.iter().position(|t| *t == key) {
            Some(k) => k,
            None => {
                types.push(key);
                members.push(Vec::new());
                types.len() - 1
            }
        };
        members[k].push(vec![a]);
    }
    let mut out = sum.clone();
    for (k, t) in members.into_iter().enumerate() {
        out = out.with_relation(&format!("rib_type_{k}"), vec![spine], t)?;
    }
    Ok(out)
}

/// `A ⊔ B` on one sort: `A` keeps its ids and `B` follows. Symbols present on
/// both sides must agree in arity; no tuple mixes the two parts.
pub fn disjoint_union(a: &Structure, b: &Structure) -> Result<Structure> {
    one_sorted(a, "disjoint union")?;
    one_sorted(b, "disjoint union")?;
    if !a.signature().is_relational() || !b.signature().is_relational() {
        return Err(Error::Unsupported("disjoint union of structures with functions".into()));
    }
    let mut sig = a.signature().clone();
    for r in b.signature().relations() {
        match sig.relation_index(&r.name) {
            Some(i) if sig.relations()[i].arity() != r.arity() => {
                return Err(Error::Signature(format!("`{}` has arity {} and {}", r.name, sig.relations()[i].arity(), r.arity())))
            }
            Some(_) => {}
            None => {
                sig.add_relation(&r.name, r.sorts.clone())?;
            }
        }
    }
    let n = a.len();
    let mut out = Structure::one_sorted(format!("{}+{}", a.name(), b.name()), sig.clone(), n + b.len())?;
    for (i, r) in sig.relations().iter().enumerate() {
        let mut tuples = Vec::new();
        if let Some(j) = a.signature().relation_index(&r.name) {
            tuples.extend(a.relation(j).tuples().iter().cloned());
        }
        if let Some(j) = b.signature().relation_index(&r.name) {
            tuples.extend(b.relation(j).tuples().iter().map(|t| t.iter().map(|&x| x + n).collect()));
        }
        out.set_relation(i, tuples)?;
    }
    Ok(out)
}

/// `A * B`: the domain of `A` carrying both structures, with `B` transported
/// along `bijection` (`A`-point `i` corresponds to `B`-point `bijection[i]`;
/// identity when omitted).
pub fn free_superposition(a: &Structure, b: &Structure, bijection: Option<&[usize]>) -> Result<Structure> {
    one_sorted(a, "superposition")?;
    one_sorted(b, "superposition")?;
    if !a.signature().is_relational() || !b.signature().is_relational() {
        return Err(Error::Unsupported("superposition of structures with functions".into()));
    }
    if a.len() != b.len() {
        return Err(Error::Precondition(format!("superposition needs equal sizes, got {} and {}", a.len(), b.len())));
    }
    let n = a.len();
    let to_a: Vec<usize> = match bijection {
        None => (0..n).collect(),
        Some(p) => {
            let mut inv = vec![usize::MAX; n];
            if p.len() != n {
                return Err(Error::input("bijection has the wrong length"));
            }
            for (i, &j) in p.iter().enumerate() {
                if j >= n || inv[j] != usize::MAX {
                    return Err(Error::input("map is not a bijection"));
                }
                inv[j] = i;
            }
            inv
        }
    };
    let mut sig = a.signature().clone();
    for r in b.signature().relations() {
        if sig.relation_index(&r.name).is_some() {
            return Err(Error::Signature(format!("symbol `{}` occurs in both signatures", r.name)));
        }
        sig.add_relation(&r.name, r.sorts.clone())?;
    }
    let mut out = Structure::one_sorted(format!("{}*{}", a.name(), b.name()), sig, n)?;
    let na = a.signature().relations().len();
    for r in 0..na {
        out.set_relation(r, a.relation(r).tuples().to_vec())?;
    }
    for r in 0..b.signature().relations().len() {
        out.set_relation(na + r, b.relation(r).tuples().iter().map(|t| t.iter().map(|&x| to_a[x]).collect()).collect())?;
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Rib assignments `spine point -> member index` with total size at most
/// `bound`, one per orbit of the spine's automorphism group.
fn rib_assignments(spine: &Structure, sizes: &[usize], bound: usize, budget: &mut Budget) -> Result<Vec<Vec<usize>>> {
    let auts = automorphism_group(spine)?.elements(100_000)?;
    let n = spine.len();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(
        cur: &mut Vec<usize>,
        n: usize,
        left: usize,
        sizes: &[usize],
        auts: &[crate::structures::Embedding],
        budget: &mut Budget,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if cur.len() == n {
            budget.tick()?;
            let minimal = auts.iter().all(|g| {
                let mut img = vec![0; n];
                for (a, &r) in cur.iter().enumerate() {
                    img[g.main()[a]] = r;
                }
                *cur <= img
            });
            if minimal {
                out.push(cur.clone());
            }
            return Ok(());
        }
        let rest = n - cur.len() - 1;
        let min_rest = rest * sizes.iter().copied().min().unwrap_or(0);
        for (i, &s) in sizes.iter().enumerate() {
            if s + min_rest <= left {
                cur.push(i);
                rec(cur, n, left - s, sizes, auts, budget, out)?;
                cur.pop();
            }
        }
        Ok(())
    }
    rec(&mut cur, n, bound, sizes, &auts, budget, &mut out)?;
    Ok(out)
}

fn hereditary_main(p: &Structure, bound: usize, budget: &mut Budget) -> Result<Vec<Structure>> {
    let main = p.size(0);
    let pis: Vec<usize> = p
        .signature()
        .functions()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.args == [0] && f.result != 0)
        .map(|(i, _)| i)
        .collect();
    let mut out = Vec::new();
    for k in 1..=bound.min(main) {
        for s in subsets(main, k) {
            budget.tick()?;
            let mut per_sort: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); p.sizes().len()];
            per_sort[0].extend(s.iter().copied());
            for &f in &pis {
                let r = p.signature().functions()[f].result;
                per_sort[r].extend(s.iter().map(|&x| p.apply(f, &[x]).expect("projections are total")));
            }
            let subs: Vec<Vec<usize>> = per_sort.into_iter().map(|s| s.into_iter().collect()).collect();
            out.push(p.induced(&subs)?);
        }
    }
    Ok(out)
}

/// Products of all member pairs, deduplicated up to isomorphism and bounded by
/// main-sort size. Full products are closed under the substructures generated
/// by main-sort subsets; disjoint unions and superpositions under induced
/// substructures; lexicographic sums take every rib assignment up to spine
/// automorphism and are not closed further. `budget` counts candidate structures.
pub fn product_fragment(
    f1: &ClassFragment,
    f2: &ClassFragment,
    kind: ProductKind,
    bound: usize,
    budget: u64,
) -> Result<ClassFragment> {
    let mut budget = Budget::new("product fragment candidates", budget);
    let mut items: Vec<Structure> = Vec::new();
    let (m1, m2) = (f1.members(), f2.members());
    match kind {
        ProductKind::Full => {
            for c in m1 {
                for d in m2 {
                    for s in hereditary_main(&full_product(c, d)?, bound, &mut budget)? {
                        items.push(s);
                    }
                }
            }
        }
        ProductKind::Lex => {
            let sizes: Vec<usize> = m2.iter().map(Structure::len).collect();
            for c in m1 {
                for assignment in rib_assignments(c, &sizes, bound, &mut budget)? {
                    let ribs: Vec<Structure> = assignment.iter().map(|&i| m2[i].clone()).collect();
                    items.push(lex_sum(c, &ribs)?);
                }
            }
        }
        ProductKind::Disjoint | ProductKind::Superposition => {
            let mut base = Vec::new();
            for c in m1 {
                for d in m2 {
                    if kind == ProductKind::Disjoint {
                        if c.len() + d.len() <= bound {
                            budget.tick()?;
                            base.push(disjoint_union(c, d)?);
                        }
                    } else if c.len() == d.len() && c.len() <= bound {
                        for p in permutations(c.len()) {
                            budget.tick()?;
                            base.push(free_superposition(c, d, Some(&p))?);
                        }
                    }
                }
            }
            for s in &base {
                budget.spend(1 << s.len())?;
            }
            let closed: Vec<Vec<Structure>> = base
                .par_iter()
                .map(|s| {
                    (1..=s.len())
                        .flat_map(|k| subsets(s.len(), k))
                        .map(|sub| s.induced_main(&sub))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            items.extend(closed.into_iter().flatten());
        }
    }
    let sig = match items.first() {
        Some(s) => s.signature().clone(),
        None => return Err(Error::input("the product fragment is empty at this bound")),
    };
    let name = format!("{}({},{})", kind, f1.name, f2.name);
    ClassFragment::new(name, sig, bound, items)
}
