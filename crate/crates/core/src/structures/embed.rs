use std::ops::ControlFlow;

use super::structure::{Elem, Structure};
use crate::error::{Error, Result};

/// An injective map per sort that preserves and reflects all relations and
/// commutes with all functions (including where they take the value `u`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding(pub Vec<Vec<usize>>);

impl Embedding {
    pub fn main(&self) -> &[usize] {
        &self.0[0]
    }

    #[inline]
    pub fn apply(&self, e: Elem) -> Elem {
        Elem::new(e.sort, self.0[e.sort][e.id])
    }

    pub fn compose(&self, inner: &Embedding) -> Embedding {
        // (self . inner)(x) = self(inner(x))
        Embedding(
            inner
                .0
                .iter()
                .zip(&self.0)
                .map(|(i, o)| i.iter().map(|&x| o[x]).collect())
                .collect(),
        )
    }

    pub fn identity(sizes: &[usize]) -> Embedding {
        Embedding(sizes.iter().map(|&n| (0..n).collect()).collect())
    }
}

pub fn check_compatible(a: &Structure, c: &Structure) -> Result<()> {
    if a.signature() != c.signature() {
        return Err(Error::Signature(format!(
            "`{}` and `{}` have different signatures",
            a.name(),
            c.name()
        )));
    }
    Ok(())
}

enum Check {
    Rel { r: usize, tuple: Vec<Elem>, holds: bool },
    Fun { f: usize, args: Vec<Elem>, value: Option<Elem> },
}

struct Plan {
    order: Vec<Elem>,
    checks: Vec<Vec<Check>>,
}

fn plan(a: &Structure) -> Plan {
    let order: Vec<Elem> = a.elements().collect();
    let pos = |e: Elem| order.iter().position(|&x| x == e).unwrap();
    let mut checks: Vec<Vec<Check>> = (0..order.len()).map(|_| Vec::new()).collect();
    let sig = a.signature();
    for (r, sym) in sig.relations().iter().enumerate() {
        let per_sort: Vec<usize> = sym.sorts.iter().map(|&s| a.size(s)).collect();
        for t in super::structure::grid(&per_sort) {
            let tuple: Vec<Elem> = t.iter().zip(&sym.sorts).map(|(&i, &s)| Elem::new(s, i)).collect();
            // Nullary symbols are checked with the first element.
            let last = tuple.iter().map(|&e| pos(e)).max().or((!order.is_empty()).then_some(0));
            let holds = a.holds(r, &t);
            if let Some(p) = last {
                checks[p].push(Check::Rel { r, tuple, holds });
            }
        }
    }
    for (f, sym) in sig.functions().iter().enumerate() {
        for args in a.function_domain(f) {
            let value = a.apply(f, &args).map(|v| Elem::new(sym.result, v));
            let args: Vec<Elem> =
                args.iter().zip(&sym.args).map(|(&i, &s)| Elem::new(s, i)).collect();
            let last = args
                .iter()
                .chain(value.iter())
                .map(|&e| pos(e))
                .max()
                .or((!order.is_empty()).then_some(0));
            if let Some(p) = last {
                checks[p].push(Check::Fun { f, args, value });
            }
        }
    }
    Plan { order, checks }
}

fn passes(checks: &[Check], map: &[Vec<usize>], c: &Structure, buf: &mut Vec<usize>) -> bool {
    for ch in checks {
        match ch {
            Check::Rel { r, tuple, holds } => {
                buf.clear();
                buf.extend(tuple.iter().map(|e| map[e.sort][e.id]));
                if c.holds(*r, buf) != *holds {
                    return false;
                }
            }
            Check::Fun { f, args, value } => {
                buf.clear();
                buf.extend(args.iter().map(|e| map[e.sort][e.id]));
                let got = c.apply(*f, buf);
                if got != value.map(|v| map[v.sort][v.id]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Visits embeddings `A -> C` in lexicographic order of their maps, optionally
/// extending a partial assignment `fixed[s][i] = Some(image)`.
pub fn search_embeddings(
    a: &Structure,
    c: &Structure,
    fixed: Option<&[Vec<Option<usize>>]>,
    mut visit: impl FnMut(&Embedding) -> ControlFlow<()>,
) -> Result<()> {
    check_compatible(a, c)?;
    let plan = plan(a);
    let mut map: Vec<Vec<usize>> = a.sizes().iter().map(|&n| vec![usize::MAX; n]).collect();
    let mut used: Vec<Vec<bool>> = c.sizes().iter().map(|&n| vec![false; n]).collect();
    let mut buf = Vec::new();
    let mut out = Embedding(Vec::new());
    fn rec(
        t: usize,
        plan: &Plan,
        c: &Structure,
        fixed: Option<&[Vec<Option<usize>>]>,
        map: &mut Vec<Vec<usize>>,
        used: &mut Vec<Vec<bool>>,
        buf: &mut Vec<usize>,
        out: &mut Embedding,
        visit: &mut dyn FnMut(&Embedding) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if t == plan.order.len() {
            out.0.clone_from(map);
            return visit(out);
        }
        let e = plan.order[t];
        let pinned = fixed.and_then(|f| f[e.sort][e.id]);
        let candidates: Vec<usize> = match pinned {
            Some(x) => vec![x],
            None => (0..c.size(e.sort)).collect(),
        };
        for x in candidates {
            if x >= c.size(e.sort) || used[e.sort][x] {
                continue;
            }
            map[e.sort][e.id] = x;
            if passes(&plan.checks[t], map, c, buf) {
                used[e.sort][x] = true;
                let flow = rec(t + 1, plan, c, fixed, map, used, buf, out, visit);
                used[e.sort][x] = false;
                flow?;
            }
        }
        map[e.sort][e.id] = usize::MAX;
        ControlFlow::Continue(())
    }
    let _ = rec(0, &plan, c, fixed, &mut map, &mut used, &mut buf, &mut out, &mut visit);
    Ok(())
}

pub fn enumerate_embeddings(a: &Structure, c: &Structure) -> Result<Vec<Embedding>> {
    let mut out = Vec::new();
    search_embeddings(a, c, None, |e| {
        out.push(e.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub fn count_embeddings(a: &Structure, c: &Structure) -> Result<u64> {
    let mut n = 0u64;
    search_embeddings(a, c, None, |_| {
        n += 1;
        ControlFlow::Continue(())
    })?;
    Ok(n)
}

pub fn first_embedding(a: &Structure, c: &Structure) -> Result<Option<Embedding>> {
    let mut found = None;
    search_embeddings(a, c, None, |e| {
        found = Some(e.clone());
        ControlFlow::Break(())
    })?;
    Ok(found)
}

pub fn embeds(a: &Structure, c: &Structure) -> Result<bool> {
    Ok(first_embedding(a, c)?.is_some())
}

/// Checks the embedding conditions directly, tuple by tuple.
pub fn is_embedding(a: &Structure, c: &Structure, map: &Embedding) -> bool {
    if a.signature() != c.signature() || map.0.len() != a.sizes().len() {
        return false;
    }
    for (s, m) in map.0.iter().enumerate() {
        if m.len() != a.size(s) || m.iter().any(|&x| x >= c.size(s)) {
            return false;
        }
        let mut seen = vec![false; c.size(s)];
        for &x in m {
            if std::mem::replace(&mut seen[x], true) {
                return false;
            }
        }
    }
    let sig = a.signature();
    for (r, sym) in sig.relations().iter().enumerate() {
        let per_sort: Vec<usize> = sym.sorts.iter().map(|&s| a.size(s)).collect();
        for t in super::structure::grid(&per_sort) {
            let img: Vec<usize> = t.iter().zip(&sym.sorts).map(|(&i, &s)| map.0[s][i]).collect();
            if a.holds(r, &t) != c.holds(r, &img) {
                return false;
            }
        }
    }
    for (f, sym) in sig.functions().iter().enumerate() {
        for args in a.function_domain(f) {
            let img: Vec<usize> = args.iter().zip(&sym.args).map(|(&i, &s)| map.0[s][i]).collect();
            if a.apply(f, &args).map(|v| map.0[sym.result][v]) != c.apply(f, &img) {
                return false;
            }
        }
    }
    true
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
