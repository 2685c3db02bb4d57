//! Passing between D-relations, pointed C-relations and their orders.

use crate::error::{Error, Result};
use crate::structures::{for_each_tuple, Signature, Structure};

fn rel(m: &Structure, name: &str, arity: usize) -> Result<usize> {
    let r = m.rel_index(name)?;
    if m.signature().relations()[r].arity() != arity {
        return Err(Error::Signature(format!("`{name}` must have arity {arity}")));
    }
    if !m.signature().is_one_sorted() {
        return Err(Error::Unsupported("transforms need one-sorted structures".into()));
    }
    Ok(r)
}

/// `C0(x; y, z) :<-> D(a, x; y, z)` on `M \ {a}`. Returns the C-structure and,
/// for each of its elements, the original id.
pub fn d_to_c_pointed(m: &Structure, a: usize) -> Result<(Structure, Vec<usize>)> {
    let d = rel(m, "D", 4)?;
    if a >= m.len() {
        return Err(Error::input(format!("point {a} out of range")));
    }
    let kept: Vec<usize> = (0..m.len()).filter(|&x| x != a).collect();
    let mut t = Vec::new();
    for_each_tuple(kept.len(), 3, |x| {
        if m.holds(d, &[a, kept[x[0]], kept[x[1]], kept[x[2]]]) {
            t.push(x.to_vec());
        }
    });
    let mut c = Structure::one_sorted(format!("{}_at{a}", m.name()), Signature::relational(&[("C", 3)]), kept.len())?;
    c.set_relation(0, t)?;
    Ok((c, kept))
}

/// The D-relation on `X + {a}` induced by a C-relation on `X`; `a` gets id `|X|`.
pub fn c_to_d(m: &Structure) -> Result<Structure> {
    let c = rel(m, "C", 3)?;
    let n = m.len();
    let a = n;
    let cc = |x: usize, y: usize, z: usize| x < n && y < n && z < n && m.holds(c, &[x, y, z]);
    let mut t = Vec::new();
    for_each_tuple(n + 1, 4, |q| {
        let (x, y, z, w) = (q[0], q[1], q[2], q[3]);
        let degenerate = (x == y && x != z && x != w) || (z == w && z != x && z != y);
        let distinct = x != y && x != z && x != w && y != z && y != w && z != w;
        let generic = distinct
            && ((x == a && cc(y, w, z))
                || (y == a && cc(x, w, z))
                || (z == a && cc(w, x, y))
                || (w == a && cc(z, x, y))
                || (cc(x, w, z) && cc(y, w, z))
                || (cc(z, x, y) && cc(w, x, y)));
        if degenerate || generic {
            t.push(q.to_vec());
        }
    });
    let mut d = Structure::one_sorted(format!("{}_d", m.name()), Signature::relational(&[("D", 4)]), n + 1)?;
    d.set_relation(0, t)?;
    Ok(d)
}

/// `x < y` iff `x` comes before `y` going round the cyclic order from `start`.
pub fn cut_cyclic_order(m: &Structure, start: usize) -> Result<Structure> {
    let co = rel(m, "CO", 3)?;
    let d = rel(m, "D", 4)?;
    let n = m.len();
    let mut lt = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x != y && (x == start || (y != start && m.holds(co, &[start, x, y]))) {
                lt.push(vec![x, y]);
            }
        }
    }
    let mut out = Structure::one_sorted(format!("{}_cut{start}", m.name()), Signature::relational(&[("D", 4), ("<", 2)]), n)?;
    out.set_relation(0, m.relation(d).tuples().to_vec())?;
    out.set_relation(1, lt)?;
    Ok(out)
}

/// From a convexly ordered D-relation: `C(x; y, z) :<-> D(m, x; y, z)` with `m`
/// the least element. Triples through `m` are degenerate and `m` is dropped,
/// so the result lives on `M \ {m}` with the induced order. Returns the
/// structure, `m`, and the original ids of the kept elements.
pub fn od_to_oc(mstr: &Structure) -> Result<(Structure, usize, Vec<usize>)> {
    let d = rel(mstr, "D", 4)?;
    let lt = rel(mstr, "<", 2)?;
    let n = mstr.len();
    if n == 0 {
        return Err(Error::Precondition("empty structure has no least element".into()));
    }
    let m = (0..n)
        .find(|&x| (0..n).all(|y| y == x || mstr.holds(lt, &[x, y])))
        .ok_or_else(|| Error::Precondition("`<` has no least element".into()))?;
    let kept: Vec<usize> = (0..n).filter(|&x| x != m).collect();
    let mut c = Vec::new();
    for_each_tuple(kept.len(), 3, |x| {
        if mstr.holds(d, &[m, kept[x[0]], kept[x[1]], kept[x[2]]]) {
            c.push(x.to_vec());
        }
    });
    let mut order = Vec::new();
    for_each_tuple(kept.len(), 2, |x| {
        if mstr.holds(lt, &[kept[x[0]], kept[x[1]]]) {
            order.push(x.to_vec());
        }
    });
    let mut out = Structure::one_sorted(format!("{}_oc", mstr.name()), Signature::relational(&[("C", 3), ("<", 2)]), kept.len())?;
    out.set_relation(0, c)?;
    out.set_relation(1, order)?;
    Ok((out, m, kept))
}
