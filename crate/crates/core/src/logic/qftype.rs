//! Quantifier-free types of tuples.
//!
//! Without function symbols the type of a tuple is its equality pattern plus
//! the set of relation atoms over its coordinates. With functions, the tuple
//! is first closed under them in a fixed order so that atoms about function
//! values (for instance equal projections) are part of the type.

use std::collections::HashSet;

use crate::structures::{for_each_tuple, Elem, Structure};

/// Canonical serialisation of a quantifier-free type; equal iff the types are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QfType(Vec<u32>);

impl QfType {
    pub fn as_words(&self) -> &[u32] {
        &self.0
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|x| x.to_le_bytes()).collect()
    }
}

const U: u32 = u32::MAX;

/// The closure of `tuple` under the functions of `m`, with the function
/// records `(f, argument positions, result position)` in discovery order.
pub fn function_closure(m: &Structure, tuple: &[Elem]) -> (Vec<Elem>, Vec<(usize, Vec<usize>, Option<usize>)>) {
    let sig = m.signature();
    let mut elems = tuple.to_vec();
    let mut records = Vec::new();
    if sig.functions().is_empty() {
        return (elems, records);
    }
    let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();
    loop {
        let mut grew = false;
        for (f, sym) in sig.functions().iter().enumerate() {
            let positions: Vec<Vec<usize>> = sym
                .args
                .iter()
                .map(|&s| (0..elems.len()).filter(|&i| elems[i].sort == s).collect())
                .collect();
            let sizes: Vec<usize> = positions.iter().map(Vec::len).collect();
            let mut fresh = Vec::new();
            for idx in crate::structures::grid(&sizes) {
                let pos: Vec<usize> = idx.iter().zip(&positions).map(|(&i, p)| p[i]).collect();
                if seen.contains(&(f, pos.clone())) {
                    continue;
                }
                seen.insert((f, pos.clone()));
                fresh.push(pos);
            }
            if sym.args.is_empty() && !seen.contains(&(f, Vec::new())) {
                seen.insert((f, Vec::new()));
                fresh.push(Vec::new());
            }
            for pos in fresh {
                let args: Vec<usize> = pos.iter().map(|&p| elems[p].id).collect();
                let res = m.apply(f, &args).map(|v| {
                    let e = Elem::new(sym.result, v);
                    match elems.iter().position(|&x| x == e) {
                        Some(p) => p,
                        None => {
                            elems.push(e);
                            grew = true;
                            elems.len() - 1
                        }
                    }
                });
                records.push((f, pos, res));
            }
        }
        if !grew {
            return (elems, records);
        }
    }
}

pub fn qf_type(m: &Structure, tuple: &[Elem]) -> QfType {
    let (elems, records) = function_closure(m, tuple);
    let n = elems.len();
    let mut code = Vec::with_capacity(4 * n + 8);
    code.push(tuple.len() as u32);
    code.push(n as u32);
    for (i, e) in elems.iter().enumerate() {
        code.push(e.sort as u32);
        code.push(elems.iter().position(|x| x == e).unwrap_or(i) as u32);
    }
    code.push(records.len() as u32);
    for (f, pos, res) in &records {
        code.push(*f as u32);
        code.extend(pos.iter().map(|&p| p as u32));
        code.push(res.map_or(U, |p| p as u32));
    }
    let one_sorted = m.signature().is_one_sorted();
    let mut buf = Vec::new();
    for (r, sym) in m.signature().relations().iter().enumerate() {
        code.push(U - 1);
        let arity = sym.arity();
        for_each_tuple(n, arity, |idx| {
            if !one_sorted && idx.iter().zip(&sym.sorts).any(|(&i, &s)| elems[i].sort != s) {
                return;
            }
            buf.clear();
            buf.extend(idx.iter().map(|&i| elems[i].id));
            if m.holds(r, &buf) {
                code.extend(idx.iter().map(|&i| i as u32));
            }
        });
    }
    QfType(code)
}

/// Type of a tuple from the main sort.
pub fn qf_type_main(m: &Structure, ids: &[usize]) -> QfType {
    let t: Vec<Elem> = ids.iter().map(|&i| Elem::main(i)).collect();
    qf_type(m, &t)
}
