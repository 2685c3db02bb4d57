use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::qf_type_main;
use crate::structures::{automorphism_group, Elem, Structure};

pub const DEFAULT_MAX_CLASSES: usize = 20;

/// One free bit of an edge assignment on `{0,1} x I`: whether
/// `(e0, i) ~ (e1, j)` for pairs `(i, j)` of one type, identified with the
/// converse bit `(e1, j) ~ (e0, i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeClass {
    /// A pair realising the type.
    pub pair: [usize; 2],
    pub eps: [u8; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeAssignment {
    pub mask: u64,
    pub on: Vec<EdgeClass>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReasonableReport {
    pub reasonable: bool,
    pub classes: usize,
    pub assignments: u64,
    pub violations: u64,
    /// The violating assignment with the least mask.
    pub witness: Option<EdgeAssignment>,
}

/// The graph an assignment induces, tested against the three allowed shapes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssignmentCheck {
    /// The predicate depends only on the pair type and the two tags, and is symmetric.
    pub consistent: bool,
    pub mask: Option<u64>,
    pub connected: bool,
    pub within_c: bool,
    pub within_d: bool,
}

impl AssignmentCheck {
    pub fn violates(&self) -> bool {
        self.consistent && !(self.connected || self.within_c || self.within_d)
    }
}

/// Pair types and the classes of edge bits over them.
struct Layout {
    n: usize,
    /// `class[(e0 * 2 + e1) * n * n + i * n + j]`, `usize::MAX` for loops.
    class: Vec<usize>,
    reps: Vec<EdgeClass>,
    /// Per class: only rungs / only same-row edges.
    rung: Vec<bool>,
    row: Vec<bool>,
}

impl Layout {
    fn new(m: &Structure) -> Result<Layout> {
        let n = m.len();
        if 2 * n > 128 {
            return Err(Error::Unsupported("reasonableness checks beyond 64 points".into()));
        }
        let mut types: Vec<Vec<u32>> = Vec::new();
        let mut ty = vec![0usize; n * n];
        for i in 0..n {
            for j in 0..n {
                let key = qf_type_main(m, &[i, j]).as_words().to_vec();
                ty[i * n + j] = match types.iter().position(|t| *t == key) {
                    Some(p) => p,
                    None => {
                        types.push(key);
                        types.len() - 1
                    }
                };
            }
        }
        let mut class = vec![usize::MAX; 4 * n * n];
        let mut by_key: Vec<(usize, u8, u8)> = Vec::new();
        let mut reps = Vec::new();
        let (mut rung, mut row) = (Vec::new(), Vec::new());
        for i in 0..n {
            for j in 0..n {
                for e0 in 0..2u8 {
                    for e1 in 0..2u8 {
                        if i == j && e0 == e1 {
                            continue;
                        }
                        let slot = (e0 as usize * 2 + e1 as usize) * n * n + i * n + j;
                        let key = (ty[i * n + j], e0, e1);
                        let conv = (ty[j * n + i], e1, e0);
                        let c = match by_key.iter().position(|k| *k == key || *k == conv) {
                            Some(c) => c,
                            None => {
                                by_key.push(key);
                                reps.push(EdgeClass { pair: [i, j], eps: [e0, e1] });
                                rung.push(i == j);
                                row.push(e0 == e1);
                                by_key.len() - 1
                            }
                        };
                        class[slot] = c;
                    }
                }
            }
        }
        Ok(Layout { n, class, reps, rung, row })
    }

    fn slot(&self, i: usize, j: usize, e0: u8, e1: u8) -> usize {
        (e0 as usize * 2 + e1 as usize) * self.n * self.n + i * self.n + j
    }

    /// Vertex `(e, i)` is bit `e * n + i`. Per class, the neighbourhoods it adds.
    fn adjacency(&self) -> Vec<Vec<(usize, u128)>> {
        let n = self.n;
        let mut adj = vec![vec![0u128; 2 * n]; self.reps.len()];
        for i in 0..n {
            for j in 0..n {
                for e0 in 0..2u8 {
                    for e1 in 0..2u8 {
                        let c = self.class[self.slot(i, j, e0, e1)];
                        if c != usize::MAX {
                            adj[c][e0 as usize * n + i] |= 1u128 << (e1 as usize * n + j);
                        }
                    }
                }
            }
        }
        adj.into_iter()
            .map(|rows| rows.into_iter().enumerate().filter(|(_, b)| *b != 0).collect())
            .collect()
    }

    fn shape(&self, mask: u64, adj: &[Vec<(usize, u128)>], nbr: &mut [u128]) -> (bool, bool, bool) {
        let within_c = (0..self.reps.len()).all(|c| mask >> c & 1 == 0 || self.rung[c]);
        let within_d = (0..self.reps.len()).all(|c| mask >> c & 1 == 0 || self.row[c]);
        nbr.iter_mut().for_each(|x| *x = 0);
        for (c, rows) in adj.iter().enumerate() {
            if mask >> c & 1 == 1 {
                for &(v, b) in rows {
                    nbr[v] |= b;
                }
            }
        }
        (spans(nbr), within_c, within_d)
    }

    fn assignment(&self, mask: u64) -> EdgeAssignment {
        let on = (0..self.reps.len()).filter(|c| mask >> c & 1 == 1).map(|c| self.reps[c].clone()).collect();
        EdgeAssignment { mask, on }
    }
}

pub fn is_reasonable(m: &Structure) -> Result<ReasonableReport> {
    is_reasonable_with(m, DEFAULT_MAX_CLASSES)
}

/// Enumerates every edge assignment determined by pair types and tags.
pub fn is_reasonable_with(m: &Structure, max_classes: usize) -> Result<ReasonableReport> {
    main_only(m)?;
    let layout = Layout::new(m)?;
    let classes = layout.reps.len();
    if classes > max_classes.min(40) {
        return Err(Error::Budget { what: "edge classes for a reasonableness check", limit: max_classes as u64 });
    }
    let adj = layout.adjacency();
    let total = 1u64 << classes;
    const CHUNK: u64 = 1 << 12;
    let parts: Vec<(u64, Option<u64>)> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut nbr = vec![0u128; 2 * layout.n];
            let mut count = 0;
            let mut first = None;
            for mask in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let (conn, ic, id) = layout.shape(mask, &adj, &mut nbr);
                if !(conn || ic || id) {
                    count += 1;
                    first.get_or_insert(mask);
                }
            }
            (count, first)
        })
        .collect();
    let violations = parts.iter().map(|p| p.0).sum();
    let witness = parts.iter().find_map(|p| p.1).map(|mask| layout.assignment(mask));
    Ok(ReasonableReport { reasonable: witness.is_none(), classes, assignments: total, violations, witness })
}

/// Evaluates the graph `edge(i, j, e0, e1)` on `{0,1} x I`; loops are ignored.
pub fn check_assignment(m: &Structure, edge: impl Fn(usize, usize, u8, u8) -> bool) -> Result<AssignmentCheck> {
    main_only(m)?;
    let layout = Layout::new(m)?;
    let n = layout.n;
    let mut value: Vec<Option<bool>> = vec![None; layout.reps.len()];
    let mut consistent = true;
    for i in 0..n {
        for j in 0..n {
            for e0 in 0..2u8 {
                for e1 in 0..2u8 {
                    let c = layout.class[layout.slot(i, j, e0, e1)];
                    if c == usize::MAX {
                        continue;
                    }
                    let b = edge(i, j, e0, e1);
                    match value[c] {
                        None => value[c] = Some(b),
                        Some(v) if v != b => consistent = false,
                        _ => {}
                    }
                }
            }
        }
    }
    let mask = value.iter().enumerate().fold(0u64, |acc, (c, v)| if *v == Some(true) { acc | 1 << c } else { acc });
    // The graph itself, edge by edge, so that an inconsistent predicate is still described.
    let mut nbr = vec![0u128; 2 * n];
    let (mut within_c, mut within_d) = (true, true);
    for i in 0..n {
        for j in 0..n {
            for e0 in 0..2u8 {
                for e1 in 0..2u8 {
                    if (i == j && e0 == e1) || !edge(i, j, e0, e1) {
                        continue;
                    }
                    nbr[e0 as usize * n + i] |= 1u128 << (e1 as usize * n + j);
                    nbr[e1 as usize * n + j] |= 1u128 << (e0 as usize * n + i);
                    within_c &= i == j;
                    within_d &= e0 == e1;
                }
            }
        }
    }
    let connected = spans(&nbr);
    Ok(AssignmentCheck { consistent, mask: consistent.then_some(mask), connected, within_c, within_d })
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimitivityReport {
    pub primitive: bool,
    /// A pair whose generated congruence is proper, with its classes.
    pub pair: Option<[usize; 2]>,
    pub congruence: Option<Vec<Vec<usize>>>,
}

/// Least invariant equivalence containing each pair: the components of the
/// orbit of the pair under the automorphism group.
pub fn is_primitive(m: &Structure) -> Result<PrimitivityReport> {
    main_only(m)?;
    let n = m.len();
    let group = automorphism_group(m)?;
    for a in 0..n {
        for b in a + 1..n {
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while p[r] != r {
                    r = p[r];
                }
                let mut y = x;
                while p[y] != r {
                    let next = p[y];
                    p[y] = r;
                    y = next;
                }
                r
            }
            for t in group.tuple_orbit(&[Elem::main(a), Elem::main(b)]) {
                let (x, y) = (find(&mut parent, t[0].id), find(&mut parent, t[1].id));
                parent[x.max(y)] = x.min(y);
            }
            let mut classes: Vec<Vec<usize>> = Vec::new();
            let mut slot = vec![usize::MAX; n];
            for x in 0..n {
                let r = find(&mut parent, x);
                if slot[r] == usize::MAX {
                    slot[r] = classes.len();
                    classes.push(Vec::new());
                }
                classes[slot[r]].push(x);
            }
            if classes.len() > 1 {
                return Ok(PrimitivityReport { primitive: false, pair: Some([a, b]), congruence: Some(classes) });
            }
        }
    }
    Ok(PrimitivityReport { primitive: true, pair: None, congruence: None })
}

#[derive(Clone, Debug, Serialize)]
pub struct HomogeneityReport {
    pub homogeneous: bool,
    /// Two tuples with one quantifier-free type in different orbits.
    pub witness: Option<[Vec<usize>; 2]>,
}

/// Finite homogeneity through the one-point extension property: tuples of
/// one quantifier-free type must extend to the same types.
pub fn is_homogeneous(m: &Structure) -> Result<HomogeneityReport> {
    main_only(m)?;
    let n = m.len();
    let mut tuple = Vec::with_capacity(n);
    for k in 1..n {
        let mut seen: HashMap<Vec<u32>, (Vec<usize>, Vec<Vec<u32>>)> = HashMap::new();
        let mut witness = None;
        super::sequence::injective_tuples(n, k, &mut |t: &[usize]| {
            if witness.is_some() {
                return;
            }
            tuple.clear();
            tuple.extend_from_slice(t);
            let mut ext: Vec<Vec<u32>> = (0..n)
                .filter(|c| !t.contains(c))
                .map(|c| {
                    tuple.push(c);
                    let w = qf_type_main(m, &tuple).as_words().to_vec();
                    tuple.pop();
                    w
                })
                .collect();
            ext.sort_unstable();
            ext.dedup();
            let key = qf_type_main(m, t).as_words().to_vec();
            match seen.get(&key) {
                Some((first, e)) if *e != ext => witness = Some([first.clone(), t.to_vec()]),
                Some(_) => {}
                None => {
                    seen.insert(key, (t.to_vec(), ext));
                }
            }
        });
        if witness.is_some() {
            return Ok(HomogeneityReport { homogeneous: false, witness });
        }
    }
    Ok(HomogeneityReport { homogeneous: true, witness: None })
}

/// Whether vertex 0 reaches every vertex of the bitmask graph.
fn spans(nbr: &[u128]) -> bool {
    let all = if nbr.len() == 128 { u128::MAX } else { (1u128 << nbr.len()) - 1 };
    let (mut seen, mut frontier) = (1u128, 1u128);
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = nbr[v] & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen == all
}

fn main_only(m: &Structure) -> Result<()> {
    if m.signature().is_one_sorted() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("`{}` is many-sorted", m.name())))
    }
}
