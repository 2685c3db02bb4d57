use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trigraph::Trigraph;
use crate::error::{Error, Result};
use crate::structures::{canonical_form, Structure};

pub const DEFAULT_EXACT_BOUND: usize = 10;
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 22;

/// Merges `[u, v]` in order; `u` survives. `red_degrees[s]` is the largest
/// red degree after step `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionSequence {
    pub merges: Vec<[usize; 2]>,
    pub red_degrees: Vec<usize>,
    pub width: usize,
}

impl ContractionSequence {
    /// Replays `merges` on `t`, recomputing every red edge from the parts of
    /// the original vertex set. Fails on a merge of dead or equal vertices or
    /// if more than one vertex is left at the end.
    pub fn replay(t: &Trigraph, merges: &[[usize; 2]]) -> Result<ContractionSequence> {
        let n = t.slots();
        let mut parts: Vec<Vec<usize>> = (0..n).map(|v| if t.is_live(v) { vec![v] } else { Vec::new() }).collect();
        let mut red_degrees = Vec::with_capacity(merges.len());
        for &[u, v] in merges {
            if u == v || u >= n || v >= n || parts[u].is_empty() || parts[v].is_empty() {
                return Err(Error::input(format!("merge ({u}, {v}) does not name two live vertices")));
            }
            let moved = std::mem::take(&mut parts[v]);
            parts[u].extend(moved);
            let live: Vec<usize> = (0..n).filter(|&p| !parts[p].is_empty()).collect();
            let mut degree = vec![0usize; n];
            for (i, &p) in live.iter().enumerate() {
                for &q in &live[i + 1..] {
                    if mixed(t, &parts[p], &parts[q]) {
                        degree[p] += 1;
                        degree[q] += 1;
                    }
                }
            }
            red_degrees.push(degree.into_iter().max().unwrap_or(0));
        }
        let left = parts.iter().filter(|p| !p.is_empty()).count();
        if left > 1 {
            return Err(Error::input(format!("{left} vertices remain after the last merge")));
        }
        let start = t.max_red_degree();
        let width = red_degrees.iter().copied().max().unwrap_or(0).max(start);
        Ok(ContractionSequence { merges: merges.to_vec(), red_degrees, width })
    }

    /// Whether replaying the merges reproduces the recorded trace.
    pub fn verify(&self, t: &Trigraph) -> bool {
        ContractionSequence::replay(t, &self.merges).is_ok_and(|r| r == *self)
    }
}

/// Some pair across the two parts is red, or the black pairs are neither all nor none.
fn mixed(t: &Trigraph, p: &[usize], q: &[usize]) -> bool {
    let mut black = 0usize;
    for &a in p {
        for &b in q {
            if t.red_neighbours(a) >> b & 1 == 1 {
                return true;
            }
            black += (t.black_neighbours(a) >> b & 1) as usize;
        }
    }
    black != 0 && black != p.len() * q.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthMode {
    Exact,
    UpperBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwinWidth {
    pub width: usize,
    pub mode: WidthMode,
    pub certificate: ContractionSequence,
    /// Why the value is only an upper bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Search nodes; varies with scheduling when threads share the memo.
    #[serde(skip)]
    pub nodes: u64,
}

impl TwinWidth {
    pub fn is_exact(&self) -> bool {
        self.mode == WidthMode::Exact
    }
}

/// How failed trigraphs are remembered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemoKey {
    /// Canonical forms, so isomorphic states share an entry.
    #[default]
    Canonical,
    /// The labelled edge sets. A state reached from a graph is fixed by the
    /// partition of the original vertices, so there are at most Bell(n).
    Labelled,
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Larger inputs get the heuristic bound only.
    pub max_vertices: usize,
    pub budget: u64,
    pub memo: MemoKey,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_vertices: DEFAULT_EXACT_BOUND, budget: DEFAULT_NODE_BUDGET, memo: MemoKey::Canonical }
    }
}

pub fn twin_width(g: &Structure, opts: &SolverOptions) -> Result<TwinWidth> {
    twin_width_of(&Trigraph::from_graph(g)?, opts)
}

/// Exact width by iterative deepening below the heuristic bound. Falls back
/// to the heuristic, labelled as such, past the size bound or the budget.
pub fn twin_width_of(t: &Trigraph, opts: &SolverOptions) -> Result<TwinWidth> {
    let upper = heuristic_sequence(t);
    let bound = |note: String| TwinWidth {
        width: upper.width,
        mode: WidthMode::UpperBound,
        certificate: upper.clone(),
        note: Some(note),
        nodes: 0,
    };
    if t.live_count() > opts.max_vertices {
        return Ok(bound(format!("{} vertices exceed the exact bound {}", t.live_count(), opts.max_vertices)));
    }
    let nodes = AtomicU64::new(0);
    for d in t.max_red_degree()..upper.width {
        let search = Search { d, failed: DashSet::new(), nodes: &nodes, budget: opts.budget, memo: opts.memo };
        match search.root(t) {
            Ok(Some(merges)) => {
                let certificate = ContractionSequence::replay(t, &merges)?;
                debug_assert!(certificate.width <= d);
                return Ok(TwinWidth {
                    width: certificate.width,
                    mode: WidthMode::Exact,
                    certificate,
                    note: None,
                    nodes: nodes.load(Ordering::Relaxed),
                });
            }
            Ok(None) => {}
            Err(Error::Budget { limit, .. }) => {
                return Ok(TwinWidth {
                    nodes: nodes.load(Ordering::Relaxed),
                    ..bound(format!("node budget {limit} exhausted while deciding width {d}"))
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(TwinWidth { width: upper.width, mode: WidthMode::Exact, certificate: upper, note: None, nodes: nodes.load(Ordering::Relaxed) })
}

/// Repeatedly takes the merge with the least resulting red degree; ties go
/// to the smallest pair.
pub fn heuristic_sequence(t: &Trigraph) -> ContractionSequence {
    let mut cur = t.clone();
    let mut merges = Vec::new();
    while cur.live_count() > 1 {
        let live: Vec<usize> = cur.live().collect();
        let mut best: Option<(usize, [usize; 2], Trigraph)> = None;
        for (i, &u) in live.iter().enumerate() {
            for &v in &live[i + 1..] {
                let mut next = cur.clone();
                next.merge(u, v);
                let score = next.max_red_degree();
                if best.as_ref().is_none_or(|b| score < b.0) {
                    best = Some((score, [u, v], next));
                }
            }
        }
        let (_, pair, next) = best.expect("two live vertices");
        merges.push(pair);
        cur = next;
    }
    ContractionSequence::replay(t, &merges).expect("merges of live vertices")
}

/// Width 0 exactly when contracting twins, in any order, ends at one vertex.
pub fn is_cograph(g: &Structure) -> Result<bool> {
    let mut t = Trigraph::from_graph(g)?;
    reduce_twins(&mut t, &mut Vec::new());
    Ok(t.live_count() <= 1)
}

/// Contracts twins until none are left. Twin contraction never raises a red
/// degree and leaves a copy of an induced subtrigraph, so it is safe for
/// every width.
fn reduce_twins(t: &mut Trigraph, path: &mut Vec<[usize; 2]>) {
    'outer: loop {
        let live: Vec<usize> = t.live().collect();
        for (i, &u) in live.iter().enumerate() {
            for &v in &live[i + 1..] {
                if t.are_twins(u, v) {
                    t.merge(u, v);
                    path.push([u, v]);
                    continue 'outer;
                }
            }
        }
        return;
    }
}

struct Search<'a> {
    d: usize,
    /// Trigraphs that cannot be finished within `d`.
    failed: DashSet<Vec<u32>>,
    nodes: &'a AtomicU64,
    budget: u64,
    memo: MemoKey,
}

impl Search<'_> {
    /// Twins, then the small case and the memo, then the children.
    fn prepare(&self, t: &mut Trigraph, path: &mut Vec<[usize; 2]>) -> Result<Step> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(Error::Budget { what: "twin-width search nodes", limit: self.budget });
        }
        reduce_twins(t, path);
        if t.live_count() <= self.d + 1 {
            let live: Vec<usize> = t.live().collect();
            for &v in &live[1..] {
                t.merge(live[0], v);
                path.push([live[0], v]);
            }
            return Ok(Step::Done);
        }
        let key = match self.memo {
            MemoKey::Labelled => t.key(),
            MemoKey::Canonical => canonical_form(&t.to_structure())?.0,
        };
        if self.failed.contains(&key) {
            return Ok(Step::Failed);
        }
        let live: Vec<usize> = t.live().collect();
        let mut children = Vec::new();
        for (i, &u) in live.iter().enumerate() {
            for &v in &live[i + 1..] {
                let mut next = t.clone();
                next.merge(u, v);
                if next.max_red_degree() <= self.d {
                    children.push(([u, v], next));
                }
            }
        }
        Ok(Step::Branch(key, children))
    }

    fn solve(&self, mut t: Trigraph, path: &mut Vec<[usize; 2]>) -> Result<bool> {
        let mark = path.len();
        let (key, children) = match self.prepare(&mut t, path)? {
            Step::Done => return Ok(true),
            Step::Failed => {
                path.truncate(mark);
                return Ok(false);
            }
            Step::Branch(key, children) => (key, children),
        };
        for (pair, next) in children {
            let here = path.len();
            path.push(pair);
            if self.solve(next, path)? {
                return Ok(true);
            }
            path.truncate(here);
        }
        self.failed.insert(key);
        path.truncate(mark);
        Ok(false)
    }

    /// The first child in pair order that finishes wins, so the certificate
    /// does not depend on scheduling.
    fn root(&self, t: &Trigraph) -> Result<Option<Vec<[usize; 2]>>> {
        let mut t = t.clone();
        let mut path = Vec::new();
        let (key, children) = match self.prepare(&mut t, &mut path)? {
            Step::Done => return Ok(Some(path)),
            Step::Failed => return Ok(None),
            Step::Branch(key, children) => (key, children),
        };
        let found = children
            .into_par_iter()
            .map(|(pair, next)| {
                let mut tail = vec![pair];
                Ok(self.solve(next, &mut tail)?.then_some(tail))
            })
            .find_map_first(|r: Result<Option<Vec<[usize; 2]>>>| match r {
                Ok(None) => None,
                other => Some(other),
            });
        match found {
            Some(r) => Ok(r?.map(|tail| {
                path.extend(tail);
                path
            })),
            None => {
                self.failed.insert(key);
                Ok(None)
            }
        }
    }
}

enum Step {
    Done,
    Failed,
    Branch(Vec<u32>, Vec<([usize; 2], Trigraph)>),
}
