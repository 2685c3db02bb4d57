use crate::error::{Error, Result};
use crate::structures::{Signature, Structure};

/// Vertex slots are bits of a `u64`.
pub const MAX_VERTICES: usize = 64;

/// Black and red edges over a set of live vertex slots. Contracting `u` and
/// `v` keeps the slot `u` and kills `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trigraph {
    alive: u64,
    black: Vec<u64>,
    red: Vec<u64>,
}

fn bit(v: usize) -> u64 {
    1u64 << v
}

impl Trigraph {
    pub fn new(n: usize, black: &[(usize, usize)], red: &[(usize, usize)]) -> Result<Trigraph> {
        if n > MAX_VERTICES {
            return Err(Error::Unsupported(format!("trigraphs beyond {MAX_VERTICES} vertices")));
        }
        let mut t = Trigraph {
            alive: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            black: vec![0; n],
            red: vec![0; n],
        };
        for (edges, is_red) in [(black, false), (red, true)] {
            for &(a, b) in edges {
                if a >= n || b >= n {
                    return Err(Error::input(format!("edge ({a}, {b}) outside {n} vertices")));
                }
                if a == b {
                    return Err(Error::input(format!("loop at {a}")));
                }
                let other = if is_red { &t.black } else { &t.red };
                if other[a] & bit(b) != 0 {
                    return Err(Error::input(format!("({a}, {b}) is both black and red")));
                }
                let adj = if is_red { &mut t.red } else { &mut t.black };
                adj[a] |= bit(b);
                adj[b] |= bit(a);
            }
        }
        Ok(t)
    }

    /// The trigraph of a graph: one symmetric irreflexive binary relation.
    pub fn from_graph(g: &Structure) -> Result<Trigraph> {
        check_graph(g)?;
        let e: Vec<(usize, usize)> =
            g.relation(0).tuples().iter().filter(|t| t[0] < t[1]).map(|t| (t[0], t[1])).collect();
        Trigraph::new(g.len(), &e, &[])
    }

    /// Number of slots, live or not.
    pub fn slots(&self) -> usize {
        self.black.len()
    }

    pub fn live_count(&self) -> usize {
        self.alive.count_ones() as usize
    }

    pub fn is_live(&self, v: usize) -> bool {
        v < self.slots() && self.alive & bit(v) != 0
    }

    pub fn live(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.slots()).filter(|&v| self.is_live(v))
    }

    pub fn black_neighbours(&self, v: usize) -> u64 {
        self.black[v]
    }

    pub fn red_neighbours(&self, v: usize) -> u64 {
        self.red[v]
    }

    pub fn red_degree(&self, v: usize) -> usize {
        self.red[v].count_ones() as usize
    }

    pub fn max_red_degree(&self) -> usize {
        self.live().map(|v| self.red_degree(v)).max().unwrap_or(0)
    }

    pub fn black_edges(&self) -> Vec<(usize, usize)> {
        self.edges(&self.black)
    }

    pub fn red_edges(&self) -> Vec<(usize, usize)> {
        self.edges(&self.red)
    }

    fn edges(&self, adj: &[u64]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in self.live() {
            for b in a + 1..self.slots() {
                if adj[a] & bit(b) != 0 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Same neighbourhoods of both colours, apart from each other.
    pub fn are_twins(&self, u: usize, v: usize) -> bool {
        let (mu, mv) = (!bit(v), !bit(u));
        self.black[u] & mu == self.black[v] & mv && self.red[u] & mu == self.red[v] & mv
    }

    pub fn contract(&self, u: usize, v: usize) -> Result<Trigraph> {
        if u == v {
            return Err(Error::input(format!("cannot contract {u} with itself")));
        }
        for x in [u, v] {
            if !self.is_live(x) {
                return Err(Error::input(format!("vertex {x} is not live")));
            }
        }
        let mut t = self.clone();
        t.merge(u, v);
        Ok(t)
    }

    /// `contract` without the checks.
    pub(crate) fn merge(&mut self, u: usize, v: usize) {
        let others = self.alive & !bit(u) & !bit(v);
        let black = self.black[u] & self.black[v] & others;
        let touched = (self.black[u] | self.black[v] | self.red[u] | self.red[v]) & others;
        let red = touched & !black;
        for x in 0..self.slots() {
            if others & bit(x) == 0 {
                continue;
            }
            self.black[x] &= !bit(u) & !bit(v);
            self.red[x] &= !bit(u) & !bit(v);
            if black & bit(x) != 0 {
                self.black[x] |= bit(u);
            }
            if red & bit(x) != 0 {
                self.red[x] |= bit(u);
            }
        }
        self.black[u] = black;
        self.red[u] = red;
        self.black[v] = 0;
        self.red[v] = 0;
        self.alive &= !bit(v);
    }

    /// The live set and both adjacencies as words.
    pub(crate) fn key(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(2 + 4 * self.slots());
        for w in std::iter::once(self.alive).chain(self.black.iter().copied()).chain(self.red.iter().copied()) {
            out.push(w as u32);
            out.push((w >> 32) as u32);
        }
        out
    }

    /// Live vertices relabelled `0..`, with relations `B` and `R`.
    pub fn to_structure(&self) -> Structure {
        let live: Vec<usize> = self.live().collect();
        let mut pos = vec![usize::MAX; self.slots()];
        for (i, &v) in live.iter().enumerate() {
            pos[v] = i;
        }
        let sig = Signature::relational(&[("B", 2), ("R", 2)]);
        let mut s = Structure::one_sorted("trigraph", sig, live.len()).expect("relational signature");
        for (r, adj) in [&self.black, &self.red].into_iter().enumerate() {
            let mut tuples = Vec::new();
            for &a in &live {
                for &b in &live {
                    if adj[a] & bit(b) != 0 {
                        tuples.push(vec![pos[a], pos[b]]);
                    }
                }
            }
            s.set_relation(r, tuples).expect("tuples within the domain");
        }
        s
    }
}

pub(crate) fn check_graph(g: &Structure) -> Result<()> {
    let sig = g.signature();
    let ok = sig.is_one_sorted()
        && sig.functions().is_empty()
        && sig.relations().len() == 1
        && sig.relations()[0].arity() == 2;
    if !ok {
        return Err(Error::Signature(format!("`{}` is not a graph: one binary relation is required", g.name())));
    }
    for t in g.relation(0).tuples() {
        if t[0] == t[1] {
            return Err(Error::input(format!("`{}` has a loop at {}", g.name(), t[0])));
        }
        if !g.holds(0, &[t[1], t[0]]) {
            return Err(Error::input(format!("`{}` is not symmetric at ({}, {})", g.name(), t[0], t[1])));
        }
    }
    Ok(())
}
