//! Small named structures used throughout.

use super::embed::subsets;
use super::signature::Signature;
use super::structure::Structure;

fn make(name: &str, sig: Signature, n: usize, rels: Vec<Vec<Vec<usize>>>) -> Structure {
    let mut m = Structure::one_sorted(name, sig, n).expect("valid sizes");
    for (r, t) in rels.into_iter().enumerate() {
        m.set_relation(r, t).expect("tuples in range");
    }
    m
}

/// `n` points, no relations.
pub fn pure_set(n: usize) -> Structure {
    make(&format!("set{n}"), Signature::one_sorted(), n, Vec::new())
}

/// The chain `0 < 1 < ... < n-1` over the symbol `<`.
pub fn linear_order(n: usize) -> Structure {
    let t = subsets(n, 2);
    make(&format!("chain{n}"), Signature::relational(&[("<", 2)]), n, vec![t])
}

/// Symmetric irreflexive `E` from an undirected edge list.
pub fn graph(name: &str, n: usize, edges: &[(usize, usize)]) -> Structure {
    let mut t = Vec::new();
    for &(a, b) in edges {
        assert!(a != b, "loops are not allowed in graphs");
        t.push(vec![a, b]);
        t.push(vec![b, a]);
    }
    make(name, Signature::relational(&[("E", 2)]), n, vec![t])
}

pub fn complete_graph(n: usize) -> Structure {
    let e: Vec<(usize, usize)> = subsets(n, 2).iter().map(|p| (p[0], p[1])).collect();
    graph(&format!("K{n}"), n, &e)
}

pub fn empty_graph(n: usize) -> Structure {
    graph(&format!("E{n}"), n, &[])
}

pub fn path_graph(n: usize) -> Structure {
    let e: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    graph(&format!("P{n}"), n, &e)
}

pub fn cycle_graph(n: usize) -> Structure {
    let e: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    graph(&format!("C{n}"), n, &e)
}

/// Graph on `n` vertices from the bits of `mask` over the pairs `subsets(n, 2)`.
pub fn graph_from_mask(n: usize, mask: u64) -> Structure {
    let e: Vec<(usize, usize)> = subsets(n, 2)
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, p)| (p[0], p[1]))
        .collect();
    graph(&format!("G{n}_{mask}"), n, &e)
}

/// Undirected edges `(a, b)` with `a < b` of a graph over `E`.
pub fn edges(g: &Structure) -> Vec<(usize, usize)> {
    g.relation(0).tuples().iter().filter(|t| t[0] < t[1]).map(|t| (t[0], t[1])).collect()
}

/// The Cayley graph of `Z_n` with connection set `±jumps`.
pub fn circulant(n: usize, jumps: &[usize]) -> Structure {
    let mut e = Vec::new();
    for i in 0..n {
        for &d in jumps {
            let j = (i + d) % n;
            if i != j && !e.contains(&(i.min(j), i.max(j))) {
                e.push((i.min(j), i.max(j)));
            }
        }
    }
    let tag: Vec<String> = jumps.iter().map(usize::to_string).collect();
    graph(&format!("Circ{n}_{}", tag.join("_")), n, &e)
}

/// `m` disjoint copies of `K_k`.
pub fn disjoint_cliques(m: usize, k: usize) -> Structure {
    let mut e = Vec::new();
    for c in 0..m {
        for p in subsets(k, 2) {
            e.push((c * k + p[0], c * k + p[1]));
        }
    }
    graph(&format!("{m}K{k}"), m * k, &e)
}

/// The complete `m`-partite graph with parts of size `k`.
pub fn complete_multipartite(m: usize, k: usize) -> Structure {
    let e: Vec<(usize, usize)> =
        subsets(m * k, 2).iter().filter(|p| p[0] / k != p[1] / k).map(|p| (p[0], p[1])).collect();
    let parts = vec![k.to_string(); m];
    graph(&format!("K{}", parts.join("_")), m * k, &e)
}

/// The `d`-dimensional hypercube.
pub fn hypercube(d: usize) -> Structure {
    let n = 1usize << d;
    let e: Vec<(usize, usize)> =
        subsets(n, 2).iter().filter(|p| (p[0] ^ p[1]).count_ones() == 1).map(|p| (p[0], p[1])).collect();
    graph(&format!("Q{d}"), n, &e)
}

/// `i -> i + 1 (mod n)` over the symbol `A`.
pub fn directed_cycle(n: usize) -> Structure {
    let t = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    make(&format!("DC{n}"), Signature::relational(&[("A", 2)]), n, vec![t])
}

/// Arcs `i -> i + d (mod n)` for each jump `d`, over the symbol `A`.
pub fn directed_circulant(n: usize, jumps: &[usize]) -> Structure {
    let mut t: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for &d in jumps {
            let arc = vec![i, (i + d) % n];
            if arc[0] != arc[1] && !t.contains(&arc) {
                t.push(arc);
            }
        }
    }
    let tag: Vec<String> = jumps.iter().map(usize::to_string).collect();
    make(&format!("DCirc{n}_{}", tag.join("_")), Signature::relational(&[("A", 2)]), n, vec![t])
}
