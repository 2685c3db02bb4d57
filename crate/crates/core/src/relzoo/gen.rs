use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tree::{BinaryTree, Shape};
use crate::error::{Error, Result};
use crate::structures::{for_each_tuple, subsets, Signature, Structure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Linear orders over `<`.
    Lo,
    /// Cyclic orders over `CO`.
    Co,
    /// Ordered graphs over `<`, `E`.
    Og,
    /// Ordered `n`-uniform hypergraphs over `<`, `R`.
    Oh(usize),
    /// Convexly ordered binary branching C-relations over `C`, `<`.
    Oc,
    /// Convexly cyclically ordered binary branching D-relations over `D`, `CO`.
    Cod,
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        let l = s.to_ascii_lowercase().replace('_', "");
        Ok(match l.as_str() {
            "lo" => Kind::Lo,
            "co" => Kind::Co,
            "og" => Kind::Og,
            "oc" => Kind::Oc,
            "cod" => Kind::Cod,
            _ => match l.strip_prefix("oh").and_then(|n| n.parse::<usize>().ok()) {
                Some(n) if n >= 1 => Kind::Oh(n),
                _ => return Err(Error::input(format!("unknown structure kind `{s}`"))),
            },
        })
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Lo => write!(f, "lo"),
            Kind::Co => write!(f, "co"),
            Kind::Og => write!(f, "og"),
            Kind::Oh(n) => write!(f, "oh{n}"),
            Kind::Oc => write!(f, "oc"),
            Kind::Cod => write!(f, "cod"),
        }
    }
}

impl Kind {
    pub fn signature(&self) -> Signature {
        match self {
            Kind::Lo => Signature::relational(&[("<", 2)]),
            Kind::Co => Signature::relational(&[("CO", 3)]),
            Kind::Og => Signature::relational(&[("<", 2), ("E", 2)]),
            Kind::Oh(n) => Signature::relational(&[("<", 2), ("R", *n)]),
            Kind::Oc => Signature::relational(&[("C", 3), ("<", 2)]),
            Kind::Cod => Signature::relational(&[("D", 4), ("CO", 3)]),
        }
    }

    pub fn min_size(&self) -> usize {
        match self {
            Kind::Cod => 3,
            _ => 1,
        }
    }

    /// Whether the generator consumes randomness.
    pub fn is_random(&self) -> bool {
        !matches!(self, Kind::Lo | Kind::Co)
    }
}

fn cyclic(i: usize, j: usize, k: usize) -> bool {
    (i < j && j < k) || (j < k && k < i) || (k < i && i < j)
}

fn order_tuples(n: usize) -> Vec<Vec<usize>> {
    subsets(n, 2)
}

fn cyclic_tuples(n: usize) -> Vec<Vec<usize>> {
    let mut t = Vec::new();
    for_each_tuple(n, 3, |x| {
        if cyclic(x[0], x[1], x[2]) {
            t.push(x.to_vec());
        }
    });
    t
}

fn build(kind: Kind, name: String, n: usize, rels: Vec<Vec<Vec<usize>>>) -> Structure {
    let mut m = Structure::one_sorted(name, kind.signature(), n).expect("sizes");
    for (r, t) in rels.into_iter().enumerate() {
        m.set_relation(r, t).expect("generated tuples are in range");
    }
    m
}

pub fn d_tuples(tree: &BinaryTree) -> Vec<Vec<usize>> {
    let mut t = Vec::new();
    for_each_tuple(tree.leaves(), 4, |x| {
        if tree.d(x[0], x[1], x[2], x[3]) {
            t.push(x.to_vec());
        }
    });
    t
}

pub fn c_tuples(tree: &BinaryTree) -> Vec<Vec<usize>> {
    let mut t = Vec::new();
    for_each_tuple(tree.leaves(), 3, |x| {
        if tree.c(x[0], x[1], x[2]) {
            t.push(x.to_vec());
        }
    });
    t
}

/// The D-relation of a tree with the cyclic order of its leaves.
pub fn cod_from_tree(tree: &BinaryTree) -> Structure {
    let n = tree.leaves();
    build(Kind::Cod, format!("cod{n}"), n, vec![d_tuples(tree), cyclic_tuples(n)])
}

/// The C-relation of a rooted tree with the left-to-right order of its leaves.
pub fn oc_from_tree(tree: &BinaryTree) -> Structure {
    let n = tree.leaves();
    build(Kind::Oc, format!("oc{n}"), n, vec![c_tuples(tree), order_tuples(n)])
}

/// The bare D-relation of a tree, over the single symbol `D`.
pub fn d_from_tree(tree: &BinaryTree) -> Structure {
    let n = tree.leaves();
    let mut m = Structure::one_sorted(format!("d{n}"), Signature::relational(&[("D", 4)]), n).unwrap();
    m.set_relation(0, d_tuples(tree)).unwrap();
    m
}

/// Generates a structure of the given kind. Deterministic kinds ignore `seed`.
pub fn gen(kind: Kind, size: usize, seed: u64) -> Result<Structure> {
    if size < kind.min_size() {
        return Err(Error::input(format!(
            "size {size} too small for kind {kind} (minimum {})",
            kind.min_size()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = size;
    let name = if kind.is_random() { format!("{kind}{n}_s{seed}") } else { format!("{kind}{n}") };
    let mut m = match kind {
        Kind::Lo => build(kind, name.clone(), n, vec![order_tuples(n)]),
        Kind::Co => build(kind, name.clone(), n, vec![cyclic_tuples(n)]),
        Kind::Og => {
            let mut e = Vec::new();
            for p in subsets(n, 2) {
                if rng.gen_bool(0.5) {
                    e.push(vec![p[0], p[1]]);
                    e.push(vec![p[1], p[0]]);
                }
            }
            build(kind, name.clone(), n, vec![order_tuples(n), e])
        }
        Kind::Oh(k) => {
            let mut r = Vec::new();
            for s in subsets(n, k) {
                if rng.gen_bool(0.5) {
                    permutations(&s, &mut r);
                }
            }
            build(kind, name.clone(), n, vec![order_tuples(n), r])
        }
        Kind::Oc => oc_from_tree(&BinaryTree::from_shape(&Shape::random(n, &mut rng))),
        Kind::Cod => cod_from_tree(&BinaryTree::from_shape(&Shape::random(n, &mut rng))),
    };
    m.set_name(name);
    Ok(m)
}

fn permutations(s: &[usize], out: &mut Vec<Vec<usize>>) {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    rec(&mut s.to_vec(), &mut Vec::new(), out);
}
