//! Rooted binary trees whose leaves are numbered left to right.

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryTree {
    children: Vec<Option<(usize, usize)>>,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    leaf_node: Vec<usize>,
    root: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Leaf,
    Node(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Node(a, b) => a.leaves() + b.leaves(),
        }
    }

    /// All shapes with `n` leaves (there are Catalan(n-1) of them).
    pub fn all(n: usize) -> Vec<Shape> {
        if n == 1 {
            return vec![Shape::Leaf];
        }
        let mut out = Vec::new();
        for k in 1..n {
            for l in Shape::all(k) {
                for r in Shape::all(n - k) {
                    out.push(Shape::Node(Box::new(l.clone()), Box::new(r)));
                }
            }
        }
        out
    }

    /// A random shape built by splitting the leaf count uniformly at each node.
    pub fn random(n: usize, rng: &mut impl Rng) -> Shape {
        if n <= 1 {
            return Shape::Leaf;
        }
        let k = rng.gen_range(1..n);
        Shape::Node(Box::new(Shape::random(k, rng)), Box::new(Shape::random(n - k, rng)))
    }

    /// Parses nested pairs such as `((*,*),(*,*))`, any non-bracket token being a leaf.
    pub fn parse(text: &str) -> Result<Shape> {
        let toks: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        fn go(t: &[char], pos: &mut usize) -> Result<Shape> {
            match t.get(*pos) {
                Some('(') => {
                    *pos += 1;
                    let a = go(t, pos)?;
                    if t.get(*pos) != Some(&',') {
                        return Err(Error::input(format!("expected `,` at {}", *pos)));
                    }
                    *pos += 1;
                    let b = go(t, pos)?;
                    if t.get(*pos) != Some(&')') {
                        return Err(Error::input(format!("expected `)` at {}", *pos)));
                    }
                    *pos += 1;
                    Ok(Shape::Node(Box::new(a), Box::new(b)))
                }
                Some(c) if *c != ',' && *c != ')' => {
                    while t.get(*pos).is_some_and(|c| !matches!(c, '(' | ',' | ')')) {
                        *pos += 1;
                    }
                    Ok(Shape::Leaf)
                }
                _ => Err(Error::input(format!("bad tree text at {}", *pos))),
            }
        }
        let s = go(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(Error::input("trailing text after tree"));
        }
        Ok(s)
    }
}

impl BinaryTree {
    pub fn from_shape(shape: &Shape) -> BinaryTree {
        let mut t = BinaryTree {
            children: Vec::new(),
            parent: Vec::new(),
            depth: Vec::new(),
            leaf_node: Vec::new(),
            root: 0,
        };
        fn build(t: &mut BinaryTree, s: &Shape, parent: Option<usize>, depth: usize) -> usize {
            let id = t.children.len();
            t.children.push(None);
            t.parent.push(parent);
            t.depth.push(depth);
            match s {
                Shape::Leaf => t.leaf_node.push(id),
                Shape::Node(a, b) => {
                    let l = build(t, a, Some(id), depth + 1);
                    let r = build(t, b, Some(id), depth + 1);
                    t.children[id] = Some((l, r));
                }
            }
            id
        }
        build(&mut t, shape, None, 0);
        t
    }

    pub fn leaves(&self) -> usize {
        self.leaf_node.len()
    }

    fn lca_nodes(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        a
    }

    /// Lowest common ancestor of two leaves, as a node id.
    pub fn lca(&self, a: usize, b: usize) -> usize {
        self.lca_nodes(self.leaf_node[a], self.leaf_node[b])
    }

    fn is_below(&self, mut node: usize, anc: usize) -> bool {
        loop {
            if node == anc {
                return true;
            }
            match self.parent[node] {
                Some(p) => node = p,
                None => return false,
            }
        }
    }

    /// Nodes on the path between two leaves.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let (na, nb) = (self.leaf_node[a], self.leaf_node[b]);
        let top = self.lca_nodes(na, nb);
        let mut out = Vec::new();
        for mut x in [na, nb] {
            while x != top {
                out.push(x);
                x = self.parent[x].unwrap();
            }
        }
        out.push(top);
        out
    }

    /// The paths `a-b` and `c-d` share no node.
    pub fn d(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        let p = self.path(a, b);
        self.path(c, d).iter().all(|x| !p.contains(x))
    }

    /// `a` lies outside the subtree at `lca(b, c)`.
    pub fn c(&self, a: usize, b: usize, c: usize) -> bool {
        !self.is_below(self.leaf_node[a], self.lca(b, c))
    }
}
