use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::relzoo::{cod_from_tree, oc_from_tree, BinaryTree, Kind, Shape};
use crate::structures::{build, canonical_form, subsets, CanonicalForm, Signature, Structure};

/// Finitely many structures of one signature up to a size bound, one per
/// isomorphism type, sorted by size and then canonical form.
#[derive(Clone, Debug)]
pub struct ClassFragment {
    pub name: String,
    pub signature: Signature,
    pub bound: usize,
    members: Vec<Structure>,
    keys: Vec<CanonicalForm>,
    index: HashMap<CanonicalForm, usize>,
    /// Known axiomatisation, used to explain failures.
    pub kind: Option<Kind>,
}

fn size_of(m: &Structure) -> usize {
    m.len()
}

impl ClassFragment {
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        bound: usize,
        structures: impl IntoIterator<Item = Structure>,
    ) -> Result<ClassFragment> {
        let mut seen: HashMap<CanonicalForm, Structure> = HashMap::new();
        for s in structures {
            if s.signature() != &signature {
                return Err(Error::Signature(format!("`{}` is not in the fragment's signature", s.name())));
            }
            if size_of(&s) > bound {
                continue;
            }
            let key = canonical_form(&s)?;
            seen.entry(key).or_insert(s);
        }
        let mut pairs: Vec<(CanonicalForm, Structure)> = seen.into_iter().collect();
        pairs.sort_by(|a, b| (size_of(&a.1), &a.0).cmp(&(size_of(&b.1), &b.0)));
        let keys: Vec<CanonicalForm> = pairs.iter().map(|p| p.0.clone()).collect();
        let members = pairs.into_iter().map(|p| p.1).collect();
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Ok(ClassFragment { name: name.into(), signature, bound, members, keys, index, kind: None })
    }

    pub fn with_kind(mut self, kind: Kind) -> Self {
        self.kind = Some(kind);
        self
    }

    pub fn members(&self) -> &[Structure] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn key(&self, i: usize) -> &CanonicalForm {
        &self.keys[i]
    }

    /// Index of the member isomorphic to `m`, if any.
    pub fn find(&self, m: &Structure) -> Result<Option<usize>> {
        if m.signature() != &self.signature {
            return Ok(None);
        }
        Ok(self.index.get(&canonical_form(m)?).copied())
    }

    pub fn contains(&self, m: &Structure) -> Result<bool> {
        Ok(self.find(m)?.is_some())
    }

    /// Reads a manifest `{"structures": [paths], "bound": n}` or a generator
    /// spec such as `{"generator": "linear_orders", "max_size": 6}`.
    pub fn load(path: impl AsRef<Path>) -> Result<ClassFragment> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
        let doc: FragmentDoc = serde_json::from_str(&text)?;
        match doc {
            FragmentDoc::Generator { generator, max_size } => generate(&generator, max_size),
            FragmentDoc::Manifest { structures, bound } => {
                let base = path.parent().unwrap_or(Path::new("."));
                let ms: Vec<Structure> =
                    structures.iter().map(|p| Structure::load(base.join(p))).collect::<Result<_>>()?;
                let sig = ms.first().map(|m| m.signature().clone()).unwrap_or_default();
                let bound = bound.unwrap_or_else(|| ms.iter().map(size_of).max().unwrap_or(0));
                let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                ClassFragment::new(name, sig, bound, ms)
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FragmentDoc {
    Generator { generator: String, max_size: usize },
    Manifest { structures: Vec<String>, bound: Option<usize> },
}

/// Named generators: `sets`, `linear_orders`, `cyclic_orders`, `graphs`,
/// `ordered_graphs`, `oc`, `cod`. Sizes run from 1 to `max_size`.
pub fn generate(generator: &str, max_size: usize) -> Result<ClassFragment> {
    let sizes = 1..=max_size;
    let (sig, kind, items): (Signature, Option<Kind>, Vec<Structure>) = match generator {
        "sets" => (Signature::one_sorted(), None, sizes.map(build::pure_set).collect()),
        "linear_orders" => (Kind::Lo.signature(), Some(Kind::Lo), sizes.map(build::linear_order).collect()),
        "cyclic_orders" => (
            Kind::Co.signature(),
            Some(Kind::Co),
            sizes.map(|n| crate::relzoo::gen(Kind::Co, n, 0)).collect::<Result<_>>()?,
        ),
        "graphs" => {
            if max_size > 7 {
                return Err(Error::Budget { what: "graph fragment size", limit: 7 });
            }
            let sig = Signature::relational(&[("E", 2)]);
            let v = by_extension(&sig, max_size, |n, mask| Ok(build::graph_from_mask(n, mask)))?;
            (sig, None, v)
        }
        "ordered_graphs" => {
            if max_size > 6 {
                return Err(Error::Budget { what: "ordered graph fragment size", limit: 6 });
            }
            let v = by_extension(&Kind::Og.signature(), max_size, |n, mask| {
                let g = build::graph_from_mask(n, mask);
                let mut m = Structure::one_sorted(format!("og{n}_{mask}"), Kind::Og.signature(), n)?;
                m.set_relation(0, subsets(n, 2))?;
                m.set_relation(1, g.relation(0).tuples().to_vec())?;
                Ok(m)
            })?;
            (Kind::Og.signature(), Some(Kind::Og), v)
        }
        "oc" | "cod" => {
            if max_size > 8 {
                return Err(Error::Budget { what: "tree fragment size", limit: 8 });
            }
            let kind = if generator == "oc" { Kind::Oc } else { Kind::Cod };
            let mut v = Vec::new();
            for n in sizes {
                for s in Shape::all(n) {
                    let t = BinaryTree::from_shape(&s);
                    v.push(if kind == Kind::Oc { oc_from_tree(&t) } else { cod_from_tree(&t) });
                }
            }
            (kind.signature(), Some(kind), v)
        }
        other => return Err(Error::input(format!("unknown generator `{other}`"))),
    };
    let f = ClassFragment::new(format!("{generator}<={max_size}"), sig, max_size, items)?;
    Ok(match kind {
        Some(k) => f.with_kind(k),
        None => f,
    })
}

/// Graph-like structures given by an edge mask over the pairs of `0..n` in
/// lex order. Size `n` comes from the size `n - 1` types by adding a last
/// vertex with every neighbourhood, which reaches every type since deleting
/// the last vertex of any structure leaves one of them.
fn by_extension(
    sig: &Signature,
    max_size: usize,
    make: impl Fn(usize, u64) -> Result<Structure>,
) -> Result<Vec<Structure>> {
    let mut all = Vec::new();
    let mut prev: Vec<u64> = vec![0];
    for n in 1..=max_size {
        let mut seen = HashMap::new();
        for &old in &prev {
            for nbrs in 0..1u64 << (n - 1) {
                let mask = widen(n - 1, old, nbrs);
                let m = make(n, mask)?;
                debug_assert_eq!(m.signature(), sig);
                seen.entry(canonical_form(&m)?).or_insert((mask, m));
            }
        }
        let mut reps: Vec<(u64, Structure)> = seen.into_values().collect();
        reps.sort_by_key(|r| r.0);
        prev = reps.iter().map(|r| r.0).collect();
        all.extend(reps.into_iter().map(|r| r.1));
    }
    Ok(all)
}

/// Re-indexes a mask over the pairs of `0..n` as one over the pairs of
/// `0..n+1` in lex order, joining the new vertex `n` to the set `nbrs`.
fn widen(n: usize, mask: u64, nbrs: u64) -> u64 {
    let mut out = 0;
    let (mut from, mut to) = (0, 0);
    for a in 0..n {
        for _ in a + 1..n {
            out |= (mask >> from & 1) << to;
            from += 1;
            to += 1;
        }
        out |= (nbrs >> a & 1) << to;
        to += 1;
    }
    out
}

fn nonempty_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..=n).flat_map(move |k| subsets(n, k))
}

/// Isomorphism types of nonempty substructures of `m` with at most `n` elements.
pub fn age(m: &Structure, n: usize) -> Result<ClassFragment> {
    if !m.signature().is_one_sorted() || !m.signature().is_relational() {
        return Err(Error::Unsupported("age of a many-sorted or functional structure".into()));
    }
    let mut items = Vec::new();
    for k in 1..=n.min(m.len()) {
        for s in subsets(m.len(), k) {
            items.push(m.induced_main(&s)?);
        }
    }
    ClassFragment::new(format!("age({},{n})", m.name()), m.signature().clone(), n, items)
}

/// All nonempty substructures of members of `frag`, up to isomorphism.
pub fn hereditary_closure(frag: &ClassFragment) -> Result<ClassFragment> {
    let mut out = closure_of(frag.members(), frag.signature.clone())?;
    out.name = format!("HC({})", frag.name);
    out.bound = frag.bound;
    out.kind = frag.kind;
    Ok(out)
}

/// The hereditary closure of a list of structures of one signature.
pub fn closure_of(ms: &[Structure], sig: Signature) -> Result<ClassFragment> {
    let mut items = Vec::new();
    let mut bound = 0;
    for m in ms {
        if !m.signature().is_one_sorted() || !m.signature().is_relational() {
            return Err(Error::Unsupported("hereditary closure of a many-sorted or functional structure".into()));
        }
        if m.len() > 16 {
            return Err(Error::Budget { what: "hereditary closure structure size", limit: 16 });
        }
        bound = bound.max(m.len());
        for s in nonempty_subsets(m.len()) {
            items.push(m.induced_main(&s)?);
        }
    }
    ClassFragment::new("HC", sig, bound, items)
}
