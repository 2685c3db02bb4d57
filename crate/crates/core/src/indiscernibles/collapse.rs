use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sequence::{locality, IndexClasses, Pattern, PatternEval, Violation};
use crate::error::{Error, Result};
use crate::structures::{Elem, Signature, Structure};

pub const DEFAULT_SCAN_BUDGET: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum ScanMode {
    Exhaust,
    Sample { count: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub k: usize,
    pub mode: ScanMode,
    pub pattern: Pattern,
    /// Only maps whose terms are pairwise distinct.
    pub injective: bool,
    pub budget: u64,
    pub witness_limit: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            k: 1,
            mode: ScanMode::Exhaust,
            pattern: Pattern::QfType,
            injective: false,
            budget: DEFAULT_SCAN_BUDGET,
            witness_limit: 8,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ImageCount {
    /// Number of distinct terms.
    pub size: usize,
    pub maps: u64,
    pub indiscernible: u64,
    pub uncollapsed: u64,
}

/// An `I`-indiscernible map that is not `J`-indiscernible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UncollapsedWitness {
    pub map: Vec<Vec<usize>>,
    pub violation: Violation,
}

#[derive(Clone, Debug, Serialize)]
pub struct CollapseReport {
    pub index: String,
    pub reduct: String,
    pub target: String,
    pub index_size: usize,
    pub target_size: usize,
    pub k: usize,
    pub mode: ScanMode,
    pub pattern: Pattern,
    pub injective: bool,
    pub maps: u64,
    pub indiscernible: u64,
    pub uncollapsed: u64,
    pub by_image_size: Vec<ImageCount>,
    pub witnesses: Vec<UncollapsedWitness>,
    /// No uncollapsed witness among the maps examined.
    pub collapses: bool,
    pub scale: String,
}

#[derive(Default)]
struct Tally {
    counts: BTreeMap<usize, ImageCount>,
    witnesses: Vec<UncollapsedWitness>,
}

impl Tally {
    fn absorb(&mut self, other: Tally, limit: usize) {
        for (s, c) in other.counts {
            let e = self.counts.entry(s).or_insert_with(|| ImageCount { size: s, ..Default::default() });
            e.maps += c.maps;
            e.indiscernible += c.indiscernible;
            e.uncollapsed += c.uncollapsed;
        }
        let room = limit.saturating_sub(self.witnesses.len());
        self.witnesses.extend(other.witnesses.into_iter().take(room));
    }
}

struct Scanner<'a> {
    i_classes: IndexClasses,
    j_classes: IndexClasses,
    eval: PatternEval<'a>,
    tuples: Vec<Vec<Elem>>,
    injective: bool,
    limit: usize,
}

impl Scanner<'_> {
    fn visit(&self, codes: &[usize], tally: &mut Tally) {
        let mut distinct = codes.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if self.injective && distinct.len() < codes.len() {
            return;
        }
        let map: Vec<Vec<Elem>> = codes.iter().map(|&c| self.tuples[c].clone()).collect();
        let entry = tally
            .counts
            .entry(distinct.len())
            .or_insert_with(|| ImageCount { size: distinct.len(), ..Default::default() });
        entry.maps += 1;
        if self.i_classes.first_violation(&self.eval, &map).is_some() {
            return;
        }
        entry.indiscernible += 1;
        if let Some(violation) = self.j_classes.first_violation(&self.eval, &map) {
            entry.uncollapsed += 1;
            if tally.witnesses.len() < self.limit {
                let map = map.iter().map(|t| t.iter().map(|e| e.id).collect()).collect();
                tally.witnesses.push(UncollapsedWitness { map, violation });
            }
        }
    }
}

/// Looks for maps from `i` into `m^k` that are `i`-indiscernible but not
/// `j`-indiscernible. `j` must be a structure on the same domain as `i`.
/// Terms are tuples from the main sort of `m`.
pub fn collapse_scan(i: &Structure, j: &Structure, m: &Structure, opts: &ScanOptions) -> Result<CollapseReport> {
    if i.len() != j.len() {
        return Err(Error::input(format!("`{}` has {} points but the reduct has {}", i.name(), i.len(), j.len())));
    }
    if opts.k == 0 {
        return Err(Error::input("tuple length must be at least 1"));
    }
    let n = i.len();
    let tuples = main_tuples(m.len(), opts.k)?;
    let t = tuples.len();
    let arity = locality(m, opts.pattern).map_or(n, |r| r.min(n));
    let scanner = Scanner {
        i_classes: IndexClasses::new(i, arity)?,
        j_classes: IndexClasses::new(j, arity)?,
        eval: PatternEval::new(m, opts.pattern)?,
        tuples,
        injective: opts.injective,
        limit: opts.witness_limit,
    };
    let mut tally = Tally::default();
    match opts.mode {
        ScanMode::Exhaust => {
            let total = (t as u64).checked_pow(n as u32).filter(|&x| x <= opts.budget).ok_or(Error::Budget {
                what: "maps in an exhaustive collapse scan",
                limit: opts.budget,
            })?;
            const CHUNK: u64 = 2048;
            let chunks: Vec<Tally> = (0..total.div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| {
                    let mut local = Tally::default();
                    let mut codes = vec![0usize; n];
                    for code in c * CHUNK..((c + 1) * CHUNK).min(total) {
                        decode(code, t, &mut codes);
                        scanner.visit(&codes, &mut local);
                    }
                    local
                })
                .collect();
            for c in chunks {
                tally.absorb(c, opts.witness_limit);
            }
        }
        ScanMode::Sample { count, seed } => {
            if count > opts.budget {
                return Err(Error::Budget { what: "sampled maps", limit: opts.budget });
            }
            if opts.injective && t < n {
                return Err(Error::Precondition(format!("no injective map from {n} indices into {t} tuples")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<Vec<usize>> = (0..count)
                .map(|_| {
                    if opts.injective {
                        rand::seq::index::sample(&mut rng, t, n).into_vec()
                    } else {
                        (0..n).map(|_| rng.gen_range(0..t)).collect()
                    }
                })
                .collect();
            let chunks: Vec<Tally> = samples
                .par_chunks(512)
                .map(|chunk| {
                    let mut local = Tally::default();
                    for codes in chunk {
                        scanner.visit(codes, &mut local);
                    }
                    local
                })
                .collect();
            for c in chunks {
                tally.absorb(c, opts.witness_limit);
            }
        }
    }
    let by_image_size: Vec<ImageCount> = tally.counts.into_values().collect();
    let maps = by_image_size.iter().map(|c| c.maps).sum();
    let indiscernible = by_image_size.iter().map(|c| c.indiscernible).sum();
    let uncollapsed: u64 = by_image_size.iter().map(|c| c.uncollapsed).sum();
    let how = match opts.mode {
        ScanMode::Exhaust => "all".to_string(),
        ScanMode::Sample { count, seed } => format!("{count} sampled (seed {seed})"),
    };
    let scale = format!(
        "{} uncollapsed witness{} among {how} maps with |I| = {n}, |M| = {}, k = {}{}",
        if uncollapsed == 0 { "no".to_string() } else { uncollapsed.to_string() },
        if uncollapsed == 1 { "" } else { "es" },
        m.len(),
        opts.k,
        if opts.injective { ", injective" } else { "" },
    );
    Ok(CollapseReport {
        index: i.name().to_string(),
        reduct: j.name().to_string(),
        target: m.name().to_string(),
        index_size: n,
        target_size: m.len(),
        k: opts.k,
        mode: opts.mode,
        pattern: opts.pattern,
        injective: opts.injective,
        maps,
        indiscernible,
        uncollapsed,
        by_image_size,
        witnesses: tally.witnesses,
        collapses: uncollapsed == 0,
        scale,
    })
}

fn main_tuples(size: usize, k: usize) -> Result<Vec<Vec<Elem>>> {
    let count = size.checked_pow(k as u32).ok_or_else(|| Error::input("too many target tuples"))?;
    let mut out = Vec::with_capacity(count);
    crate::structures::for_each_tuple(size, k, |t| out.push(t.iter().map(|&x| Elem::main(x)).collect()));
    Ok(out)
}

/// Base-`t` digits of `code`, most significant first.
fn decode(mut code: u64, t: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = (code % t as u64) as usize;
        code /= t as u64;
    }
}

/// The relations of `i` split by equality pattern: for each relation `R` and
/// each partition of its argument places there is a relation on tuples of
/// distinct elements, one per block. The all-distinct part keeps the name
/// `R`; the others are `R_` followed by the block of each place. Tuples have
/// the same quantifier-free types before and after.
pub fn irreflexive_version(i: &Structure) -> Result<Structure> {
    if !i.signature().is_one_sorted() || !i.signature().is_relational() {
        return Err(Error::Unsupported("irreflexive versions of many-sorted or functional structures".into()));
    }
    let mut sig = Signature::one_sorted();
    let mut parts = Vec::new();
    for (r, sym) in i.signature().relations().iter().enumerate() {
        for blocks in set_partitions(sym.arity()) {
            let width = blocks.iter().max().map_or(0, |&b| b + 1);
            let identity = blocks.iter().enumerate().all(|(p, &b)| p == b);
            let name = if identity {
                sym.name.clone()
            } else {
                let tag: String = blocks.iter().map(|b| b.to_string()).collect();
                format!("{}_{tag}", crate::products::sanitize(&sym.name))
            };
            let id = sig.add_relation(&name, vec![0; width])?;
            let tuples: Vec<Vec<usize>> = i
                .relation(r)
                .tuples()
                .iter()
                .filter(|t| equality_pattern(t) == blocks)
                .map(|t| {
                    let mut out = vec![0; width];
                    for (p, &b) in blocks.iter().enumerate() {
                        out[b] = t[p];
                    }
                    out
                })
                .collect();
            parts.push((id, tuples));
        }
    }
    let mut out = Structure::one_sorted(format!("{}_irr", i.name()), sig, i.len())?;
    for (id, tuples) in parts {
        out.set_relation(id, tuples)?;
    }
    Ok(out)
}

/// The reduct to symbols of arity at most `n`.
pub fn arity_reduct(i: &Structure, n: usize) -> Result<Structure> {
    let keep: Vec<&str> =
        i.signature().relations().iter().filter(|r| r.arity() <= n).map(|r| r.name.as_str()).collect();
    let mut out = i.reduct(&keep)?;
    out.set_name(format!("{}_le{n}", i.name()));
    Ok(out)
}

/// Restricted growth strings of length `n`.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, cur: &mut Vec<usize>, top: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=top {
            cur.push(b);
            go(n, cur, top.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::with_capacity(n), 0, &mut out);
    out
}

fn equality_pattern(t: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    t.iter()
        .map(|x| match seen.iter().position(|y| y == x) {
            Some(p) => p,
            None => {
                seen.push(*x);
                seen.len() - 1
            }
        })
        .collect()
}
