use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fragment::ClassFragment;
use crate::error::{Error, Result};
use crate::structures::{embeds, enumerate_embeddings, Structure};

pub const DEFAULT_ARROW_BUDGET: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrowMode {
    Exhaustive,
    Search,
}

impl std::str::FromStr for ArrowMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(ArrowMode::Exhaustive),
            "search" => Ok(ArrowMode::Search),
            _ => Err(Error::input(format!("unknown arrow mode `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

/// A colouring of the embeddings `A -> C`, listed in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Colouring {
    pub embeddings: Vec<Vec<Vec<usize>>>,
    pub colours: Vec<u8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArrowReport {
    pub verdict: Verdict,
    pub mode: ArrowMode,
    pub colours: usize,
    /// Number of embeddings `A -> C`.
    pub positions: usize,
    /// Number of distinct copies of `B` in `C`, each a set of positions.
    pub copies: usize,
    pub budget: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Colouring>,
}

struct Instance {
    embeddings: Vec<Vec<Vec<usize>>>,
    copies: Vec<Vec<u32>>,
    by_position: Vec<Vec<u32>>,
}

fn instance(c: &Structure, b: &Structure, a: &Structure) -> Result<Instance> {
    if !embeds(a, b)? || !embeds(b, c)? {
        return Err(Error::Precondition("arrow needs A to embed in B and B in C".into()));
    }
    let ac = enumerate_embeddings(a, c)?;
    let index: HashMap<&Vec<Vec<usize>>, u32> = ac.iter().enumerate().map(|(i, e)| (&e.0, i as u32)).collect();
    let ab = enumerate_embeddings(a, b)?;
    let mut copies: Vec<Vec<u32>> = enumerate_embeddings(b, c)?
        .iter()
        .map(|g| {
            let mut s: Vec<u32> = ab.iter().map(|e| index[&g.compose(e).0]).collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    copies.sort();
    copies.dedup();
    let mut by_position = vec![Vec::new(); ac.len()];
    for (g, s) in copies.iter().enumerate() {
        for &p in s {
            by_position[p as usize].push(g as u32);
        }
    }
    Ok(Instance { embeddings: ac.into_iter().map(|e| e.0).collect(), copies, by_position })
}

/// Decides `C -> (B)^A_k`. Exhaustive mode visits every colouring and fails
/// with a budget error when `k^positions` exceeds `budget`; search mode
/// backtracks and reports `unknown` after `budget` nodes.
pub fn arrow(c: &Structure, b: &Structure, a: &Structure, k: usize, mode: ArrowMode, budget: u64) -> Result<ArrowReport> {
    if !(1..=255).contains(&k) {
        return Err(Error::input(format!("colour count {k} out of range 1..=255")));
    }
    let inst = instance(c, b, a)?;
    let m = inst.embeddings.len();
    let (verdict, colours) = match mode {
        ArrowMode::Exhaustive => {
            let space = (k as u64).checked_pow(m as u32).filter(|&s| s <= budget);
            if space.is_none() {
                return Err(Error::Budget { what: "arrow colourings", limit: budget });
            }
            match exhaustive(&inst, k) {
                Some(col) => (Verdict::Fails, Some(col)),
                None => (Verdict::Holds, None),
            }
        }
        ArrowMode::Search => search(&inst, k, budget),
    };
    Ok(ArrowReport {
        verdict,
        mode,
        colours: k,
        positions: m,
        copies: inst.copies.len(),
        budget,
        witness: colours.map(|colours| Colouring { embeddings: inst.embeddings.clone(), colours }),
    })
}

/// Walks all colourings with position 0 fixed to colour 0, split into chunks
/// by the top positions. Each chunk runs a reflected Gray code over the rest,
/// keeping per-copy colour counts and the number of monochromatic copies.
fn exhaustive(inst: &Instance, k: usize) -> Option<Vec<u8>> {
    let m = inst.embeddings.len();
    let free = m.saturating_sub(1);
    let target = 4 * rayon::current_num_threads().max(1);
    let mut top = 0;
    let mut chunks = 1usize;
    while top < free && chunks < target && k > 1 {
        top += 1;
        chunks *= k;
    }
    let low = free - top;
    (0..chunks).into_par_iter().find_map_first(|chunk| {
        let mut col = vec![0u8; m];
        let mut rest = chunk;
        for p in (m - top)..m {
            col[p] = (rest % k) as u8;
            rest /= k;
        }
        let mut counts: Vec<Vec<u32>> = vec![vec![0; k]; inst.copies.len()];
        let mut mono = 0usize;
        for (g, s) in inst.copies.iter().enumerate() {
            for &p in s {
                counts[g][col[p as usize] as usize] += 1;
            }
            if counts[g].iter().any(|&n| n as usize == s.len()) {
                mono += 1;
            }
        }
        if mono == 0 {
            return Some(col);
        }
        let mut dir = vec![1i8; low];
        loop {
            let mut j = 0;
            while j < low {
                let next = col[1 + j] as i32 + dir[j] as i32;
                if (0..k as i32).contains(&next) {
                    break;
                }
                dir[j] = -dir[j];
                j += 1;
            }
            if j == low {
                return None;
            }
            let p = 1 + j;
            let old = col[p] as usize;
            let new = (old as i32 + dir[j] as i32) as usize;
            col[p] = new as u8;
            for &g in &inst.by_position[p] {
                let g = g as usize;
                let size = inst.copies[g].len() as u32;
                if counts[g][old] == size {
                    mono -= 1;
                }
                counts[g][old] -= 1;
                counts[g][new] += 1;
                if counts[g][new] == size {
                    mono += 1;
                }
            }
            if mono == 0 {
                return Some(col);
            }
        }
    })
}

fn search(inst: &Instance, k: usize, budget: u64) -> (Verdict, Option<Vec<u8>>) {
    let m = inst.embeddings.len();
    let mut ending: Vec<Vec<u32>> = vec![Vec::new(); m];
    for (g, s) in inst.copies.iter().enumerate() {
        ending[*s.last().expect("copies are nonempty") as usize].push(g as u32);
    }
    struct St<'a> {
        inst: &'a Instance,
        ending: Vec<Vec<u32>>,
        col: Vec<u8>,
        k: usize,
        nodes: u64,
        budget: u64,
    }
    enum Flow {
        Found,
        Exhausted,
        OutOfBudget,
    }
    fn rec(st: &mut St, p: usize, used: usize) -> Flow {
        if p == st.col.len() {
            return Flow::Found;
        }
        // colours beyond the first unused one are symmetric
        let top = (used + 1).min(st.k);
        for c in 0..top {
            st.nodes += 1;
            if st.nodes > st.budget {
                return Flow::OutOfBudget;
            }
            st.col[p] = c as u8;
            let mono = st.ending[p].iter().any(|&g| {
                st.inst.copies[g as usize].iter().all(|&q| st.col[q as usize] == c as u8)
            });
            if mono {
                continue;
            }
            match rec(st, p + 1, used.max(c + 1)) {
                Flow::Exhausted => {}
                other => return other,
            }
        }
        Flow::Exhausted
    }
    let mut st = St { inst, ending, col: vec![0; m], k, nodes: 0, budget };
    match rec(&mut st, 0, 0) {
        Flow::Found => (Verdict::Fails, Some(st.col)),
        Flow::Exhausted => (Verdict::Holds, None),
        Flow::OutOfBudget => (Verdict::Unknown, None),
    }
}

/// Whether the colouring leaves every copy of `B` in `C` non-monochromatic,
/// recomputed from scratch.
pub fn refutes_arrow(c: &Structure, b: &Structure, a: &Structure, w: &Colouring) -> Result<bool> {
    let ac = enumerate_embeddings(a, c)?;
    if ac.len() != w.colours.len() || ac.iter().zip(&w.embeddings).any(|(e, f)| &e.0 != f) {
        return Ok(false);
    }
    let colour: HashMap<Vec<Vec<usize>>, u8> = w.embeddings.iter().cloned().zip(w.colours.iter().copied()).collect();
    let ab = enumerate_embeddings(a, b)?;
    for g in enumerate_embeddings(b, c)? {
        let first = colour[&g.compose(&ab[0]).0];
        if ab.iter().all(|e| colour[&g.compose(e).0] == first) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanEntry {
    pub member: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct RamseyScan {
    pub fragment: String,
    pub bound: usize,
    /// The first member `C` with `C -> (B)^A_k`.
    pub found: Option<String>,
    pub scanned: Vec<ScanEntry>,
    /// True when every member was decided and none works.
    pub exhausted: bool,
}

/// Scans the fragment in size order for a `C` with `C -> (B)^A_k`.
pub fn ramsey_scan(
    frag: &ClassFragment,
    a: &Structure,
    b: &Structure,
    k: usize,
    mode: ArrowMode,
    budget: u64,
) -> Result<RamseyScan> {
    if k < 2 {
        return Err(Error::input("ramsey scan needs at least 2 colours"));
    }
    if !embeds(a, b)? {
        return Err(Error::Precondition("A does not embed in B".into()));
    }
    let mut scan = RamseyScan { fragment: frag.name.clone(), bound: frag.bound, found: None, scanned: Vec::new(), exhausted: false };
    let mut undecided = false;
    for c in frag.members() {
        if !embeds(b, c)? {
            continue;
        }
        let r = arrow(c, b, a, k, mode, budget)?;
        scan.scanned.push(ScanEntry { member: c.name().to_string(), verdict: r.verdict });
        match r.verdict {
            Verdict::Holds => {
                scan.found = Some(c.name().to_string());
                return Ok(scan);
            }
            Verdict::Unknown => undecided = true,
            Verdict::Fails => {}
        }
    }
    scan.exhausted = !undecided;
    Ok(scan)
}
