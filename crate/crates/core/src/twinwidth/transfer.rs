use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solver::{twin_width, SolverOptions};
use super::trigraph::check_graph;
use crate::error::{Error, Result};
use crate::structures::build::graph;
use crate::structures::{automorphism_group, Structure};

/// `G[H_g]`: fibres in the order of `G`, edges across fibres from `G` and
/// inside a fibre from its rib.
pub fn lex_sum_graph(g: &Structure, ribs: &[Structure]) -> Result<Structure> {
    check_graph(g)?;
    if ribs.len() != g.len() {
        return Err(Error::input(format!("{} ribs given for {} vertices", ribs.len(), g.len())));
    }
    let mut offset = Vec::with_capacity(ribs.len());
    let mut total = 0;
    for h in ribs {
        check_graph(h)?;
        if h.is_empty() {
            return Err(Error::input("ribs must be nonempty"));
        }
        offset.push(total);
        total += h.len();
    }
    let mut e = Vec::new();
    for (a, h) in ribs.iter().enumerate() {
        for t in h.relation(0).tuples().iter().filter(|t| t[0] < t[1]) {
            e.push((offset[a] + t[0], offset[a] + t[1]));
        }
        for b in a + 1..ribs.len() {
            if g.holds(0, &[a, b]) {
                for x in 0..h.len() {
                    for y in 0..ribs[b].len() {
                        e.push((offset[a] + x, offset[b] + y));
                    }
                }
            }
        }
    }
    let names: Vec<&str> = ribs.iter().map(Structure::name).collect();
    Ok(graph(&format!("{}[{}]", g.name(), names.join(",")), total, &e))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferRow {
    pub spine: String,
    pub ribs: Vec<String>,
    pub spine_width: usize,
    pub rib_width: usize,
    pub sum_width: usize,
}

impl TransferRow {
    pub fn lower_bound(&self) -> usize {
        self.spine_width.max(self.rib_width)
    }

    pub fn excess(&self) -> i64 {
        self.sum_width as i64 - self.lower_bound() as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferReport {
    pub rows: Vec<TransferRow>,
    /// Rows per excess value.
    pub excess: BTreeMap<i64, usize>,
    /// Rows whose sum is narrower than a factor.
    pub bound_failures: usize,
    pub scale: String,
}

/// Every graph of `left` with every rib assignment from `right`, one per
/// orbit of the spine's automorphism group.
pub fn transfer_experiment(left: &[Structure], right: &[Structure], opts: &SolverOptions) -> Result<TransferReport> {
    let exact = |g: &Structure| -> Result<usize> {
        let w = twin_width(g, opts)?;
        if !w.is_exact() {
            return Err(Error::Budget { what: "exact twin-width in the transfer experiment", limit: opts.budget });
        }
        Ok(w.width)
    };
    let rib_widths: Vec<usize> = right.iter().map(exact).collect::<Result<_>>()?;
    let mut jobs = Vec::new();
    for g in left {
        let gw = exact(g)?;
        for choice in assignments(g, right.len())? {
            jobs.push((g, gw, choice));
        }
    }
    let rows: Vec<TransferRow> = jobs
        .par_iter()
        .map(|(g, gw, choice)| {
            let ribs: Vec<Structure> = choice.iter().map(|&r| right[r].clone()).collect();
            let sum = lex_sum_graph(g, &ribs)?;
            Ok(TransferRow {
                spine: g.name().to_string(),
                ribs: ribs.iter().map(|h| h.name().to_string()).collect(),
                spine_width: *gw,
                rib_width: choice.iter().map(|&r| rib_widths[r]).max().unwrap_or(0),
                sum_width: exact(&sum)?,
            })
        })
        .collect::<Result<_>>()?;
    let mut excess = BTreeMap::new();
    for r in &rows {
        *excess.entry(r.excess()).or_insert(0) += 1;
    }
    let bound_failures = rows.iter().filter(|r| r.excess() < 0).count();
    let scale = format!(
        "{} sums over {} spines and {} ribs, exact widths up to {} vertices",
        rows.len(),
        left.len(),
        right.len(),
        opts.max_vertices
    );
    Ok(TransferReport { rows, excess, bound_failures, scale })
}

/// Assignments `V(g) -> 0..k`, least in their orbit under `Aut(g)`.
fn assignments(g: &Structure, k: usize) -> Result<Vec<Vec<usize>>> {
    let group: Vec<Vec<usize>> =
        automorphism_group(g)?.elements(1 << 16)?.into_iter().map(|e| e.main().to_vec()).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    crate::structures::for_each_tuple(k, g.len(), |c| {
        let least = group
            .iter()
            .map(|p| {
                let mut moved = vec![0; c.len()];
                for (x, &y) in p.iter().enumerate() {
                    moved[y] = c[x];
                }
                moved
            })
            .min()
            .unwrap_or_else(|| c.to_vec());
        if seen.insert(least.clone()) {
            out.push(least);
        }
    });
    out.sort();
    Ok(out)
}
