use serde::Serialize;

use crate::error::{Budget, Error, Result};
use crate::structures::{grid, Structure};

#[derive(Clone, Debug)]
pub struct IpOptions {
    /// All parameters pairwise distinct.
    pub injective: bool,
    pub budget: u64,
}

impl Default for IpOptions {
    fn default() -> Self {
        IpOptions { injective: true, budget: 1 << 24 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Shattered {
    /// The cells `(i_1, ..., i_n)` in this subset.
    pub cells: Vec<Vec<usize>>,
    pub b: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct IpWitness {
    /// `a[j][i]` is the `i`-th parameter of the `j`-th row.
    pub a: Vec<Vec<usize>>,
    pub b: Vec<Shattered>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IpReport {
    pub relation: String,
    pub n: usize,
    pub d: usize,
    pub nodes: u64,
    pub found: Option<IpWitness>,
}

/// Looks for rows `a^1..a^n` of length `d` and, for every set `S` of cells in
/// `[d]^n`, a point `b_S` with `R(b_S, a^1_{i_1}, ..., a^n_{i_n})` exactly
/// when `(i_1, ..., i_n)` is in `S`.
pub fn find_ip_pattern(m: &Structure, rel: &str, d: usize, opts: &IpOptions) -> Result<IpReport> {
    if !m.signature().is_one_sorted() {
        return Err(Error::Unsupported("pattern search in many-sorted structures".into()));
    }
    let r = m.rel_index(rel)?;
    let arity = m.signature().relations()[r].arity();
    if arity < 2 {
        return Err(Error::input(format!("`{rel}` needs arity at least 2, found {arity}")));
    }
    if d == 0 {
        return Err(Error::input("d must be at least 1"));
    }
    let n = arity - 1;
    let cells = grid(&vec![d; n]);
    if cells.len() > 6 {
        return Err(Error::Unsupported(format!("{} cells need {} parameters b", cells.len(), 1u128 << cells.len())));
    }
    let subsets = 1usize << cells.len();
    if opts.injective && m.len() < d * n + subsets {
        return Err(Error::Precondition(format!(
            "{} points cannot host {} distinct parameters",
            m.len(),
            d * n + subsets
        )));
    }
    let mut search = Search {
        m,
        r,
        n,
        d,
        cells: &cells,
        opts,
        a: vec![Vec::new(); n],
        budget: Budget::new("pattern search nodes", opts.budget),
    };
    let found = search.run()?;
    Ok(IpReport { relation: rel.to_string(), n, d, nodes: search.budget.used(), found })
}

struct Search<'a> {
    m: &'a Structure,
    r: usize,
    n: usize,
    d: usize,
    cells: &'a [Vec<usize>],
    opts: &'a IpOptions,
    a: Vec<Vec<usize>>,
    budget: Budget,
}

impl Search<'_> {
    fn assigned(&self) -> usize {
        self.a.iter().map(Vec::len).sum()
    }

    fn run(&mut self) -> Result<Option<IpWitness>> {
        self.budget.tick()?;
        let (full, masks) = self.masks();
        // Every pattern on the fully assigned cells must already be realised.
        let mut hit = vec![false; 1 << full.len()];
        for &(_, mask) in &masks {
            hit[mask] = true;
        }
        if hit.iter().any(|h| !h) {
            return Ok(None);
        }
        if self.assigned() == self.n * self.d {
            let mut b = Vec::with_capacity(hit.len());
            for s in 0..hit.len() {
                let y = masks.iter().find(|&&(_, mask)| mask == s).expect("realised").0;
                let cells = (0..full.len()).filter(|c| s >> c & 1 == 1).map(|c| self.cells[full[c]].clone()).collect();
                b.push(Shattered { cells, b: y });
            }
            return Ok(Some(IpWitness { a: self.a.clone(), b }));
        }
        let row = self.a.iter().position(|r| r.len() < self.d).expect("a row is open");
        for x in 0..self.m.len() {
            if self.opts.injective && self.a.iter().any(|r| r.contains(&x)) {
                continue;
            }
            self.a[row].push(x);
            let out = self.run()?;
            self.a[row].pop();
            if out.is_some() {
                return Ok(out);
            }
        }
        Ok(None)
    }

    /// Cells whose parameters are all chosen, and per candidate `b` its
    /// pattern on those cells.
    fn masks(&self) -> (Vec<usize>, Vec<(usize, usize)>) {
        let full: Vec<usize> =
            (0..self.cells.len()).filter(|&c| self.cells[c].iter().enumerate().all(|(j, &i)| i < self.a[j].len())).collect();
        let mut out = Vec::new();
        let mut args = vec![0usize; self.n + 1];
        for y in 0..self.m.len() {
            if self.opts.injective && self.a.iter().any(|r| r.contains(&y)) {
                continue;
            }
            args[0] = y;
            let mut mask = 0;
            for (bit, &c) in full.iter().enumerate() {
                for (j, &i) in self.cells[c].iter().enumerate() {
                    args[j + 1] = self.a[j][i];
                }
                if self.m.holds(self.r, &args) {
                    mask |= 1 << bit;
                }
            }
            out.push((y, mask));
        }
        (full, out)
    }
}
