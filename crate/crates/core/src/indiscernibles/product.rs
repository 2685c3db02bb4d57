//! Reading a sequence in a product through its factors.

use serde::Serialize;

use super::sequence::{is_indiscernible, IndexedSequence};
use crate::error::{Error, Result};
use crate::logic::qf_type;
use crate::structures::{Elem, Structure};

/// `pi1` and `pi2` of a sequence in the main sort of `M1 x M2`.
pub fn project(s: &IndexedSequence, m1: &Structure, m2: &Structure) -> Result<(IndexedSequence, IndexedSequence)> {
    let sig = s.target.signature();
    let (Some(p1), Some(p2)) = (sig.function_index("pi1"), sig.function_index("pi2")) else {
        return Err(Error::input(format!("`{}` is not a full product", s.target.name())));
    };
    let at = |f: usize, e: Elem| Elem::main(s.target.apply(f, &[e.id]).expect("projections are total"));
    Ok((s.map_terms(m1.clone(), |e| at(p1, e))?, s.map_terms(m2.clone(), |e| at(p2, e))?))
}

/// A sequence in a lexicographic sum split into its spine and fibre parts.
#[derive(Clone, Debug)]
pub struct LexParts {
    /// `v` applied coordinatewise, as a sequence in the spine.
    pub spine: IndexedSequence,
    /// Per coordinate, the spine point it stays at, if it never moves.
    pub constant: Vec<Option<usize>>,
    /// For each spine point some coordinate stays at: the subsequence of
    /// those coordinates, read in the rib.
    pub fibres: Vec<(usize, IndexedSequence)>,
    /// All terms have the same type in the sum.
    pub types_constant: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LexVerdict {
    /// Indiscernible in the sum.
    pub indiscernible: bool,
    /// Every coordinate whose spine values meet at distinct indices is constant.
    pub part_a: bool,
    /// Fibres, spine and term types all behave.
    pub components: bool,
}

/// Splits `s`, a sequence into the main sort of `sum`. `spine` is the spine
/// as a one-sorted structure and `ribs[a]` the rib over `a`.
pub fn lex_parts(s: &IndexedSequence, spine: &Structure, ribs: &[Structure]) -> Result<LexParts> {
    let sum = &s.target;
    let v = sum
        .signature()
        .function_index("v")
        .ok_or_else(|| Error::input(format!("`{}` is not a lexicographic sum", sum.name())))?;
    if ribs.len() != spine.len() {
        return Err(Error::input("one rib per spine point is required"));
    }
    let vmap: Vec<usize> = sum.function(v).values().iter().map(|x| x.expect("v is total")).collect();
    let mut offset = vec![0usize; ribs.len()];
    for a in 1..ribs.len() {
        offset[a] = offset[a - 1] + ribs[a - 1].len();
    }
    let spine_seq = s.map_terms(spine.clone(), |e| Elem::main(vmap[e.id]))?;
    let constant: Vec<Option<usize>> = (0..s.k)
        .map(|c| {
            let first = vmap[s.map.first()?[c].id];
            s.map.iter().all(|t| vmap[t[c].id] == first).then_some(first)
        })
        .collect();
    let mut points: Vec<usize> = constant.iter().flatten().copied().collect();
    points.sort_unstable();
    points.dedup();
    let mut fibres = Vec::new();
    for a in points {
        let coords: Vec<usize> = (0..s.k).filter(|&c| constant[c] == Some(a)).collect();
        let map = s
            .map
            .iter()
            .map(|t| coords.iter().map(|&c| Elem::main(t[c].id - offset[a])).collect())
            .collect();
        fibres.push((a, IndexedSequence::new(s.index.clone(), ribs[a].clone(), map)?.with_mode(s.mode)));
    }
    let first = s.map.first().map(|t| qf_type(sum, t));
    let types_constant = s.map.iter().all(|t| Some(qf_type(sum, t)) == first);
    Ok(LexParts { spine: spine_seq, constant, fibres, types_constant })
}

/// Both sides of the lexicographic characterisation for one sequence.
pub fn lex_verdict(s: &IndexedSequence, spine: &Structure, ribs: &[Structure]) -> Result<LexVerdict> {
    let parts = lex_parts(s, spine, ribs)?;
    let indiscernible = is_indiscernible(s)?.indiscernible;
    let mut part_a = true;
    for c in 0..s.k {
        let vals: Vec<usize> = parts.spine.map.iter().map(|t| t[c].id).collect();
        let meets = (0..vals.len()).any(|i| (i + 1..vals.len()).any(|j| vals[i] == vals[j]));
        if meets && parts.constant[c].is_none() {
            part_a = false;
        }
    }
    let mut components = parts.types_constant && is_indiscernible(&parts.spine)?.indiscernible;
    for (_, f) in &parts.fibres {
        if !components {
            break;
        }
        components &= is_indiscernible(f)?.indiscernible;
    }
    Ok(LexVerdict { indiscernible, part_a, components })
}
