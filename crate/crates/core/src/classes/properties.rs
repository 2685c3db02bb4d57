use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fragment::ClassFragment;
use crate::error::{Error, Result};
use crate::relzoo::check_axioms;
use crate::structures::{count_embeddings, embeds, enumerate_embeddings, search_embeddings, subsets, Structure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Property {
    Hp,
    Jep,
    Ap,
    Sap,
    Fap,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Hp => "HP",
            Property::Jep => "JEP",
            Property::Ap => "AP",
            Property::Sap => "SAP",
            Property::Fap => "FAP",
        })
    }
}

impl FromStr for Property {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "HP" => Property::Hp,
            "JEP" => Property::Jep,
            "AP" => Property::Ap,
            "SAP" => Property::Sap,
            "FAP" => Property::Fap,
            _ => return Err(Error::input(format!("unknown property `{s}` (expected HP, JEP, AP, SAP or FAP)"))),
        })
    }
}

/// A failing instance. Participants are fragment members written `#index:name`.
/// For spans, `maps` holds the image of `A` in `B` and the map `A -> C`.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub participants: Vec<String>,
    pub maps: Vec<Vec<usize>>,
    pub reason: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failed_axioms: Vec<String>,
}

/// Outcome of a bounded property check.
///
/// An instance is inconclusive when it has no witness inside the fragment
/// but could have one beyond the witness bound. Spans whose disjoint union
/// exceeds the bound are counted as inconclusive without being searched.
/// Inconclusive instances never count as failures.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub fragment: String,
    pub bound: usize,
    pub witness_bound: usize,
    pub holds: bool,
    pub checked: u64,
    pub inconclusive: u64,
    pub failures: Vec<Failure>,
}

fn label(f: &ClassFragment, i: usize) -> String {
    format!("#{i}:{}", f.members()[i].name())
}

fn nonempty_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..=n).flat_map(move |k| subsets(n, k))
}

/// `A = B[sub]` embedded in `B` by inclusion and in `C` by `f`.
#[derive(Clone, Debug)]
struct Span {
    a: usize,
    b: usize,
    c: usize,
    sub: Vec<usize>,
    f: Vec<usize>,
}

/// Spans whose disjoint amalgam fits in `limit` points, and the number of
/// spans skipped because it does not.
fn spans(frag: &ClassFragment, limit: usize) -> Result<(Vec<Span>, u64)> {
    let ms = frag.members();
    let mut out = Vec::new();
    let mut skipped = 0;
    for (b, mb) in ms.iter().enumerate() {
        for sub in nonempty_subsets(mb.len()) {
            let am = mb.induced_main(&sub)?;
            let Some(a) = frag.find(&am)? else { continue };
            for (c, mc) in ms.iter().enumerate() {
                if mb.len() + mc.len() - sub.len() > limit {
                    skipped += count_embeddings(&am, mc)?;
                    continue;
                }
                for f in enumerate_embeddings(&am, mc)? {
                    out.push(Span { a, b, c, sub: sub.clone(), f: f.main().to_vec() });
                }
            }
        }
    }
    Ok((out, skipped))
}

/// The free amalgam of `B` and `C` over the span: `B` keeps its ids, the
/// points of `C` outside the image of `A` follow in order.
fn free_amalgam(b: &Structure, c: &Structure, sub: &[usize], f: &[usize]) -> Result<Structure> {
    let nb = b.len();
    let mut to_d = vec![usize::MAX; c.len()];
    for (k, &x) in f.iter().enumerate() {
        to_d[x] = sub[k];
    }
    let mut next = nb;
    for slot in to_d.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    let mut d = Structure::one_sorted(format!("{}+{}", b.name(), c.name()), b.signature().clone(), next)?;
    for r in 0..b.signature().relations().len() {
        let mut t = b.relation(r).tuples().to_vec();
        t.extend(c.relation(r).tuples().iter().map(|u| u.iter().map(|&x| to_d[x]).collect()));
        d.set_relation(r, t)?;
    }
    Ok(d)
}

enum Outcome {
    Witness,
    Fail(Failure),
    Inconclusive,
}

fn check_span(frag: &ClassFragment, s: &Span, prop: Property, wb: usize) -> Result<Outcome> {
    let ms = frag.members();
    let (mb, mc) = (&ms[s.b], &ms[s.c]);
    let sum = mb.len() + mc.len() - s.sub.len();
    let relational = frag.signature.is_relational();
    let fail = |reason: String, failed_axioms: Vec<String>| {
        Outcome::Fail(Failure {
            participants: vec![label(frag, s.a), label(frag, s.b), label(frag, s.c)],
            maps: vec![s.sub.clone(), s.f.clone()],
            reason,
            failed_axioms,
        })
    };
    if relational {
        let fa = free_amalgam(mb, mc, &s.sub, &s.f)?;
        if (prop == Property::Fap || sum <= wb) && frag.contains(&fa)? {
            return Ok(Outcome::Witness);
        }
        if prop == Property::Fap {
            if sum > frag.bound {
                return Ok(Outcome::Inconclusive);
            }
            let failed = match frag.kind {
                Some(k) => check_axioms(k, &fa)?.into_iter().filter(|r| !r.holds).map(|r| r.axiom).collect(),
                None => Vec::new(),
            };
            return Ok(fail("free amalgam is not in the fragment".into(), failed));
        }
    }
    let strong = prop == Property::Sap;
    let lo = if strong { sum } else { mb.len().max(mc.len()) };
    let in_b: Vec<bool> = (0..mb.len()).map(|x| s.sub.contains(&x)).collect();
    let in_fa: Vec<bool> = (0..mc.len()).map(|x| s.f.contains(&x)).collect();
    for d in ms.iter().filter(|d| d.len() >= lo && d.len() <= wb) {
        let mut found = false;
        search_embeddings(mb, d, None, |g| {
            let g = g.main();
            let mut fixed = vec![None; mc.len()];
            for (k, &x) in s.f.iter().enumerate() {
                fixed[x] = Some(g[s.sub[k]]);
            }
            let outside: Vec<bool> = {
                let mut v = vec![false; d.len()];
                for (x, &y) in g.iter().enumerate() {
                    v[y] = !in_b[x];
                }
                v
            };
            let _ = search_embeddings(mc, d, Some(&[fixed]), |h| {
                let clash = strong && h.main().iter().enumerate().any(|(x, &y)| !in_fa[x] && outside[y]);
                if clash {
                    ControlFlow::Continue(())
                } else {
                    found = true;
                    ControlFlow::Break(())
                }
            });
            if found {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        if found {
            return Ok(Outcome::Witness);
        }
    }
    if sum <= wb {
        Ok(fail(format!("no amalgam of size at most {wb}"), Vec::new()))
    } else {
        Ok(Outcome::Inconclusive)
    }
}

/// Checks one of HP, JEP, AP, SAP, FAP on a fragment. Witnesses are sought
/// among members of size at most `witness_bound` (default: the fragment bound).
pub fn check_property(frag: &ClassFragment, prop: Property, witness_bound: Option<usize>) -> Result<PropertyReport> {
    let wb = witness_bound.unwrap_or(frag.bound).min(frag.bound);
    if prop == Property::Fap && !frag.signature.is_relational() {
        return Err(Error::Unsupported("FAP needs a purely relational signature".into()));
    }
    if !frag.signature.is_one_sorted() {
        return Err(Error::Unsupported("property checks on many-sorted fragments".into()));
    }
    let ms = frag.members();
    let mut skipped = 0;
    let outcomes: Vec<Outcome> = match prop {
        Property::Hp => ms
            .par_iter()
            .enumerate()
            .map(|(i, m)| {
                let mut out = Vec::new();
                for sub in nonempty_subsets(m.len()) {
                    if !frag.contains(&m.induced_main(&sub)?)? {
                        out.push(Outcome::Fail(Failure {
                            participants: vec![label(frag, i)],
                            maps: vec![sub],
                            reason: "substructure is not in the fragment".into(),
                            failed_axioms: Vec::new(),
                        }));
                    } else {
                        out.push(Outcome::Witness);
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect(),
        Property::Jep => {
            let pairs: Vec<(usize, usize)> =
                (0..ms.len()).flat_map(|i| (i..ms.len()).map(move |j| (i, j))).collect();
            pairs
                .par_iter()
                .map(|&(i, j)| {
                    for d in ms.iter().filter(|d| d.len() <= wb) {
                        if embeds(&ms[i], d)? && embeds(&ms[j], d)? {
                            return Ok(Outcome::Witness);
                        }
                    }
                    Ok(if ms[i].len() + ms[j].len() <= wb {
                        Outcome::Fail(Failure {
                            participants: vec![label(frag, i), label(frag, j)],
                            maps: Vec::new(),
                            reason: format!("no joint embedding of size at most {wb}"),
                            failed_axioms: Vec::new(),
                        })
                    } else {
                        Outcome::Inconclusive
                    })
                })
                .collect::<Result<_>>()?
        }
        _ => {
            let limit = if prop == Property::Fap { frag.bound } else { wb };
            let (spans, n) = spans(frag, limit)?;
            skipped = n;
            spans.par_iter().map(|s| check_span(frag, s, prop, wb)).collect::<Result<_>>()?
        }
    };
    let mut report = PropertyReport {
        property: prop,
        fragment: frag.name.clone(),
        bound: frag.bound,
        witness_bound: wb,
        holds: true,
        checked: 0,
        inconclusive: skipped,
        failures: Vec::new(),
    };
    for o in outcomes {
        match o {
            Outcome::Witness => report.checked += 1,
            Outcome::Inconclusive => report.inconclusive += 1,
            Outcome::Fail(f) => {
                report.checked += 1;
                report.failures.push(f);
            }
        }
    }
    report.holds = report.failures.is_empty();
    Ok(report)
}
