use serde::{Deserialize, Serialize};

use super::ast::Formula;
use super::parse::parse;
use crate::error::{Error, Result};
use crate::structures::{Elem, Signature, Structure};

/// A named list of sentences, read from stanzas of the form
///
/// ```text
/// [name]
/// formula text, possibly over several lines
/// ```
#[derive(Clone, Debug)]
pub struct AxiomSuite {
    pub name: String,
    pub axioms: Vec<(String, Formula)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AxiomReport {
    pub axiom: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<(String, Elem)>>,
}

impl AxiomSuite {
    pub fn parse(name: &str, text: &str) -> Result<AxiomSuite> {
        let mut axioms = Vec::new();
        let mut cur: Option<(String, String, usize)> = None;
        let flush = |cur: &mut Option<(String, String, usize)>, axioms: &mut Vec<_>| -> Result<()> {
            if let Some((n, body, first_line)) = cur.take() {
                let f = parse(&body).map_err(|e| match e {
                    Error::Parse { line, col, msg } => Error::Parse {
                        line: line + first_line - 1,
                        col,
                        msg: format!("in axiom `{n}`: {msg}"),
                    },
                    e => e,
                })?;
                axioms.push((n, f));
            }
            Ok(())
        };
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.starts_with('[') && t.ends_with(']') {
                flush(&mut cur, &mut axioms)?;
                cur = Some((t[1..t.len() - 1].trim().to_string(), String::new(), i + 2));
            } else if let Some((_, body, _)) = cur.as_mut() {
                body.push_str(line);
                body.push('\n');
            } else if !t.is_empty() && !t.starts_with('#') {
                return Err(Error::Parse { line: i + 1, col: 1, msg: "text before the first `[name]`".into() });
            }
        }
        flush(&mut cur, &mut axioms)?;
        Ok(AxiomSuite { name: name.into(), axioms })
    }

    pub fn get(&self, name: &str) -> Option<&Formula> {
        self.axioms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn extend(mut self, other: &AxiomSuite) -> AxiomSuite {
        self.axioms.extend(other.axioms.iter().cloned());
        self
    }

    /// Checks every axiom; failures carry the first falsifying assignment.
    pub fn check(&self, m: &Structure) -> Result<Vec<AxiomReport>> {
        self.axioms
            .iter()
            .map(|(name, f)| {
                if !f.free_vars().is_empty() {
                    return Err(Error::input(format!("axiom `{name}` is not a sentence")));
                }
                let c = f.compile(m.signature())?;
                let witness = c.counterexample(m)?;
                Ok(AxiomReport { axiom: name.clone(), holds: witness.is_none(), witness })
            })
            .collect()
    }

    pub fn holds(&self, m: &Structure) -> Result<bool> {
        Ok(self.check(m)?.iter().all(|r| r.holds))
    }
}

/// Adds `name(x1..xk) :<-> phi` for the free variables of `phi` in order.
pub fn add_defined_relation(m: &Structure, name: &str, phi: &Formula) -> Result<Structure> {
    let c = phi.compile(m.signature())?;
    let sorts = c.free_vars().iter().map(|(_, s)| *s).collect();
    m.with_relation(name, sorts, c.satisfying_tuples(m)?)
}

/// How to obtain a reduct `J` of an index structure `I`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ReductSpec {
    /// Keep the listed relation symbols.
    Keep(Vec<String>),
    /// Replace the signature by quantifier-free definitions over it.
    Define(Vec<Definition>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub formula: String,
}

impl ReductSpec {
    pub fn from_json_str(text: &str) -> Result<ReductSpec> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn apply(&self, i: &Structure) -> Result<Structure> {
        match self {
            ReductSpec::Keep(names) => {
                let keep: Vec<&str> = names.iter().map(String::as_str).collect();
                i.reduct(&keep)
            }
            ReductSpec::Define(defs) => {
                if !i.signature().is_one_sorted() {
                    return Err(Error::Unsupported("definitional reducts of many-sorted structures".into()));
                }
                let mut out = Structure::one_sorted(i.name(), Signature::one_sorted(), i.len())?;
                for d in defs {
                    let f = parse(&d.formula)?;
                    if !f.is_quantifier_free() {
                        return Err(Error::input(format!("definition of `{}` has quantifiers", d.name)));
                    }
                    let c = f.compile(i.signature())?;
                    let tuples = c.satisfying_tuples(i)?;
                    out = out.with_relation(&d.name, vec![0; c.free_vars().len()], tuples)?;
                }
                Ok(out)
            }
        }
    }
}
