//! The JSON exchange format for structures.
//!
//! ```json
//! {"name": "K2", "sorts": {"main": 2},
//!  "signature": {"relations": [{"name": "E", "arity": 2}]},
//!  "relations": {"E": [[0, 1], [1, 0]]}}
//! ```
//!
//! `sorts` may be replaced by `"size": n` for one-sorted structures. Function
//! tables are row-major over the argument grid and use `-1` for `u`.

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::signature::Signature;
use super::structure::Structure;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct RelDecl {
    name: String,
    arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sorts: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct FunDecl {
    name: String,
    args: Vec<String>,
    result: String,
    #[serde(default)]
    partial: bool,
}

#[derive(Serialize, Deserialize, Default)]
struct SigDecl {
    #[serde(default)]
    relations: Vec<RelDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    functions: Vec<FunDecl>,
}

#[derive(Serialize, Deserialize)]
struct TableDecl {
    table: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct StructureDoc {
    #[serde(default)]
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sorts: Option<IndexMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    size: Option<usize>,
    #[serde(default)]
    signature: SigDecl,
    #[serde(default)]
    relations: IndexMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    functions: IndexMap<String, TableDecl>,
}

impl Structure {
    pub fn from_json_str(text: &str) -> Result<Structure> {
        let doc: StructureDoc = serde_json::from_str(text)?;
        from_doc(doc)
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Structure> {
        from_doc(serde_json::from_value(v)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Structure> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
        Structure::from_json_str(&text)
            .map_err(|e| Error::input(format!("{}: {e}", path.display())))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(to_doc(self)).expect("structure serialises")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&to_doc(self)).expect("structure serialises")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

fn from_doc(doc: StructureDoc) -> Result<Structure> {
    let sorts: IndexMap<String, usize> = match (doc.sorts, doc.size) {
        (Some(s), None) => s,
        (None, Some(n)) => IndexMap::from([("main".to_string(), n)]),
        (Some(_), Some(_)) => return Err(Error::input("give either `sorts` or `size`, not both")),
        (None, None) => {
            // Infer the size of a one-sorted structure from the largest id used.
            let n = doc.relations.values().flatten().flatten().map(|&a| a + 1).max().unwrap_or(0);
            IndexMap::from([("main".to_string(), n)])
        }
    };
    let mut sig = Signature::with_sorts(sorts.keys().cloned())?;
    let sort_of = |sig: &Signature, name: &str| {
        sig.sort_index(name).ok_or_else(|| Error::Sort(format!("unknown sort `{name}`")))
    };
    for r in &doc.signature.relations {
        let s = match &r.sorts {
            None => vec![0; r.arity],
            Some(names) => {
                if names.len() != r.arity {
                    return Err(Error::Signature(format!(
                        "relation `{}` declares arity {} but {} sorts",
                        r.name,
                        r.arity,
                        names.len()
                    )));
                }
                names.iter().map(|n| sort_of(&sig, n)).collect::<Result<_>>()?
            }
        };
        sig.add_relation(&r.name, s)?;
    }
    for f in &doc.signature.functions {
        let args = f.args.iter().map(|n| sort_of(&sig, n)).collect::<Result<_>>()?;
        let result = sort_of(&sig, &f.result)?;
        sig.add_function(&f.name, args, result, f.partial)?;
    }
    let mut m = Structure::new(doc.name, sig.clone(), sorts.values().copied().collect())?;
    for (name, tuples) in doc.relations {
        let r = sig
            .relation_index(&name)
            .ok_or_else(|| Error::Signature(format!("tuples given for undeclared `{name}`")))?;
        m.set_relation(r, tuples)?;
    }
    for (f, sym) in sig.functions().iter().enumerate() {
        let t = doc
            .functions
            .get(&sym.name)
            .ok_or_else(|| Error::input(format!("missing table for function `{}`", sym.name)))?;
        let values = t
            .table
            .iter()
            .map(|&v| match v {
                -1 => Ok(None),
                v if v >= 0 => Ok(Some(v as usize)),
                v => Err(Error::input(format!("bad table entry {v} in `{}`", sym.name))),
            })
            .collect::<Result<_>>()?;
        m.set_function(f, values)?;
    }
    if let Some(extra) = doc.functions.keys().find(|k| sig.function_index(k).is_none()) {
        return Err(Error::Signature(format!("table given for undeclared function `{extra}`")));
    }
    Ok(m)
}

fn to_doc(m: &Structure) -> StructureDoc {
    let sig = m.signature();
    let sort_names = sig.sorts();
    let one_sorted = sig.is_one_sorted() && sort_names[0] == "main";
    StructureDoc {
        name: m.name().to_string(),
        sorts: Some(sort_names.iter().cloned().zip(m.sizes().iter().copied()).collect()),
        size: None,
        signature: SigDecl {
            relations: sig
                .relations()
                .iter()
                .map(|r| RelDecl {
                    name: r.name.clone(),
                    arity: r.arity(),
                    sorts: (!one_sorted)
                        .then(|| r.sorts.iter().map(|&s| sort_names[s].clone()).collect()),
                })
                .collect(),
            functions: sig
                .functions()
                .iter()
                .map(|f| FunDecl {
                    name: f.name.clone(),
                    args: f.args.iter().map(|&s| sort_names[s].clone()).collect(),
                    result: sort_names[f.result].clone(),
                    partial: f.partial,
                })
                .collect(),
        },
        relations: sig
            .relations()
            .iter()
            .enumerate()
            .map(|(r, sym)| (sym.name.clone(), m.relation(r).tuples().to_vec()))
            .collect(),
        functions: sig
            .functions()
            .iter()
            .enumerate()
            .map(|(f, sym)| {
                let table =
                    m.function(f).values().iter().map(|v| v.map_or(-1, |x| x as i64)).collect();
                (sym.name.clone(), TableDecl { table })
            })
            .collect(),
    }
}
