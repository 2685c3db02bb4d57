//! First-order formulas: parsing, evaluation and quantifier-free types.

mod ast;
mod compile;
mod parse;
mod qftype;
mod suite;

pub use ast::Formula;
pub use compile::Compiled;
pub use parse::parse;
pub use qftype::{function_closure, qf_type, qf_type_main, QfType};
pub use suite::{add_defined_relation, AxiomReport, AxiomSuite, Definition, ReductSpec};

use crate::error::Result;
use crate::structures::{Elem, Structure};

/// Evaluates `phi` with its free variables bound by name.
pub fn evaluate(m: &Structure, phi: &Formula, assignment: &[(&str, Elem)]) -> Result<bool> {
    let c = phi.compile(m.signature())?;
    let mut args = Vec::new();
    for (name, sort) in c.free_vars() {
        let e = assignment
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, e)| e)
            .ok_or_else(|| crate::Error::input(format!("no value for free variable `{name}`")))?;
        if e.sort != *sort {
            return Err(crate::Error::Sort(format!("value for `{name}` has the wrong sort")));
        }
        args.push(e.id);
    }
    c.eval(m, &args)
}

/// Parses and evaluates a sentence.
pub fn satisfies(m: &Structure, sentence: &str) -> Result<bool> {
    parse(sentence)?.compile(m.signature())?.holds(m)
}
