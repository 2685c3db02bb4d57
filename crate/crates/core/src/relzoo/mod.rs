//! Generators, axiom suites and transforms for orders, trees and their relatives.

pub mod axioms;
mod gen;
mod literal;
mod transform;
mod tree;

pub use gen::{c_tuples, cod_from_tree, d_from_tree, d_tuples, gen, oc_from_tree, Kind};
pub use literal::{solve_literal_system, LiteralReport, LiteralSystem};
pub use transform::{c_to_d, cut_cyclic_order, d_to_c_pointed, od_to_oc};
pub use tree::{BinaryTree, Shape};

use crate::error::Result;
use crate::logic::AxiomReport;
use crate::structures::Structure;

/// Checks a structure against the axioms of `kind`.
pub fn check_axioms(kind: Kind, m: &Structure) -> Result<Vec<AxiomReport>> {
    axioms::axioms(kind).check(m)
}
