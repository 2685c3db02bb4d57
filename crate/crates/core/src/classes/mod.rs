//! Finite fragments of classes of structures and their combinatorics.

mod arrow;
mod fragment;
mod properties;

pub use arrow::{
    arrow, ramsey_scan, refutes_arrow, ArrowMode, ArrowReport, Colouring, RamseyScan, ScanEntry, Verdict,
    DEFAULT_ARROW_BUDGET,
};
pub use fragment::{age, closure_of, generate, hereditary_closure, ClassFragment};
pub use properties::{check_property, Failure, Property, PropertyReport};
