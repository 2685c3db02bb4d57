//! Index structures, generalized indiscernible sequences and their collapse,
//! coding configurations and independence patterns.

mod collapse;
mod config;
mod ip;
mod product;
mod reasonable;
mod sequence;

pub use collapse::{
    arity_reduct, collapse_scan, irreflexive_version, CollapseReport, ImageCount, ScanMode, ScanOptions,
    UncollapsedWitness, DEFAULT_SCAN_BUDGET,
};
pub use config::{find_configuration, templates, ConfigOptions, ConfigReport, Configuration, Interpretation, Template, TemplateSet};
pub use ip::{find_ip_pattern, IpOptions, IpReport, IpWitness, Shattered};
pub use product::{lex_parts, lex_verdict, project, LexParts, LexVerdict};
pub use reasonable::{
    check_assignment, is_homogeneous, is_primitive, is_reasonable, is_reasonable_with, AssignmentCheck, EdgeAssignment, EdgeClass, HomogeneityReport,
    PrimitivityReport, ReasonableReport, DEFAULT_MAX_CLASSES,
};
pub use sequence::{
    injective_tuples, is_indiscernible, is_indiscernible_upto, locality, IndexClasses, IndexedSequence,
    IndiscernibilityReport, Pattern, PatternEval, Violation, DEFAULT_TUPLE_BUDGET,
};
