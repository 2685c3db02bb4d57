//! Trigraphs, contraction sequences and exact twin-width at small sizes.

mod solver;
mod transfer;
mod trigraph;

pub use solver::{
    heuristic_sequence, is_cograph, twin_width, twin_width_of, ContractionSequence, MemoKey, SolverOptions, TwinWidth, WidthMode,
    DEFAULT_EXACT_BOUND, DEFAULT_NODE_BUDGET,
};
pub use transfer::{lex_sum_graph, transfer_experiment, TransferReport, TransferRow};
pub use trigraph::{Trigraph, MAX_VERTICES};
