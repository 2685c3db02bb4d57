//! Finite many-sorted structures and the maps between them.

pub mod build;
mod canon;
mod embed;
mod json;
mod signature;
mod structure;

pub use canon::{
    are_isomorphic, automorphism_group, automorphism_group_with, canonical_form,
    canonical_labelling, canonical_labelling_with, canonical_structure, isomorphism,
    AutomorphismGroup, CanonicalForm, DEFAULT_LEAF_BUDGET,
};
pub use embed::{
    count_embeddings, embeds, enumerate_embeddings, first_embedding, is_embedding,
    search_embeddings, subsets, Embedding,
};
pub use signature::{FunSym, RelSym, Signature, SortId};
pub use structure::{for_each_tuple, grid, Elem, FunTable, Relation, Structure};
