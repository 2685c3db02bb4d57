//! Finite model theory for products and indiscernible sequences.

pub mod classes;
pub mod error;
pub mod indiscernibles;
pub mod logic;
pub mod products;
pub mod relzoo;
pub mod structures;
pub mod twinwidth;

pub use error::{Budget, Error, Result};
pub use structures::{Elem, Signature, Structure};
