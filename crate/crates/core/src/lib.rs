//! Compressed suffix array whose ψ function is stored as per-symbol
//! uniform-partitioned Elias-Fano postings, with a separate binary store for
//! rare symbols. Supports `count` queries by backward search over byte and
//! integer-token texts.

pub mod bitio;
pub mod construction;
pub mod corpus;
pub mod eliasfano;
pub mod error;
pub mod index;
pub mod psistore;
pub mod search;
pub mod uefblock;
pub mod workload;

mod serial;

pub use error::{Error, Result};
pub use index::Index;
