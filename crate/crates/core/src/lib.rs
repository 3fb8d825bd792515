//! Finite-scale laboratory for preference-based nonmonotonic semantics.
//!
//! Everything here is brute-force verifiable: languages are capped at 16
//! variables, universes at desk scale, and every checker quantifies
//! exhaustively over its finite domain.

pub mod bits;
pub mod cond;
pub mod error;
pub mod fixtures;
pub mod lattice;
pub mod logic;
pub mod pref;
pub mod repr;
pub mod revision;
pub mod rules;

pub use error::{Error, Result};
