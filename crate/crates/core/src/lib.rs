//! Exact lattice algorithms for running search-to-decision reductions for
//! approximate SVP and CVP at desk scale.

pub mod error;
pub mod lattice;
pub mod oracle;
pub mod primes;
pub mod rational;
pub mod reductions;
pub mod solvers;
pub mod sparsify;

pub use error::{Error, Result};
