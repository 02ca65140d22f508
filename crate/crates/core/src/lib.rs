//! Computational Thom-Boardman stratification over finite fields, local
//! normal forms (Morse / splitting lemma, Milnor numbers, determinacy),
//! inseparable covers, and the arithmetic irrationality criteria for
//! complete intersections.
//!
//! Everything is exact: coefficients live in F_{p^k} under canonical
//! (lexicographically least) moduli, so all outputs are reproducible
//! bit-for-bit across runs, platforms and thread counts.

pub mod covers;
pub mod criteria;
pub mod error;
pub mod ffield;
pub(crate) mod linalg;
pub mod localalg;
pub mod poly;
pub mod powerseries;
pub mod report;
pub mod strata;

pub use error::{Error, Result};
