//! Numerical laboratory for Faddeev's quantum dilogarithm and the five-term
//! beta-pentagon identities it feeds: pointwise special-function evaluation
//! with cross-validating representations, pentagon-family construction from
//! function tuples, automorphic (quotient) lifts, and exact finite-group
//! cross-checks via the simplicial 2-3 move.

pub mod automorphic;
pub mod error;
pub mod faddeev;
pub mod gamma;
pub mod lca;
pub mod pentagon;
pub mod qdilog;
pub mod quad;
pub mod report;

pub use error::{Error, Result};
