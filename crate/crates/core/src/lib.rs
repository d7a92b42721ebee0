//! Pseudorandom points from kth-order linear recurrences over GF(p^k) and
//! the tools to measure them: exact star discrepancy, digit-weighted
//! exponential-sum bounds and the explicit analytic bounds.

pub mod bounds;
pub mod discrepancy;
pub mod error;
pub mod experiment;
pub mod gf;
pub mod multiseq;
pub mod seqgen;

pub use error::{Error, Result};
pub use gf::{FieldCtx, FieldElement};
