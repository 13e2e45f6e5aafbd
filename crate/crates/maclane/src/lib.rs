//! MacLane cluster pictures of separable polynomials over unramified p-adic
//! fields, and the special fibre of the regular SNC model of y² = f(x).

pub mod arith;
pub mod clusters;
pub mod error;
pub mod fibre;
pub mod invariants;
pub mod newton;
pub mod parse;
pub mod report;
pub mod selfcheck;
pub mod valuation;

pub use error::{Error, Result};
