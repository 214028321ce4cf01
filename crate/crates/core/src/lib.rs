//! Weighted Morrey spaces on discretized R^n (n = 1, 2): norms, the
//! Hardy-Littlewood maximal operator, power-weight range predicates and an
//! experiment harness that checks the predicates against numerics.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod czops;
pub mod discretize;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod maximal;
pub mod morrey;
pub mod quad;
pub mod ranges;
pub mod weights;

pub use error::{Error, Result};
