//! Numerical toolkit for G-D operators: Garding hyperbolic polynomials
//! evaluated on real, complex and quaternionic Hermitian matrices.

// `!(x > 0.0)` is used on purpose so NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cones;
pub mod error;
pub mod fd;
pub mod garding;
pub mod linalg;
pub mod majorize;
pub mod operators;
pub mod parallel;
pub mod poly;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
