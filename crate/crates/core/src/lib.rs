//! Convexity-preserving approximation of convex functions by elements of
//! function algebras, with sampled certificates for every construction.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops read better in the matrix kernels.
#![allow(clippy::needless_range_loop)]

pub mod borsuk;
pub mod convexity;
pub mod counterexample;
pub mod error;
pub mod funcexpr;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod sgcore;
pub mod univariate;

pub use error::{Error, Result};
pub use funcexpr::{AffineFunc, ExpPoly, FunctionExpr, Polynomial};
pub use geometry::{Aabb, Chord, ConvexBody, Grid};
