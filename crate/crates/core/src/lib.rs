//! Binary Chow-Liu trees, their compilation into smooth, decomposable and
//! deterministic probabilistic circuits, and exact batch inference
//! (EVI, MAR, MPE, conditional sampling) over both representations.
//!
//! The pipeline is:
//!
//! 1. [`data::BitMatrix`] holds a binary dataset packed column-wise;
//!    [`data::pairwise_counts`] counts co-occurrences with word-level popcounts.
//! 2. [`clt::fit_clt`] learns a Chow-Liu tree (maximum spanning tree of the
//!    mutual-information matrix) with Laplace-smoothed conditional tables.
//! 3. [`compile::compile_clt`] turns the tree into a [`circuit::Circuit`].
//! 4. [`infer`] answers queries over circuits; [`clt::query`] answers the
//!    same queries directly on the tree. [`oracle`] provides brute-force
//!    references for both.

pub mod circuit;
pub mod clt;
pub mod compile;
pub mod data;
mod error;
pub mod infer;
pub mod logspace;
pub mod oracle;
mod parallel;
mod serial;

pub use error::{Error, Result};
pub use logspace::{LogReal, Precision};
