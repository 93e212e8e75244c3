//! Core library for the twinbench toolkit: dense linear algebra, the solver
//! kit, feature ranking, the classifier zoo, cross-validation, and the
//! post-hoc statistical tests.

pub mod data;
pub mod error;
pub mod eval;
pub mod featsel;
pub mod forests;
pub mod kernels;
pub mod matrix;
pub mod numkit;
pub mod rng;
pub mod shallow;
pub mod stats;
pub mod svmfam;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use matrix::Matrix;
