//! Kernel abstraction shared by the kernelized models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{sq_dist, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    Gaussian { gamma: f64 },
}

impl KernelSpec {
    pub fn gaussian(gamma: f64) -> Result<Self> {
        if gamma <= 0.0 || !gamma.is_finite() {
            return Err(Error::InvalidParam(format!("gamma = {gamma} must be > 0")));
        }
        Ok(KernelSpec::Gaussian { gamma })
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, KernelSpec::Linear)
    }

    /// Kernel value for a single pair of points.
    pub fn eval(&self, a: &[f64], c: &[f64]) -> f64 {
        match self {
            KernelSpec::Linear => a.iter().zip(c).map(|(x, z)| x * z).sum(),
            KernelSpec::Gaussian { gamma } => (-gamma * sq_dist(a, c)).exp(),
        }
    }
}

/// Rectangular Gram matrix: result[i][j] = k(A_i, C_j).
pub fn gram(a: &Matrix, c: &Matrix, k: KernelSpec) -> Result<Matrix> {
    if a.cols() != c.cols() {
        return Err(Error::DimensionMismatch(format!(
            "gram: {} vs {} columns",
            a.cols(),
            c.cols()
        )));
    }
    let mut out = Matrix::zeros(a.rows(), c.rows());
    for i in 0..a.rows() {
        let ai = a.row(i);
        for j in 0..c.rows() {
            out.set(i, j, k.eval(ai, c.row(j)));
        }
    }
    Ok(out)
}
