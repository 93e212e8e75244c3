//! Dense numerical kernels shared by every model: symmetric linear solves,
//! box-constrained QP, generalized eigenpairs, and l1 least squares.

mod boxqp;
mod eigen;
mod fista;

pub use boxqp::{solve_box_qp, BoxQp, QpSolution, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use eigen::{min_gen_eigenpair, sym_eigen};
pub use fista::{fista_l1, FistaResult};

use crate::error::{Error, Result};
use crate::matrix::{dot, norm_inf, Matrix};

/// Ridge added when a nominally invertible cross-product matrix turns out singular.
pub const RIDGE_FALLBACK: f64 = 1e-7;

/// Solution of a symmetric positive-definite system, with a flag telling
/// whether the ridge fallback had to kick in.
#[derive(Debug, Clone)]
pub struct SpdSolution {
    pub x: Vec<f64>,
    pub ridged: bool,
}

/// Lower-triangular Cholesky factor, stored densely.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: Matrix,
}

impl CholeskyFactor {
    /// Factors a symmetric matrix; fails on a non-positive pivot.
    pub fn new(a: &Matrix) -> Result<Self> {
        let n = a.rows();
        if a.rows() != a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "cholesky of {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite(format!(
                            "pivot {} at row {}",
                            s, i
                        )));
                    }
                    l.set(i, j, s.sqrt());
                } else {
                    l.set(i, j, s / l.get(j, j));
                }
            }
        }
        Ok(Self { l })
    }

    /// Solves L Lᵀ x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.rows();
        debug_assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.l.get(i, k) * y[k];
            }
            y[i] /= self.l.get(i, i);
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                y[i] -= self.l.get(k, i) * y[k];
            }
            y[i] /= self.l.get(i, i);
        }
        y
    }

    /// Solves L y = b (forward substitution only).
    pub fn forward_solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.l.get(i, k) * y[k];
            }
            y[i] /= self.l.get(i, i);
        }
        y
    }

    /// Solves Lᵀ x = b (back substitution only).
    pub fn backward_solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.rows();
        let mut y = b.to_vec();
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                y[i] -= self.l.get(k, i) * y[k];
            }
            y[i] /= self.l.get(i, i);
        }
        y
    }

    pub fn factor(&self) -> &Matrix {
        &self.l
    }
}

fn refine(a: &Matrix, chol: &CholeskyFactor, b: &[f64], x: &mut Vec<f64>) {
    // a couple of iterative-refinement sweeps to push the residual down
    for _ in 0..2 {
        let ax = a.matvec(x).expect("square system");
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        if norm_inf(&r) == 0.0 {
            break;
        }
        let dx = chol.solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }
}

/// Solves A x = b for symmetric A via Cholesky.
///
/// A singular (or indefinite-looking) A is retried with `A + 1e-7 I` and the
/// solution is flagged `ridged`.
pub fn solve_spd(a: &Matrix, b: &[f64]) -> Result<SpdSolution> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "solve_spd: {}x{} not square",
            a.rows(),
            a.cols()
        )));
    }
    if a.cols() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "solve_spd: {} cols vs rhs len {}",
            a.cols(),
            b.len()
        )));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("rhs of solve_spd".into()));
    }
    if !a.is_symmetric(1e-8 * (1.0 + norm_inf(a.data()))) {
        return Err(Error::InvalidParam(format!(
            "solve_spd: matrix asymmetry {:.3e}",
            a.asymmetry()
        )));
    }
    match CholeskyFactor::new(a) {
        Ok(chol) => {
            let mut x = chol.solve(b);
            refine(a, &chol, b, &mut x);
            Ok(SpdSolution { x, ridged: false })
        }
        Err(_) => {
            let mut ridged = a.clone();
            ridged.add_ridge(RIDGE_FALLBACK);
            let chol = CholeskyFactor::new(&ridged)?;
            let mut x = chol.solve(b);
            refine(&ridged, &chol, b, &mut x);
            Ok(SpdSolution { x, ridged: true })
        }
    }
}

/// Convenience wrapper returning just the solution vector.
pub fn solve_spd_vec(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    solve_spd(a, b).map(|s| s.x)
}

/// Multi-right-hand-side variant of `solve_spd`: solves A X = B with a single
/// factorization. The flag reports whether the ridge fallback fired.
pub fn solve_spd_matrix(a: &Matrix, b: &Matrix) -> Result<(Matrix, bool)> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "solve_spd_matrix: {}x{} not square",
            a.rows(),
            a.cols()
        )));
    }
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve_spd_matrix: {} cols vs {} rhs rows",
            a.cols(),
            b.rows()
        )));
    }
    if !a.is_symmetric(1e-8 * (1.0 + norm_inf(a.data()))) {
        return Err(Error::InvalidParam(format!(
            "solve_spd_matrix: matrix asymmetry {:.3e}",
            a.asymmetry()
        )));
    }
    let (system, chol, ridged) = match CholeskyFactor::new(a) {
        Ok(chol) => (a.clone(), chol, false),
        Err(_) => {
            let mut ridged_a = a.clone();
            ridged_a.add_ridge(RIDGE_FALLBACK);
            let chol = CholeskyFactor::new(&ridged_a)?;
            (ridged_a, chol, true)
        }
    };
    let mut x = Matrix::zeros(a.rows(), b.cols());
    for j in 0..b.cols() {
        let col = b.col(j);
        let mut xj = chol.solve(&col);
        refine(&system, &chol, &col, &mut xj);
        for i in 0..a.rows() {
            x.set(i, j, xj[i]);
        }
    }
    Ok((x, ridged))
}

/// Largest eigenvalue of AᵀA by power iteration (for FISTA step sizes).
pub fn spectral_norm_sq(a: &Matrix, iters: usize) -> f64 {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return 0.0;
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    for _ in 0..iters {
        let av = a.matvec(&v).expect("conformable");
        let mut atav = a.t_matvec(&av).expect("conformable");
        let norm = crate::matrix::norm2(&atav);
        if norm == 0.0 {
            return 0.0;
        }
        for x in &mut atav {
            *x /= norm;
        }
        lambda = norm;
        v = atav;
    }
    // one Rayleigh quotient to tighten the estimate
    let av = a.matvec(&v).expect("conformable");
    let num = dot(&av, &av);
    let den = dot(&v, &v);
    if den > 0.0 {
        lambda = num / den;
    }
    lambda
}
