//! FISTA for the L1-regularized least squares problem
//! minimize ‖AW − B‖_F² + λ‖W‖₁, used by the sparse autoencoder pretraining.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numkit::spectral_norm_sq;

const POWER_ITERS: usize = 100;
const REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FistaResult {
    pub w: Matrix,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn objective(a: &Matrix, b: &Matrix, w: &Matrix, lambda: f64) -> f64 {
    let aw = a.matmul(w).expect("conformable");
    let mut smooth = 0.0;
    for (x, y) in aw.data().iter().zip(b.data()) {
        let r = x - y;
        smooth += r * r;
    }
    smooth + lambda * w.data().iter().map(|v| v.abs()).sum::<f64>()
}

fn gradient(a: &Matrix, b: &Matrix, y: &Matrix) -> Matrix {
    let ay = a.matmul(y).expect("conformable");
    let resid: Vec<f64> = ay.data().iter().zip(b.data()).map(|(x, t)| x - t).collect();
    let resid = Matrix::from_vec(ay.rows(), ay.cols(), resid).expect("finite");
    let mut g = a.t_matmul(&resid).expect("conformable");
    g.scale(2.0);
    g
}

fn shrink(v: &Matrix, threshold: f64) -> Matrix {
    let data: Vec<f64> = v
        .data()
        .iter()
        .map(|&x| x.signum() * (x.abs() - threshold).max(0.0))
        .collect();
    Matrix::from_vec(v.rows(), v.cols(), data).expect("finite")
}

fn prox_step(a: &Matrix, b: &Matrix, y: &Matrix, step: f64, threshold: f64) -> Matrix {
    let g = gradient(a, b, y);
    let moved: Vec<f64> = y
        .data()
        .iter()
        .zip(g.data())
        .map(|(yi, gi)| yi - step * gi)
        .collect();
    let moved = Matrix::from_vec(y.rows(), y.cols(), moved).expect("finite");
    shrink(&moved, threshold)
}

/// Runs FISTA with adaptive restart from W = 0.
///
/// The step is 1/L with L = 2·λmax(AᵀA); momentum restarts whenever the
/// objective would increase, so the reported objective is non-increasing.
pub fn fista_l1(a: &Matrix, b: &Matrix, lambda: f64, max_iter: usize) -> Result<FistaResult> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "fista_l1: A has {} rows, B has {}",
            a.rows(),
            b.rows()
        )));
    }
    if lambda < 0.0 {
        return Err(Error::InvalidParam("fista_l1: lambda < 0".into()));
    }
    let p = a.cols();
    let q = b.cols();
    let lmax = spectral_norm_sq(a, POWER_ITERS);
    if lmax <= 0.0 {
        // A = 0: the smooth term is constant and the penalty pins W at zero
        let w = Matrix::zeros(p, q);
        let obj = objective(a, b, &w, lambda);
        return Ok(FistaResult {
            w,
            objective: obj,
            iterations: 0,
            converged: true,
        });
    }
    let l = 2.0 * lmax * (1.0 + 1e-9);
    let step = 1.0 / l;
    let threshold = lambda / l;

    let mut w = Matrix::zeros(p, q);
    let mut y = w.clone();
    let mut t = 1.0f64;
    let mut f = objective(a, b, &w, lambda);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        let mut w_new = prox_step(a, b, &y, step, threshold);
        let mut f_new = objective(a, b, &w_new, lambda);
        if f_new > f {
            // restart momentum: plain proximal step from the current iterate
            t = 1.0;
            w_new = prox_step(a, b, &w, step, threshold);
            f_new = objective(a, b, &w_new, lambda);
            if f_new > f {
                w_new = w.clone();
                f_new = f;
            }
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        let y_data: Vec<f64> = w_new
            .data()
            .iter()
            .zip(w.data())
            .map(|(n, o)| n + beta * (n - o))
            .collect();
        y = Matrix::from_vec(p, q, y_data).expect("finite");
        t = t_next;

        let delta = f - f_new;
        w = w_new;
        f = f_new;
        if delta <= REL_TOL * (1.0 + f.abs()) {
            converged = true;
            break;
        }
    }

    Ok(FistaResult {
        w,
        objective: f,
        iterations,
        converged,
    })
}
