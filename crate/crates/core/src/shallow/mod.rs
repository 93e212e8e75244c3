//! Non-SVM baseline learners: kernel ridge regression, k-nearest neighbours,
//! and the random vector functional link network with its sparse-autoencoder
//! pretrained variant. The MLP lives in the `mlp` submodule.

mod mlp;

pub use mlp::{mlp_probabilities, predict_mlp, train_mlp, MlpModel};

use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernels::{gram, KernelSpec};
use crate::matrix::{sq_dist, Matrix};
use crate::numkit::{fista_l1, solve_spd, solve_spd_vec};
use crate::rng::{derive_seed, rng_from_seed};

const FISTA_MAX_ITER: usize = 1000;

#[derive(Debug, Clone)]
pub struct KrrModel {
    pub coefficients: Vec<f64>,
    pub train_points: Matrix,
    pub kernel: KernelSpec,
    pub lambda: f64,
    pub ridged: bool,
}

/// Kernel ridge regression on ±1 targets: coefficients solve (K + λI)c = y.
pub fn train_krr(ds: &Dataset, lambda: f64, k: KernelSpec) -> Result<KrrModel> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParam(format!(
            "krr lambda must be finite and nonnegative, got {lambda}"
        )));
    }
    let mut kmat = gram(&ds.x, &ds.x, k)?;
    for i in 0..kmat.rows() {
        kmat.set(i, i, kmat.get(i, i) + lambda);
    }
    let y: Vec<f64> = ds.y.iter().map(|&v| f64::from(v)).collect();
    let sol = solve_spd(&kmat, &y)?;
    Ok(KrrModel {
        coefficients: sol.x,
        train_points: ds.x.clone(),
        kernel: k,
        lambda,
        ridged: sol.ridged,
    })
}

pub fn predict_krr(model: &KrrModel, x: &Matrix) -> Result<(Vec<i8>, Vec<f64>)> {
    let km = gram(x, &model.train_points, model.kernel)?;
    let scores = km.matvec(&model.coefficients)?;
    let labels = scores.iter().map(|&s| if s >= 0.0 { 1 } else { -1 }).collect();
    Ok((labels, scores))
}

/// Majority vote among the k nearest training samples; ties in distance are
/// broken by training index, and odd k keeps the vote itself tie-free.
pub fn predict_knn(ds: &Dataset, x: &Matrix, k: usize) -> Result<Vec<i8>> {
    predict_knn_scored(ds, x, k).map(|(labels, _)| labels)
}

/// As `predict_knn`, with the +1 vote share as a score.
pub fn predict_knn_scored(ds: &Dataset, x: &Matrix, k: usize) -> Result<(Vec<i8>, Vec<f64>)> {
    if k == 0 || k > ds.n() {
        return Err(Error::InvalidParam(format!(
            "knn k={k} out of range for {} training samples",
            ds.n()
        )));
    }
    if k % 2 == 0 {
        return Err(Error::InvalidParam(format!("knn k must be odd, got {k}")));
    }
    if x.cols() != ds.d() {
        return Err(Error::DimensionMismatch(format!(
            "knn query has {} features, train has {}",
            x.cols(),
            ds.d()
        )));
    }
    let mut labels = Vec::with_capacity(x.rows());
    let mut scores = Vec::with_capacity(x.rows());
    for i in 0..x.rows() {
        let q = x.row(i);
        let mut dists: Vec<(f64, usize)> = (0..ds.n())
            .map(|t| (sq_dist(q, ds.x.row(t)), t))
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let pos = dists[..k].iter().filter(|&&(_, t)| ds.y[t] == 1).count();
        scores.push(pos as f64 / k as f64);
        labels.push(if 2 * pos > k { 1 } else { -1 });
    }
    Ok((labels, scores))
}

#[derive(Debug, Clone)]
pub struct RvflModel {
    /// d×N input-to-hidden weights, entries in [−S, +S].
    pub w_in: Matrix,
    pub b_in: Vec<f64>,
    pub s: f64,
    /// Output weights over the d+N concatenated features.
    pub beta: Vec<f64>,
    pub c_reg: f64,
    pub seed: u64,
    pub pretrained: bool,
    pub converged: bool,
}

fn random_map(d: usize, n_hidden: usize, s: f64, seed: u64) -> (Matrix, Vec<f64>) {
    let mut rng = rng_from_seed(derive_seed(seed, &[0]));
    let mut w = Matrix::zeros(d, n_hidden);
    for v in w.data_mut() {
        *v = rng.gen_range(-s..=s);
    }
    let b = (0..n_hidden).map(|_| rng.gen_range(-s..=s)).collect();
    (w, b)
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn hidden_activations(x: &Matrix, w_in: &Matrix, b_in: &[f64]) -> Result<Matrix> {
    let mut h = x.matmul(w_in)?;
    for i in 0..h.rows() {
        for (j, &b) in b_in.iter().enumerate() {
            h.set(i, j, sigmoid(h.get(i, j) + b));
        }
    }
    Ok(h)
}

/// Ridge solve for β over D = [X | H]; uses the dual identity
/// β = Dᵀ(DDᵀ + λI)⁻¹y when D is wide, which is exact for λ > 0.
fn fit_output_weights(x: &Matrix, h: &Matrix, y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let d = x.hstack(h)?;
    if d.cols() > d.rows() {
        let mut gram = d.matmul(&d.transpose())?;
        for i in 0..gram.rows() {
            gram.set(i, i, gram.get(i, i) + lambda);
        }
        let alpha = solve_spd_vec(&gram, y)?;
        d.t_matvec(&alpha)
    } else {
        let mut normal = d.gram_self();
        for i in 0..normal.rows() {
            normal.set(i, i, normal.get(i, i) + lambda);
        }
        let rhs = d.t_matvec(y)?;
        solve_spd_vec(&normal, &rhs)
    }
}

fn check_rvfl_params(n_hidden: usize, s: f64) -> Result<()> {
    if n_hidden == 0 {
        return Err(Error::InvalidParam("rvfl needs at least one hidden node".into()));
    }
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::InvalidParam(format!("rvfl scale must be positive, got {s}")));
    }
    Ok(())
}

/// RVFL with sigmoid hidden nodes; λ = 2^C_exp.
pub fn train_rvfl(
    ds: &Dataset,
    n_hidden: usize,
    c_exp: i32,
    s: f64,
    seed: u64,
) -> Result<RvflModel> {
    check_rvfl_params(n_hidden, s)?;
    let (w_in, b_in) = random_map(ds.d(), n_hidden, s, seed);
    let h = hidden_activations(&ds.x, &w_in, &b_in)?;
    finish_rvfl(ds, w_in, b_in, h, s, c_exp, seed, false, true)
}

/// Test hook: identical to `train_rvfl` but with the hidden block zeroed, so
/// β restricted to the raw features must match plain ridge regression.
#[doc(hidden)]
pub fn train_rvfl_zeroed_hidden(
    ds: &Dataset,
    n_hidden: usize,
    c_exp: i32,
    s: f64,
    seed: u64,
) -> Result<RvflModel> {
    check_rvfl_params(n_hidden, s)?;
    let (w_in, b_in) = random_map(ds.d(), n_hidden, s, seed);
    let h = Matrix::zeros(ds.n(), n_hidden);
    finish_rvfl(ds, w_in, b_in, h, s, c_exp, seed, false, true)
}

/// RVFL-AE: the random map is replaced by the sparse autoencoder solution
/// ω̄ = argmin ‖H̃ω̄ − X‖² + l1·‖ω̄‖₁, transposed to map inputs to hidden nodes.
pub fn train_rvfl_ae(
    ds: &Dataset,
    n_hidden: usize,
    c_exp: i32,
    l1: f64,
    seed: u64,
) -> Result<RvflModel> {
    let s = 1.0;
    check_rvfl_params(n_hidden, s)?;
    if !l1.is_finite() || l1 < 0.0 {
        return Err(Error::InvalidParam(format!(
            "rvfl-ae l1 must be finite and nonnegative, got {l1}"
        )));
    }
    let (w0, b_in) = random_map(ds.d(), n_hidden, s, seed);
    let h0 = hidden_activations(&ds.x, &w0, &b_in)?;
    let fista = fista_l1(&h0, &ds.x, l1, FISTA_MAX_ITER)?;
    let w_in = fista.w.transpose();
    let h = hidden_activations(&ds.x, &w_in, &b_in)?;
    finish_rvfl(ds, w_in, b_in, h, s, c_exp, seed, true, fista.converged)
}

#[allow(clippy::too_many_arguments)]
fn finish_rvfl(
    ds: &Dataset,
    w_in: Matrix,
    b_in: Vec<f64>,
    h: Matrix,
    s: f64,
    c_exp: i32,
    seed: u64,
    pretrained: bool,
    converged: bool,
) -> Result<RvflModel> {
    let lambda = (c_exp as f64).exp2();
    let y: Vec<f64> = ds.y.iter().map(|&v| f64::from(v)).collect();
    let beta = fit_output_weights(&ds.x, &h, &y, lambda)?;
    Ok(RvflModel {
        w_in,
        b_in,
        s,
        beta,
        c_reg: lambda,
        seed,
        pretrained,
        converged,
    })
}

pub fn predict_rvfl(model: &RvflModel, x: &Matrix) -> Result<(Vec<i8>, Vec<f64>)> {
    if x.cols() != model.w_in.rows() {
        return Err(Error::DimensionMismatch(format!(
            "rvfl expects {} features, got {}",
            model.w_in.rows(),
            x.cols()
        )));
    }
    let h = hidden_activations(x, &model.w_in, &model.b_in)?;
    let d = x.hstack(&h)?;
    let scores = d.matvec(&model.beta)?;
    let labels = scores.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect();
    Ok((labels, scores))
}
