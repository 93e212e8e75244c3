//! Two-layer perceptron: FC → BatchNorm → ReLU → FC → Softmax, trained
//! full-batch with Adam. 15% of the training split is held out to pick the
//! best epoch; inference always runs on frozen running statistics.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, rng_from_seed};

const BN_EPS: f64 = 1e-5;
const BN_MOMENTUM: f64 = 0.1;
const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
const HOLDOUT_FRACTION: f64 = 0.15;

#[derive(Debug, Clone)]
pub struct AdamState {
    pub t: usize,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamState {
    fn new(sizes: &[usize]) -> AdamState {
        AdamState {
            t: 0,
            m: sizes.iter().map(|&s| vec![0.0; s]).collect(),
            v: sizes.iter().map(|&s| vec![0.0; s]).collect(),
        }
    }

    fn advance(&mut self) {
        self.t += 1;
    }

    fn step(&mut self, idx: usize, param: &mut [f64], grad: &[f64], lr: f64) {
        let t = self.t as i32;
        let bc1 = 1.0 - ADAM_BETA1.powi(t);
        let bc2 = 1.0 - ADAM_BETA2.powi(t);
        for ((p, g), (m, v)) in param
            .iter_mut()
            .zip(grad)
            .zip(self.m[idx].iter_mut().zip(self.v[idx].iter_mut()))
        {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}

#[derive(Debug, Clone)]
pub struct MlpModel {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
    pub w2: Matrix,
    pub b2: Vec<f64>,
    pub adam: AdamState,
    /// Cross-entropy on the 85% portion, one entry per epoch.
    pub train_trace: Vec<f64>,
    pub best_epoch: usize,
}

#[derive(Clone)]
struct Snapshot {
    w1: Matrix,
    b1: Vec<f64>,
    gamma: Vec<f64>,
    beta: Vec<f64>,
    running_mean: Vec<f64>,
    running_var: Vec<f64>,
    w2: Matrix,
    b2: Vec<f64>,
}

struct ForwardCache {
    xhat: Matrix,
    bn: Matrix,
    act: Matrix,
    probs: Matrix,
    mean: Vec<f64>,
    var: Vec<f64>,
}

fn softmax_rows(z: &mut Matrix) {
    for i in 0..z.rows() {
        let row = z.row_mut(i);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
}

fn cross_entropy(probs: &Matrix, targets: &[usize]) -> f64 {
    let mut loss = 0.0;
    for (i, &t) in targets.iter().enumerate() {
        let p = probs.get(i, t);
        if !p.is_finite() {
            return f64::NAN;
        }
        loss -= p.max(1e-300).ln();
    }
    loss / targets.len() as f64
}

impl MlpModel {
    fn hidden(&self) -> usize {
        self.b1.len()
    }

    fn forward_train(&self, x: &Matrix) -> Result<ForwardCache> {
        let n = x.rows();
        let h = self.hidden();
        let mut z1 = x.matmul(&self.w1)?;
        for i in 0..n {
            for j in 0..h {
                z1.set(i, j, z1.get(i, j) + self.b1[j]);
            }
        }
        let mut mean = vec![0.0f64; h];
        let mut var = vec![0.0f64; h];
        for j in 0..h {
            let mut s = 0.0;
            for i in 0..n {
                s += z1.get(i, j);
            }
            mean[j] = s / n as f64;
            let mut v = 0.0;
            for i in 0..n {
                let d = z1.get(i, j) - mean[j];
                v += d * d;
            }
            var[j] = v / n as f64;
        }
        let mut xhat = Matrix::zeros(n, h);
        let mut bn = Matrix::zeros(n, h);
        let mut act = Matrix::zeros(n, h);
        for j in 0..h {
            let inv = 1.0 / (var[j] + BN_EPS).sqrt();
            for i in 0..n {
                let xh = (z1.get(i, j) - mean[j]) * inv;
                xhat.set(i, j, xh);
                let b = self.gamma[j] * xh + self.beta[j];
                bn.set(i, j, b);
                act.set(i, j, b.max(0.0));
            }
        }
        let mut z2 = act.matmul(&self.w2)?;
        for i in 0..n {
            for j in 0..2 {
                z2.set(i, j, z2.get(i, j) + self.b2[j]);
            }
        }
        softmax_rows(&mut z2);
        Ok(ForwardCache {
            xhat,
            bn,
            act,
            probs: z2,
            mean,
            var,
        })
    }

    /// Inference-mode class probabilities using the frozen running statistics.
    fn infer(&self, x: &Matrix) -> Result<Matrix> {
        let n = x.rows();
        let h = self.hidden();
        let mut z1 = x.matmul(&self.w1)?;
        for i in 0..n {
            for j in 0..h {
                let inv = 1.0 / (self.running_var[j] + BN_EPS).sqrt();
                let xh = (z1.get(i, j) + self.b1[j] - self.running_mean[j]) * inv;
                z1.set(i, j, (self.gamma[j] * xh + self.beta[j]).max(0.0));
            }
        }
        let mut z2 = z1.matmul(&self.w2)?;
        for i in 0..n {
            for j in 0..2 {
                z2.set(i, j, z2.get(i, j) + self.b2[j]);
            }
        }
        softmax_rows(&mut z2);
        Ok(z2)
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            w1: self.w1.clone(),
            b1: self.b1.clone(),
            gamma: self.gamma.clone(),
            beta: self.beta.clone(),
            running_mean: self.running_mean.clone(),
            running_var: self.running_var.clone(),
            w2: self.w2.clone(),
            b2: self.b2.clone(),
        }
    }

    fn restore(&mut self, snap: Snapshot) {
        self.w1 = snap.w1;
        self.b1 = snap.b1;
        self.gamma = snap.gamma;
        self.beta = snap.beta;
        self.running_mean = snap.running_mean;
        self.running_var = snap.running_var;
        self.w2 = snap.w2;
        self.b2 = snap.b2;
    }
}

/// Stratified 15% holdout of the given training split; the remainder is the
/// 85% optimization set. The holdout may be empty on very small inputs.
fn holdout_split(ds: &Dataset, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = rng_from_seed(derive_seed(seed, &[1]));
    let mut train = Vec::new();
    let mut held = Vec::new();
    for label in [1i8, -1] {
        let mut idx = ds.class_indices(label);
        idx.shuffle(&mut rng);
        let take = (HOLDOUT_FRACTION * idx.len() as f64).floor() as usize;
        held.extend_from_slice(&idx[..take]);
        train.extend_from_slice(&idx[take..]);
    }
    train.sort_unstable();
    held.sort_unstable();
    (train, held)
}

pub fn train_mlp(
    ds: &Dataset,
    hidden: usize,
    epochs: usize,
    lr: f64,
    seed: u64,
) -> Result<MlpModel> {
    if hidden == 0 {
        return Err(Error::InvalidParam("mlp needs at least one hidden unit".into()));
    }
    if epochs == 0 {
        return Err(Error::InvalidParam("mlp needs at least one epoch".into()));
    }
    if !lr.is_finite() || lr <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "mlp learning rate must be positive, got {lr}"
        )));
    }
    let d = ds.d();
    let (train_idx, held_idx) = holdout_split(ds, seed);
    let x_train = ds.x.select_rows(&train_idx)?;
    let t_train: Vec<usize> = train_idx.iter().map(|&i| usize::from(ds.y[i] == 1)).collect();
    let (x_held, t_held) = if held_idx.is_empty() {
        (None, Vec::new())
    } else {
        let xs = ds.x.select_rows(&held_idx)?;
        let ts = held_idx.iter().map(|&i| usize::from(ds.y[i] == 1)).collect();
        (Some(xs), ts)
    };

    let mut rng = rng_from_seed(derive_seed(seed, &[0]));
    let limit1 = (6.0 / (d + hidden) as f64).sqrt();
    let limit2 = (6.0 / (hidden + 2) as f64).sqrt();
    let mut w1 = Matrix::zeros(d, hidden);
    for v in w1.data_mut() {
        *v = rng.gen_range(-limit1..limit1);
    }
    let mut w2 = Matrix::zeros(hidden, 2);
    for v in w2.data_mut() {
        *v = rng.gen_range(-limit2..limit2);
    }
    let sizes = [d * hidden, hidden, hidden, hidden, hidden * 2, 2];
    let mut model = MlpModel {
        w1,
        b1: vec![0.0; hidden],
        gamma: vec![1.0; hidden],
        beta: vec![0.0; hidden],
        running_mean: vec![0.0; hidden],
        running_var: vec![1.0; hidden],
        w2,
        b2: vec![0.0; 2],
        adam: AdamState::new(&sizes),
        train_trace: Vec::with_capacity(epochs),
        best_epoch: 0,
    };

    let mut best: Option<(f64, Snapshot)> = None;
    for epoch in 0..epochs {
        let cache = model.forward_train(&x_train)?;
        let loss = cross_entropy(&cache.probs, &t_train);
        if !loss.is_finite() {
            return Err(Error::NonFinite(format!(
                "mlp training loss became non-finite at epoch {epoch}"
            )));
        }
        model.train_trace.push(loss);
        for j in 0..hidden {
            model.running_mean[j] =
                (1.0 - BN_MOMENTUM) * model.running_mean[j] + BN_MOMENTUM * cache.mean[j];
            model.running_var[j] =
                (1.0 - BN_MOMENTUM) * model.running_var[j] + BN_MOMENTUM * cache.var[j];
        }
        backward_and_step(&mut model, &x_train, &t_train, &cache, lr);

        let monitor = match &x_held {
            Some(xh) => cross_entropy(&model.infer(xh)?, &t_held),
            None => cross_entropy(&model.infer(&x_train)?, &t_train),
        };
        if monitor.is_finite() && best.as_ref().map_or(true, |(b, _)| monitor < *b) {
            best = Some((monitor, model.snapshot()));
            model.best_epoch = epoch;
        }
    }
    if let Some((_, snap)) = best {
        model.restore(snap);
    }
    Ok(model)
}

fn backward_and_step(
    model: &mut MlpModel,
    x: &Matrix,
    targets: &[usize],
    cache: &ForwardCache,
    lr: f64,
) {
    let n = x.rows();
    let h = model.hidden();
    let nf = n as f64;

    let mut dz2 = cache.probs.clone();
    for (i, &t) in targets.iter().enumerate() {
        dz2.set(i, t, dz2.get(i, t) - 1.0);
    }
    dz2.scale(1.0 / nf);

    let dw2 = cache.act.t_matmul(&dz2).expect("conformable");
    let mut db2 = [0.0f64; 2];
    for i in 0..n {
        db2[0] += dz2.get(i, 0);
        db2[1] += dz2.get(i, 1);
    }
    let da = dz2.matmul(&model.w2.transpose()).expect("conformable");

    let mut dgamma = vec![0.0f64; h];
    let mut dbeta = vec![0.0f64; h];
    let mut dxhat = Matrix::zeros(n, h);
    for j in 0..h {
        for i in 0..n {
            let grad = if cache.bn.get(i, j) > 0.0 {
                da.get(i, j)
            } else {
                0.0
            };
            dgamma[j] += grad * cache.xhat.get(i, j);
            dbeta[j] += grad;
            dxhat.set(i, j, grad * model.gamma[j]);
        }
    }

    let mut dz1 = Matrix::zeros(n, h);
    for j in 0..h {
        let inv = 1.0 / (cache.var[j] + BN_EPS).sqrt();
        let mut sum_dx = 0.0;
        let mut sum_dx_xhat = 0.0;
        for i in 0..n {
            sum_dx += dxhat.get(i, j);
            sum_dx_xhat += dxhat.get(i, j) * cache.xhat.get(i, j);
        }
        for i in 0..n {
            let term = nf * dxhat.get(i, j) - sum_dx - cache.xhat.get(i, j) * sum_dx_xhat;
            dz1.set(i, j, inv / nf * term);
        }
    }

    let dw1 = x.t_matmul(&dz1).expect("conformable");
    let mut db1 = vec![0.0f64; h];
    for j in 0..h {
        for i in 0..n {
            db1[j] += dz1.get(i, j);
        }
    }

    model.adam.advance();
    let adam = &mut model.adam;
    adam.step(0, model.w1.data_mut(), dw1.data(), lr);
    adam.step(1, &mut model.b1, &db1, lr);
    adam.step(2, &mut model.gamma, &dgamma, lr);
    adam.step(3, &mut model.beta, &dbeta, lr);
    adam.step(4, model.w2.data_mut(), dw2.data(), lr);
    adam.step(5, &mut model.b2, &db2, lr);
}

/// Softmax class probabilities, columns ordered (−1, +1).
pub fn mlp_probabilities(model: &MlpModel, x: &Matrix) -> Result<Matrix> {
    if x.cols() != model.w1.rows() {
        return Err(Error::DimensionMismatch(format!(
            "mlp expects {} features, got {}",
            model.w1.rows(),
            x.cols()
        )));
    }
    model.infer(x)
}

pub fn predict_mlp(model: &MlpModel, x: &Matrix) -> Result<(Vec<i8>, Vec<f64>)> {
    let probs = mlp_probabilities(model, x)?;
    let mut labels = Vec::with_capacity(x.rows());
    let mut scores = Vec::with_capacity(x.rows());
    for i in 0..x.rows() {
        let p_pos = probs.get(i, 1);
        scores.push(p_pos);
        labels.push(if p_pos >= 0.5 { 1 } else { -1 });
    }
    Ok((labels, scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::blobs;

    #[test]
    fn separable_blobs_reach_high_accuracy() {
        let ds = blobs(30, 4, 6.0, 19);
        let model = train_mlp(&ds, 8, 200, 0.01, 7).unwrap();
        let (labels, _) = predict_mlp(&model, &ds.x).unwrap();
        let correct = labels.iter().zip(&ds.y).filter(|(p, t)| *p == *t).count();
        assert!(
            correct as f64 >= 0.99 * ds.n() as f64,
            "{correct}/{}",
            ds.n()
        );
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let ds = blobs(10, 3, 2.0, 3);
        let model = train_mlp(&ds, 4, 30, 0.01, 1).unwrap();
        let probe = blobs(5, 3, 2.0, 44);
        let probs = mlp_probabilities(&model, &probe.x).unwrap();
        for i in 0..probs.rows() {
            let s = probs.get(i, 0) + probs.get(i, 1);
            assert!((s - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn same_seed_same_weights() {
        let ds = blobs(12, 3, 3.0, 5);
        let a = train_mlp(&ds, 6, 40, 0.005, 99).unwrap();
        let b = train_mlp(&ds, 6, 40, 0.005, 99).unwrap();
        assert_eq!(a.w1.data(), b.w1.data());
        assert_eq!(a.b1, b.b1);
        assert_eq!(a.gamma, b.gamma);
        assert_eq!(a.beta, b.beta);
        assert_eq!(a.w2.data(), b.w2.data());
        assert_eq!(a.b2, b.b2);
        assert_eq!(a.running_mean, b.running_mean);
        assert_eq!(a.running_var, b.running_var);
    }

    #[test]
    fn loss_trace_decreases_early() {
        let ds = blobs(25, 4, 5.0, 2);
        let model = train_mlp(&ds, 8, 20, 0.01, 3).unwrap();
        assert!(model.train_trace.len() == 20);
        assert!(
            model.train_trace[9] < model.train_trace[0],
            "trace {:?}",
            &model.train_trace[..10]
        );
    }

    #[test]
    fn inference_is_batch_size_invariant() {
        let ds = blobs(15, 3, 4.0, 8);
        let model = train_mlp(&ds, 5, 50, 0.01, 21).unwrap();
        let probe = blobs(6, 3, 4.0, 80);
        let batch = mlp_probabilities(&model, &probe.x).unwrap();
        for i in 0..probe.n() {
            let single = probe.x.select_rows(&[i]).unwrap();
            let p = mlp_probabilities(&model, &single).unwrap();
            assert_eq!(p.get(0, 0), batch.get(i, 0));
            assert_eq!(p.get(0, 1), batch.get(i, 1));
        }
    }

    #[test]
    fn runaway_learning_rate_reports_non_finite() {
        let ds = blobs(10, 3, 2.0, 4);
        let err = train_mlp(&ds, 4, 40, 1e300, 5);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_degenerate_settings() {
        let ds = blobs(6, 2, 2.0, 1);
        assert!(train_mlp(&ds, 0, 10, 0.01, 1).is_err());
        assert!(train_mlp(&ds, 4, 0, 0.01, 1).is_err());
        assert!(train_mlp(&ds, 4, 10, 0.0, 1).is_err());
    }
}
