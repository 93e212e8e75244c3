//! Node-level split learners: axis thresholds, MPSVM planes under the three
//! regularizations, LDA/PCA directions, and the heterogeneous candidate pool.

use crate::error::Result;
use crate::matrix::{norm2, Matrix};
use crate::numkit::{
    min_gen_eigenpair, solve_box_qp, solve_spd_vec, sym_eigen, BoxQp, CholeskyFactor,
    RIDGE_FALLBACK,
};

const MP_TIKHONOV: f64 = 0.01;
const NULL_EIGEN_TOL: f64 = 1e-10;
const CONDITION_LIMIT: f64 = 1e12;
const LDA_RIDGE: f64 = 1e-6;
const RIDGE_SPLIT_LAMBDA: f64 = 1e-2;
const NODE_QP_TOL: f64 = 1e-3;
const NODE_QP_ITERS: usize = 100;

#[derive(Debug, Clone)]
pub enum SplitRule {
    Axis {
        feature: usize,
        threshold: f64,
    },
    Oblique {
        features: Vec<usize>,
        weights: Vec<f64>,
        bias: f64,
    },
}

impl SplitRule {
    /// Signed split value; ≤ 0 routes left.
    pub fn value(&self, row: &[f64]) -> f64 {
        match self {
            SplitRule::Axis { feature, threshold } => row[*feature] - threshold,
            SplitRule::Oblique {
                features,
                weights,
                bias,
            } => {
                let mut s = *bias;
                for (&f, &w) in features.iter().zip(weights) {
                    s += w * row[f];
                }
                s
            }
        }
    }
}

pub(crate) fn gini(pos: f64, neg: f64) -> f64 {
    let n = pos + neg;
    if n <= 0.0 {
        return 0.0;
    }
    let p = pos / n;
    let q = neg / n;
    1.0 - p * p - q * q
}

/// Gini gain of a rule over the node samples; None when a child is empty.
pub(crate) fn rule_gain(rule: &SplitRule, x: &Matrix, rows: &[usize], y: &[i8]) -> Option<f64> {
    let mut counts = [[0.0f64; 2]; 2];
    for &r in rows {
        let side = usize::from(rule.value(x.row(r)) > 0.0);
        let class = usize::from(y[r] != 1);
        counts[side][class] += 1.0;
    }
    let left = counts[0][0] + counts[0][1];
    let right = counts[1][0] + counts[1][1];
    if left == 0.0 || right == 0.0 {
        return None;
    }
    let n = left + right;
    let parent = gini(counts[0][0] + counts[1][0], counts[0][1] + counts[1][1]);
    let child = (left / n) * gini(counts[0][0], counts[0][1])
        + (right / n) * gini(counts[1][0], counts[1][1]);
    Some(parent - child)
}

/// Best axis-parallel threshold over the candidate features.
pub(crate) fn best_axis(
    x: &Matrix,
    rows: &[usize],
    y: &[i8],
    features: &[usize],
) -> Option<(SplitRule, f64)> {
    let total_pos = rows.iter().filter(|&&r| y[r] == 1).count() as f64;
    let total = rows.len() as f64;
    let total_neg = total - total_pos;
    let parent = gini(total_pos, total_neg);

    let mut best: Option<(SplitRule, f64)> = None;
    for &f in features {
        let mut vals: Vec<(f64, bool)> = rows
            .iter()
            .map(|&r| (x.get(r, f), y[r] == 1))
            .collect();
        vals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut left_pos = 0.0;
        let mut left_n = 0.0;
        for i in 0..vals.len() - 1 {
            left_n += 1.0;
            if vals[i].1 {
                left_pos += 1.0;
            }
            if vals[i].0 == vals[i + 1].0 {
                continue;
            }
            let right_n = total - left_n;
            let right_pos = total_pos - left_pos;
            let child = (left_n / total) * gini(left_pos, left_n - left_pos)
                + (right_n / total) * gini(right_pos, right_n - right_pos);
            let gain = parent - child;
            let better = match &best {
                Some((_, g)) => gain > *g,
                None => true,
            };
            if better {
                let threshold = 0.5 * (vals[i].0 + vals[i + 1].0);
                best = Some((SplitRule::Axis { feature: f, threshold }, gain));
            }
        }
    }
    best
}

/// Node samples of one class restricted to the candidate features.
fn class_submatrix(x: &Matrix, rows: &[usize], y: &[i8], features: &[usize], label: i8) -> Matrix {
    let members: Vec<usize> = rows.iter().copied().filter(|&r| y[r] == label).collect();
    let mut out = Matrix::zeros(members.len(), features.len());
    for (i, &r) in members.iter().enumerate() {
        for (j, &f) in features.iter().enumerate() {
            out.set(i, j, x.get(r, f));
        }
    }
    out
}

fn oblique_from(features: &[usize], v: &[f64]) -> Option<SplitRule> {
    let (w, b) = v.split_at(v.len() - 1);
    if norm2(w) < 1e-12 {
        return None;
    }
    Some(SplitRule::Oblique {
        features: features.to_vec(),
        weights: w.to_vec(),
        bias: b[0],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum MpReg {
    Tikhonov,
    AxisFallback,
    NullSpace,
}

/// MPSVM clustering plane proximal to the +1 samples and far from the −1
/// samples, under the requested regularization. None means the caller should
/// fall back (axis split for P, nothing to do for degenerate T/N).
pub(crate) fn mpsvm_split(
    x: &Matrix,
    rows: &[usize],
    y: &[i8],
    features: &[usize],
    reg: MpReg,
) -> Option<SplitRule> {
    let a = class_submatrix(x, rows, y, features, 1);
    let b = class_submatrix(x, rows, y, features, -1);
    if a.rows() == 0 || b.rows() == 0 {
        return None;
    }
    let ga = a.augment_ones().gram_self();
    let gb = b.augment_ones().gram_self();
    let v = match reg {
        MpReg::Tikhonov => min_gen_eigenpair(&ga, &gb, MP_TIKHONOV).ok()?.1,
        MpReg::AxisFallback => {
            let (evals, _) = sym_eigen(&gb).ok()?;
            let min = evals.first().copied()?;
            let max = evals.last().copied()?;
            if min <= 0.0 || max / min > CONDITION_LIMIT {
                return None;
            }
            min_gen_eigenpair(&ga, &gb, 0.0).ok()?.1
        }
        MpReg::NullSpace => {
            let (evals, evecs) = sym_eigen(&ga).ok()?;
            let null_cols: Vec<usize> = evals
                .iter()
                .enumerate()
                .filter(|(_, &l)| l < NULL_EIGEN_TOL)
                .map(|(i, _)| i)
                .collect();
            if null_cols.is_empty() {
                min_gen_eigenpair(&ga, &gb, MP_TIKHONOV).ok()?.1
            } else {
                null_space_direction(&gb, &evecs, &null_cols)?
            }
        }
    };
    oblique_from(features, &v)
}

/// Within span(N), maximize vᵀG_B v / vᵀv; N's columns are orthonormal.
fn null_space_direction(gb: &Matrix, evecs: &Matrix, null_cols: &[usize]) -> Option<Vec<f64>> {
    let n = evecs.rows();
    let k = null_cols.len();
    let mut basis = Matrix::zeros(n, k);
    for (j, &c) in null_cols.iter().enumerate() {
        for i in 0..n {
            basis.set(i, j, evecs.get(i, c));
        }
    }
    let m = basis.t_matmul(&gb.matmul(&basis).ok()?).ok()?;
    let (_, mvecs) = sym_eigen(&m).ok()?;
    // last column carries the largest eigenvalue
    let u: Vec<f64> = (0..k).map(|i| mvecs.get(i, k - 1)).collect();
    let v = basis.matvec(&u).ok()?;
    let nrm = norm2(&v);
    if nrm < 1e-12 {
        return None;
    }
    Some(v.iter().map(|x| x / nrm).collect())
}

/// Fisher discriminant direction with a small ridge on the pooled scatter.
pub(crate) fn lda_split(
    x: &Matrix,
    rows: &[usize],
    y: &[i8],
    features: &[usize],
) -> Option<SplitRule> {
    let a = class_submatrix(x, rows, y, features, 1);
    let b = class_submatrix(x, rows, y, features, -1);
    if a.rows() == 0 || b.rows() == 0 {
        return None;
    }
    let k = features.len();
    let mean = |m: &Matrix| -> Vec<f64> {
        (0..k)
            .map(|j| (0..m.rows()).map(|i| m.get(i, j)).sum::<f64>() / m.rows() as f64)
            .collect()
    };
    let mu_a = mean(&a);
    let mu_b = mean(&b);
    let mut scatter = Matrix::zeros(k, k);
    for (m, mu) in [(&a, &mu_a), (&b, &mu_b)] {
        for i in 0..m.rows() {
            for p in 0..k {
                let dp = m.get(i, p) - mu[p];
                for q in 0..k {
                    let dq = m.get(i, q) - mu[q];
                    scatter.set(p, q, scatter.get(p, q) + dp * dq);
                }
            }
        }
    }
    scatter.add_ridge(LDA_RIDGE);
    let diff: Vec<f64> = mu_a.iter().zip(&mu_b).map(|(p, q)| p - q).collect();
    let w = solve_spd_vec(&scatter, &diff).ok()?;
    let bias = -0.5 * w.iter().zip(mu_a.iter().zip(&mu_b)).map(|(wi, (p, q))| wi * (p + q)).sum::<f64>();
    let mut v = w;
    v.push(bias);
    oblique_from(features, &v)
}

/// First principal component of the node samples, centered at the node mean.
pub(crate) fn pca_split(x: &Matrix, rows: &[usize], features: &[usize]) -> Option<SplitRule> {
    let k = features.len();
    let n = rows.len() as f64;
    let mut mu = vec![0.0f64; k];
    for &r in rows {
        for (j, &f) in features.iter().enumerate() {
            mu[j] += x.get(r, f);
        }
    }
    for m in mu.iter_mut() {
        *m /= n;
    }
    let mut cov = Matrix::zeros(k, k);
    for &r in rows {
        for p in 0..k {
            let dp = x.get(r, features[p]) - mu[p];
            for q in 0..k {
                let dq = x.get(r, features[q]) - mu[q];
                cov.set(p, q, cov.get(p, q) + dp * dq / n);
            }
        }
    }
    let (_, vecs) = sym_eigen(&cov).ok()?;
    let pc: Vec<f64> = (0..k).map(|i| vecs.get(i, k - 1)).collect();
    if norm2(&pc) < 1e-12 {
        return None;
    }
    let bias = -pc.iter().zip(&mu).map(|(p, m)| p * m).sum::<f64>();
    let mut v = pc;
    v.push(bias);
    oblique_from(features, &v)
}

/// Node samples restricted to the candidate features, with ±1 targets.
fn node_xy(x: &Matrix, rows: &[usize], y: &[i8], features: &[usize]) -> (Matrix, Vec<f64>) {
    let mut z = Matrix::zeros(rows.len(), features.len());
    let mut t = Vec::with_capacity(rows.len());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &f) in features.iter().enumerate() {
            z.set(i, j, x.get(r, f));
        }
        t.push(f64::from(y[r]));
    }
    (z, t)
}

/// Budget-capped linear SVM on the node samples (bias absorbed).
fn svm_split(x: &Matrix, rows: &[usize], y: &[i8], features: &[usize]) -> Option<SplitRule> {
    let (z, t) = node_xy(x, rows, y, features);
    let m = rows.len();
    let mut q = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let dot: f64 = z.row(i).iter().zip(z.row(j)).map(|(a, b)| a * b).sum();
            q.set(i, j, t[i] * t[j] * (dot + 1.0));
        }
    }
    let qp = BoxQp::zero_to_c(q, vec![1.0; m], 1.0).ok()?;
    let sol = solve_box_qp(&qp, NODE_QP_TOL, NODE_QP_ITERS).ok()?;
    let mut v = vec![0.0f64; features.len() + 1];
    for i in 0..m {
        let coef = sol.x[i] * t[i];
        for j in 0..features.len() {
            v[j] += coef * z.get(i, j);
        }
        v[features.len()] += coef;
    }
    oblique_from(features, &v)
}

/// LSSVM dual with γ = 1 and the bias absorbed into the kernel.
fn lssvm_split(x: &Matrix, rows: &[usize], y: &[i8], features: &[usize]) -> Option<SplitRule> {
    let (z, t) = node_xy(x, rows, y, features);
    let m = rows.len();
    let mut k = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let dot: f64 = z.row(i).iter().zip(z.row(j)).map(|(a, b)| a * b).sum();
            k.set(i, j, dot + 1.0);
        }
    }
    k.add_ridge(1.0);
    let alpha = solve_spd_vec(&k, &t).ok()?;
    let mut v = vec![0.0f64; features.len() + 1];
    for i in 0..m {
        for j in 0..features.len() {
            v[j] += alpha[i] * z.get(i, j);
        }
        v[features.len()] += alpha[i];
    }
    oblique_from(features, &v)
}

/// Ridge regression on ±1 targets.
fn ridge_split(x: &Matrix, rows: &[usize], y: &[i8], features: &[usize]) -> Option<SplitRule> {
    let (z, t) = node_xy(x, rows, y, features);
    let za = z.augment_ones();
    let mut normal = za.gram_self();
    normal.add_ridge(RIDGE_SPLIT_LAMBDA);
    let rhs = za.t_matvec(&t).ok()?;
    let v = solve_spd_vec(&normal, &rhs).ok()?;
    oblique_from(features, &v)
}

/// Logistic regression via a fixed budget of 10 IRLS steps.
fn logistic_split(x: &Matrix, rows: &[usize], y: &[i8], features: &[usize]) -> Option<SplitRule> {
    let (z, t) = node_xy(x, rows, y, features);
    let za = z.augment_ones();
    let k = za.cols();
    let targets: Vec<f64> = t.iter().map(|&v| (v + 1.0) / 2.0).collect();
    let mut w = vec![0.0f64; k];
    for _ in 0..10 {
        let eta = za.matvec(&w).ok()?;
        let p: Vec<f64> = eta.iter().map(|e| 1.0 / (1.0 + (-e).exp())).collect();
        let mut hess = Matrix::zeros(k, k);
        let mut grad = vec![0.0f64; k];
        for i in 0..za.rows() {
            let weight = (p[i] * (1.0 - p[i])).max(1e-12);
            let resid = targets[i] - p[i];
            let row = za.row(i);
            for a in 0..k {
                grad[a] += row[a] * resid;
                for b in 0..k {
                    hess.set(a, b, hess.get(a, b) + weight * row[a] * row[b]);
                }
            }
        }
        hess.add_ridge(RIDGE_FALLBACK.max(1e-6));
        let delta = solve_spd_vec(&hess, &grad).ok()?;
        for (wi, di) in w.iter_mut().zip(&delta) {
            *wi += di;
        }
        if delta.iter().all(|d| d.abs() < 1e-10) {
            break;
        }
    }
    oblique_from(features, &w)
}

/// Gain bookkeeping for the heterogeneous node: what was accepted vs the best
/// axis split considered alongside the learners.
#[derive(Debug, Clone, Copy)]
pub struct HetTrace {
    pub accepted_gain: f64,
    pub axis_gain: f64,
}

/// Best of the six linear learners and the axis pool, by Gini gain.
pub(crate) fn het_split(
    x: &Matrix,
    rows: &[usize],
    y: &[i8],
    features: &[usize],
) -> Option<(SplitRule, f64, HetTrace)> {
    let candidates = [
        svm_split(x, rows, y, features),
        mpsvm_split(x, rows, y, features, MpReg::Tikhonov),
        lda_split(x, rows, y, features),
        lssvm_split(x, rows, y, features),
        ridge_split(x, rows, y, features),
        logistic_split(x, rows, y, features),
    ];
    let axis = best_axis(x, rows, y, features);
    let axis_gain = axis.as_ref().map(|(_, g)| *g).unwrap_or(0.0);

    let mut best: Option<(SplitRule, f64)> = axis;
    for rule in candidates.into_iter().flatten() {
        if let Some(gain) = rule_gain(&rule, x, rows, y) {
            let better = match &best {
                Some((_, g)) => gain > *g,
                None => true,
            };
            if better {
                best = Some((rule, gain));
            }
        }
    }
    best.map(|(rule, gain)| {
        (
            rule,
            gain,
            HetTrace {
                accepted_gain: gain,
                axis_gain,
            },
        )
    })
}

/// Hyperclass split for multi-class nodes: seed with the most
/// Bhattacharyya-distant pair of class clouds, then attach every other cloud
/// to the nearer seed. Binary input maps to the identity partition, which is
/// why the heterogeneous forest never calls it on two-class data.
pub fn hyperclass_partition(groups: &[Matrix]) -> Result<(Vec<usize>, Vec<usize>)> {
    let k = groups.len();
    if k <= 2 {
        return Ok(((0..k.min(1)).collect(), (1..k).collect()));
    }
    let mut dist = vec![0.0f64; k * k];
    let mut seed_pair = (0, 1);
    let mut seed_dist = f64::NEG_INFINITY;
    for i in 0..k {
        for j in (i + 1)..k {
            let d = bhattacharyya_distance(&groups[i], &groups[j])?;
            dist[i * k + j] = d;
            dist[j * k + i] = d;
            if d > seed_dist {
                seed_dist = d;
                seed_pair = (i, j);
            }
        }
    }
    let mut first = vec![seed_pair.0];
    let mut second = vec![seed_pair.1];
    for g in 0..k {
        if g == seed_pair.0 || g == seed_pair.1 {
            continue;
        }
        if dist[g * k + seed_pair.0] <= dist[g * k + seed_pair.1] {
            first.push(g);
        } else {
            second.push(g);
        }
    }
    first.sort_unstable();
    second.sort_unstable();
    Ok((first, second))
}

/// Bhattacharyya distance between Gaussian fits of two sample clouds.
fn bhattacharyya_distance(a: &Matrix, b: &Matrix) -> Result<f64> {
    let d = a.cols();
    let stats = |m: &Matrix| -> (Vec<f64>, Matrix) {
        let n = m.rows() as f64;
        let mu: Vec<f64> = (0..d)
            .map(|j| (0..m.rows()).map(|i| m.get(i, j)).sum::<f64>() / n)
            .collect();
        let mut cov = Matrix::zeros(d, d);
        for i in 0..m.rows() {
            for p in 0..d {
                let dp = m.get(i, p) - mu[p];
                for q in 0..d {
                    let dq = m.get(i, q) - mu[q];
                    cov.set(p, q, cov.get(p, q) + dp * dq / n);
                }
            }
        }
        cov.add_ridge(1e-6);
        (mu, cov)
    };
    let (mu_a, cov_a) = stats(a);
    let (mu_b, cov_b) = stats(b);
    let mut pooled = cov_a.clone();
    pooled.add_scaled(&cov_b, 1.0)?;
    pooled.scale(0.5);

    let log_det = |m: &Matrix| -> Result<f64> {
        let chol = CholeskyFactor::new(m)?;
        let l = chol.factor();
        Ok((0..d).map(|i| l.get(i, i).ln()).sum::<f64>() * 2.0)
    };
    let diff: Vec<f64> = mu_a.iter().zip(&mu_b).map(|(p, q)| p - q).collect();
    let sol = solve_spd_vec(&pooled, &diff)?;
    let maha: f64 = diff.iter().zip(&sol).map(|(x, s)| x * s).sum();
    let ld = log_det(&pooled)? - 0.5 * (log_det(&cov_a)? + log_det(&cov_b)?);
    Ok(0.125 * maha + 0.5 * ld)
}
