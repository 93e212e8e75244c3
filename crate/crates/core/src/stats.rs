//! Friedman test with the Iman-Davenport correction and the Nemenyi critical
//! difference, over score matrices of N selection methods × k classifiers.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Nemenyi q at α = 0.05 (Studentized range / √2), indexed by k = 2..=20.
const Q_ALPHA_05: [f64; 19] = [
    1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219, 3.268, 3.313, 3.354,
    3.391, 3.426, 3.458, 3.489, 3.517, 3.544,
];

pub fn q_alpha_05(k: usize) -> Result<f64> {
    if !(2..=20).contains(&k) {
        return Err(Error::InvalidParam(format!(
            "q table covers k in 2..=20, got {k}"
        )));
    }
    Ok(Q_ALPHA_05[k - 2])
}

/// Per-row mid-ranks of the score matrix, rank 1 = highest score. Rows with
/// non-finite cells are dropped and listed in `dropped_rows`.
#[derive(Debug, Clone)]
pub struct RankMatrix {
    pub scores: Matrix,
    pub ranks: Matrix,
    pub avg_ranks: Vec<f64>,
    pub dropped_rows: Vec<usize>,
}

impl RankMatrix {
    /// Number of complete rows that entered the ranking.
    pub fn n(&self) -> usize {
        self.ranks.rows()
    }

    pub fn k(&self) -> usize {
        self.ranks.cols()
    }
}

/// Mid-ranks of one row, descending: the best score gets rank 1 and tied
/// scores share the mean of the ranks they span.
fn row_ranks(row: &[f64]) -> Vec<f64> {
    let k = row.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| row[b].partial_cmp(&row[a]).unwrap());
    let mut ranks = vec![0.0; k];
    let mut i = 0;
    while i < k {
        let mut j = i;
        while j + 1 < k && row[order[j + 1]] == row[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &col in &order[i..=j] {
            ranks[col] = mid;
        }
        i = j + 1;
    }
    ranks
}

pub fn rank_algorithms(scores: &Matrix) -> Result<RankMatrix> {
    if scores.rows() == 0 || scores.cols() == 0 {
        return Err(Error::InvalidParam("rank_algorithms: empty matrix".into()));
    }
    let k = scores.cols();
    let mut kept = Vec::new();
    let mut dropped_rows = Vec::new();
    for i in 0..scores.rows() {
        if scores.row(i).iter().all(|v| v.is_finite()) {
            kept.push(i);
        } else {
            dropped_rows.push(i);
        }
    }
    if kept.is_empty() {
        return Err(Error::Data(
            "rank_algorithms: every row has missing cells".into(),
        ));
    }
    let mut ranks = Matrix::zeros(kept.len(), k);
    for (out_i, &i) in kept.iter().enumerate() {
        let r = row_ranks(scores.row(i));
        for (j, v) in r.into_iter().enumerate() {
            ranks.set(out_i, j, v);
        }
    }
    let n = kept.len() as f64;
    let avg_ranks = (0..k)
        .map(|j| (0..kept.len()).map(|i| ranks.get(i, j)).sum::<f64>() / n)
        .collect();
    Ok(RankMatrix {
        scores: scores.clone(),
        ranks,
        avg_ranks,
        dropped_rows,
    })
}

/// χ²_F = (12N/(k(k+1)))·[Σ R_j² − k(k+1)²/4].
pub fn friedman_chi2(rm: &RankMatrix) -> Result<f64> {
    let n = rm.n();
    let k = rm.k();
    if n < 2 || k < 2 {
        return Err(Error::InvalidParam(format!(
            "friedman test needs N >= 2 and k >= 2, got N={n}, k={k}"
        )));
    }
    let kf = k as f64;
    let sum_sq: f64 = rm.avg_ranks.iter().map(|r| r * r).sum();
    Ok(12.0 * n as f64 / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0) * (kf + 1.0) / 4.0))
}

/// F_F = (N−1)·χ² / (N(k−1) − χ²), defined only below the pole.
pub fn iman_davenport(chi2: f64, n: usize, k: usize) -> Result<f64> {
    let denom = (n * (k - 1)) as f64 - chi2;
    if denom <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "iman-davenport pole: chi2 {chi2} >= N(k-1) = {}",
            n * (k - 1)
        )));
    }
    Ok((n as f64 - 1.0) * chi2 / denom)
}

/// CD = q_α·√(k(k+1)/(6N)).
pub fn nemenyi_cd(k: usize, n: usize, q_alpha: f64) -> Result<f64> {
    if k < 2 || n == 0 {
        return Err(Error::InvalidParam(format!(
            "nemenyi needs k >= 2 and N >= 1, got k={k}, N={n}"
        )));
    }
    if !q_alpha.is_finite() || q_alpha <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "nemenyi q_alpha must be positive, got {q_alpha}"
        )));
    }
    let kf = k as f64;
    Ok(q_alpha * (kf * (kf + 1.0) / (6.0 * n as f64)).sqrt())
}

/// Index pairs (i, j), i < j, whose average ranks differ by at least CD.
pub fn significant_pairs(rm: &RankMatrix, cd: f64) -> Vec<(usize, usize)> {
    let k = rm.k();
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            if (rm.avg_ranks[i] - rm.avg_ranks[j]).abs() >= cd {
                pairs.push((i, j));
            }
        }
    }
    pairs
}
