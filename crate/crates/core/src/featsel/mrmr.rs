//! Minimum-redundancy maximum-relevance ranking over equal-frequency binned
//! features (MID combination: relevance minus mean redundancy).

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::featsel::{Criterion, Ranking};

/// Equal-frequency discretization: sort by (value, index) and cut the sorted
/// positions into `bins` equal slices, so every bin holds ⌈n/bins⌉ or
/// ⌊n/bins⌋ points even when values repeat.
fn bin_column(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    let mut out = vec![0usize; n];
    for (pos, &i) in idx.iter().enumerate() {
        out[i] = pos * bins / n;
    }
    out
}

/// Mutual information in nats between two discrete columns.
fn mutual_info(a: &[usize], b: &[usize], a_levels: usize, b_levels: usize) -> f64 {
    let n = a.len() as f64;
    let mut joint = vec![0.0f64; a_levels * b_levels];
    let mut pa = vec![0.0f64; a_levels];
    let mut pb = vec![0.0f64; b_levels];
    for (&x, &y) in a.iter().zip(b) {
        joint[x * b_levels + y] += 1.0;
        pa[x] += 1.0;
        pb[y] += 1.0;
    }
    let mut mi = 0.0;
    for x in 0..a_levels {
        for y in 0..b_levels {
            let pxy = joint[x * b_levels + y] / n;
            if pxy > 0.0 {
                mi += pxy * (pxy * n * n / (pa[x] * pb[y])).ln();
            }
        }
    }
    mi.max(0.0)
}

pub fn rank_mrmr(ds: &Dataset, bins: usize) -> Result<Ranking> {
    if bins < 2 {
        return Err(Error::InvalidParam(format!("mrmr: bins = {bins} must be >= 2")));
    }
    let d = ds.d();
    let binned: Vec<Vec<usize>> = (0..d).map(|f| bin_column(&ds.x.col(f), bins)).collect();
    let labels: Vec<usize> = ds.y.iter().map(|&l| usize::from(l == 1)).collect();

    let relevance: Vec<f64> = binned
        .iter()
        .map(|col| mutual_info(col, &labels, bins, 2))
        .collect();

    let mut order = Vec::with_capacity(d);
    let mut scores = vec![0.0f64; d];
    let mut selected = vec![false; d];
    // running sum of redundancy against everything already selected
    let mut redundancy_sum = vec![0.0f64; d];

    for step in 0..d {
        let mut best: Option<(usize, f64)> = None;
        for f in 0..d {
            if selected[f] {
                continue;
            }
            let objective = if step == 0 {
                relevance[f]
            } else {
                relevance[f] - redundancy_sum[f] / step as f64
            };
            match best {
                Some((_, b)) if objective <= b => {}
                _ => best = Some((f, objective)),
            }
        }
        let (pick, objective) = best.expect("unselected feature remains");
        selected[pick] = true;
        scores[pick] = objective;
        order.push(pick);
        for f in 0..d {
            if !selected[f] {
                redundancy_sum[f] += mutual_info(&binned[f], &binned[pick], bins, bins);
            }
        }
    }

    Ranking::new(order, scores, Criterion::Mrmr, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Modality;
    use crate::matrix::Matrix;

    fn ds_from_cols(cols: &[Vec<f64>], y: Vec<i8>) -> Dataset {
        let n = y.len();
        let d = cols.len();
        let mut data = Vec::with_capacity(n * d);
        for i in 0..n {
            for col in cols {
                data.push(col[i]);
            }
        }
        let ids = (0..d).map(|j| format!("f{j}")).collect();
        Dataset::new(Matrix::from_vec(n, d, data).unwrap(), y, ids, Modality::GM).unwrap()
    }

    #[test]
    fn binning_is_equal_frequency() {
        let b = bin_column(&[5.0, 5.0, 5.0, 5.0], 2);
        // ties split by original index so bins stay balanced
        assert_eq!(b, vec![0, 0, 1, 1]);
    }

    #[test]
    fn mutual_info_matches_hand_value() {
        // perfectly dependent pair: I = H = ln 2
        let a = vec![0usize, 0, 1, 1];
        let b = vec![1usize, 1, 0, 0];
        assert!((mutual_info(&a, &b, 2, 2) - 2.0f64.ln()).abs() < 1e-12);
        // independent pair
        let c = vec![0usize, 1, 0, 1];
        assert!(mutual_info(&a, &c, 2, 2).abs() < 1e-12);
    }

    #[test]
    fn copy_of_label_then_noise_then_duplicate() {
        let y = vec![1, 1, 1, 1, 1, -1, -1, -1, -1, -1];
        let f1: Vec<f64> = y.iter().map(|&l| f64::from(l)).collect();
        let f2 = f1.clone();
        let f3 = vec![0.7, -1.2, 0.3, 1.9, -0.5, 0.6, -1.1, 0.2, 1.8, -0.4];
        let ds = ds_from_cols(&[f1, f2, f3], y);
        let r = rank_mrmr(&ds, 5).unwrap();
        assert_eq!(r.order, vec![0, 2, 1]);
    }

    #[test]
    fn first_pick_maximizes_relevance() {
        let y = vec![1, 1, 1, -1, -1, -1];
        let noise = vec![0.1, -0.7, 0.4, 0.3, -0.2, 0.9];
        let informative: Vec<f64> = y.iter().map(|&l| f64::from(l) * 2.0).collect();
        let ds = ds_from_cols(&[noise, informative], y);
        let r = rank_mrmr(&ds, 3).unwrap();
        assert_eq!(r.order[0], 1);
    }

    #[test]
    fn single_feature() {
        let ds = ds_from_cols(&[vec![1.0, 2.0, 3.0, 4.0]], vec![1, 1, -1, -1]);
        let r = rank_mrmr(&ds, 2).unwrap();
        assert_eq!(r.order, vec![0]);
    }

    #[test]
    fn identical_features_tie_break_ascending() {
        let y = vec![1, 1, 1, -1, -1, -1];
        let f: Vec<f64> = y.iter().map(|&l| f64::from(l)).collect();
        let ds = ds_from_cols(&[f.clone(), f.clone(), f], y);
        let r = rank_mrmr(&ds, 2).unwrap();
        assert_eq!(r.order, vec![0, 1, 2]);
    }

    #[test]
    fn too_few_bins_rejected() {
        let ds = ds_from_cols(&[vec![1.0, 2.0, 3.0, 4.0]], vec![1, 1, -1, -1]);
        assert!(rank_mrmr(&ds, 1).is_err());
    }
}
