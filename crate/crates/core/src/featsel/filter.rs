//! The five per-feature filter criteria: T-Test, Entropy, Bhattacharyya,
//! ROC, and Wilcoxon.

use crate::data::Dataset;
use crate::featsel::Criterion;

const VAR_FLOOR: f64 = 1e-24;
const MEAN_TOL: f64 = 1e-12;

struct ClassMoments {
    n1: f64,
    n2: f64,
    mean1: f64,
    mean2: f64,
    var1: f64,
    var2: f64,
}

fn moments(ds: &Dataset, feature: usize) -> ClassMoments {
    let mut n = [0.0f64; 2];
    let mut sum = [0.0f64; 2];
    for i in 0..ds.n() {
        let c = if ds.y[i] == 1 { 0 } else { 1 };
        n[c] += 1.0;
        sum[c] += ds.x.get(i, feature);
    }
    let mean = [sum[0] / n[0], sum[1] / n[1]];
    let mut ss = [0.0f64; 2];
    for i in 0..ds.n() {
        let c = if ds.y[i] == 1 { 0 } else { 1 };
        let d = ds.x.get(i, feature) - mean[c];
        ss[c] += d * d;
    }
    // unbiased class-conditional variances
    let var = [
        if n[0] > 1.0 { ss[0] / (n[0] - 1.0) } else { 0.0 },
        if n[1] > 1.0 { ss[1] / (n[1] - 1.0) } else { 0.0 },
    ];
    ClassMoments {
        n1: n[0],
        n2: n[1],
        mean1: mean[0],
        mean2: mean[1],
        var1: var[0],
        var2: var[1],
    }
}

/// Degenerate-variance convention: +∞ when the class means differ, 0 when
/// they coincide. Callers flag the feature either way.
fn degenerate_score(mean1: f64, mean2: f64) -> f64 {
    if (mean1 - mean2).abs() > MEAN_TOL {
        f64::INFINITY
    } else {
        0.0
    }
}

fn t_test(m: &ClassMoments) -> Option<f64> {
    let pooled = ((m.n1 - 1.0) * m.var1 + (m.n2 - 1.0) * m.var2) / (m.n1 + m.n2 - 2.0);
    if pooled < VAR_FLOOR {
        return None;
    }
    let se = (pooled * (1.0 / m.n1 + 1.0 / m.n2)).sqrt();
    Some((m.mean1 - m.mean2).abs() / se)
}

fn entropy(m: &ClassMoments) -> Option<f64> {
    if m.var1 < VAR_FLOOR || m.var2 < VAR_FLOOR {
        return None;
    }
    let dm = m.mean1 - m.mean2;
    Some(0.5 * ((m.var1 / m.var2 + m.var2 / m.var1) + dm * dm * (1.0 / m.var1 + 1.0 / m.var2)) - 1.0)
}

fn bhattacharyya(m: &ClassMoments) -> Option<f64> {
    if m.var1 < VAR_FLOOR || m.var2 < VAR_FLOOR {
        return None;
    }
    let dm = m.mean1 - m.mean2;
    let vsum = m.var1 + m.var2;
    Some(0.25 * dm * dm / vsum + 0.5 * (vsum / (2.0 * (m.var1 * m.var2).sqrt())).ln())
}

/// Sum of mid-ranks (1-based) of the +1 class, with the class sizes.
fn class1_rank_sum(ds: &Dataset, feature: usize) -> (f64, f64, f64) {
    let n = ds.n();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        ds.x.get(a, feature)
            .partial_cmp(&ds.x.get(b, feature))
            .unwrap()
    });
    let mut r1 = 0.0;
    let mut start = 0;
    while start < n {
        let v = ds.x.get(idx[start], feature);
        let mut end = start;
        while end < n && ds.x.get(idx[end], feature) == v {
            end += 1;
        }
        // positions start..end share the mid-rank
        let mid = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            if ds.y[i] == 1 {
                r1 += mid;
            }
        }
        start = end;
    }
    let n1 = ds.y.iter().filter(|&&l| l == 1).count() as f64;
    let n2 = n as f64 - n1;
    (r1, n1, n2)
}

fn roc(ds: &Dataset, feature: usize) -> f64 {
    let (r1, n1, n2) = class1_rank_sum(ds, feature);
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    let auc = u / (n1 * n2);
    (auc - 0.5).abs()
}

fn wilcoxon(ds: &Dataset, feature: usize) -> f64 {
    let (r1, n1, n2) = class1_rank_sum(ds, feature);
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    (u - n1 * n2 / 2.0).abs() / (n1 * n2 * (n1 + n2 + 1.0) / 12.0).sqrt()
}

pub(crate) fn filter_scores(ds: &Dataset, criterion: Criterion) -> (Vec<f64>, Vec<usize>) {
    let mut scores = Vec::with_capacity(ds.d());
    let mut flagged = Vec::new();
    for f in 0..ds.d() {
        let score = match criterion {
            Criterion::Roc => roc(ds, f),
            Criterion::Wilcoxon => wilcoxon(ds, f),
            Criterion::TTest | Criterion::Entropy | Criterion::Bhattacharyya => {
                let m = moments(ds, f);
                let computed = match criterion {
                    Criterion::TTest => t_test(&m),
                    Criterion::Entropy => entropy(&m),
                    _ => bhattacharyya(&m),
                };
                match computed {
                    Some(s) => s,
                    None => {
                        flagged.push(f);
                        degenerate_score(m.mean1, m.mean2)
                    }
                }
            }
            Criterion::Mrmr | Criterion::Nca => unreachable!("not a filter criterion"),
        };
        scores.push(score);
    }
    (scores, flagged)
}
