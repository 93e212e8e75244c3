//! Neighbourhood component analysis feature weighting, maximized by batch
//! gradient ascent with a backtracking line search.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::featsel::{Criterion, Ranking};

const BACKTRACK_LIMIT: usize = 40;
const WEIGHT_SNAP: f64 = 1e-12;

struct NcaState {
    n: usize,
    d: usize,
}

impl NcaState {
    /// Leave-one-out assignment probabilities p_ij for the current weights.
    fn probabilities(&self, ds: &Dataset, w: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut p = vec![0.0f64; n * n];
        let w2: Vec<f64> = w.iter().map(|v| v * v).collect();
        for i in 0..n {
            let xi = ds.x.row(i);
            let mut row_sum = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let xj = ds.x.row(j);
                let mut dist = 0.0;
                for r in 0..self.d {
                    let delta = xi[r] - xj[r];
                    dist += w2[r] * delta * delta;
                }
                let k = (-dist).exp();
                p[i * n + j] = k;
                row_sum += k;
            }
            if row_sum > 0.0 {
                for j in 0..n {
                    p[i * n + j] /= row_sum;
                }
            }
        }
        p
    }

    /// F(w) = (1/n)·Σᵢ pᵢ − λ·Σ w_r², pᵢ = mass on same-class neighbours.
    fn objective(&self, ds: &Dataset, w: &[f64], lambda: f64, p: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if j != i && ds.y[j] == ds.y[i] {
                    acc += p[i * n + j];
                }
            }
        }
        acc / n as f64 - lambda * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, ds: &Dataset, w: &[f64], lambda: f64, p: &[f64]) -> Vec<f64> {
        let n = self.n;
        let d = self.d;
        let mut grad = vec![0.0f64; d];
        for i in 0..n {
            let xi = ds.x.row(i);
            // per-feature weighted squared deltas against all and same-class
            let mut all = vec![0.0f64; d];
            let mut same = vec![0.0f64; d];
            let mut p_i = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let pij = p[i * n + j];
                if pij == 0.0 {
                    continue;
                }
                let xj = ds.x.row(j);
                let same_class = ds.y[j] == ds.y[i];
                if same_class {
                    p_i += pij;
                }
                for r in 0..d {
                    let delta = xi[r] - xj[r];
                    let contrib = pij * delta * delta;
                    all[r] += contrib;
                    if same_class {
                        same[r] += contrib;
                    }
                }
            }
            for r in 0..d {
                grad[r] += p_i * all[r] - same[r];
            }
        }
        for r in 0..d {
            grad[r] = 2.0 * w[r] * grad[r] / n as f64 - 2.0 * lambda * w[r];
        }
        grad
    }
}

/// Ranks features by the squared NCA weights. The ascent itself is
/// deterministic; the seed is carried through for provenance only.
pub fn rank_nca(ds: &Dataset, lambda: f64, iters: usize, seed: u64) -> Result<Ranking> {
    let _ = seed;
    if lambda < 0.0 {
        return Err(Error::InvalidParam(format!("nca: lambda = {lambda} must be >= 0")));
    }
    let state = NcaState { n: ds.n(), d: ds.d() };
    let mut w = vec![1.0f64; ds.d()];
    let p = state.probabilities(ds, &w);
    let mut f = state.objective(ds, &w, lambda, &p);
    let mut grad = state.gradient(ds, &w, lambda, &p);
    let mut step = 1.0;

    for _ in 0..iters {
        let mut improved = false;
        let mut alpha = step;
        for _ in 0..BACKTRACK_LIMIT {
            let cand: Vec<f64> = w.iter().zip(&grad).map(|(wi, gi)| wi + alpha * gi).collect();
            let pc = state.probabilities(ds, &cand);
            let fc = state.objective(ds, &cand, lambda, &pc);
            if fc > f {
                w = cand;
                f = fc;
                grad = state.gradient(ds, &w, lambda, &pc);
                step = alpha * 1.2;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !improved {
            break;
        }
    }

    let scores: Vec<f64> = w
        .iter()
        .map(|v| {
            let s = v * v;
            if s < WEIGHT_SNAP {
                0.0
            } else {
                s
            }
        })
        .collect();
    let order = super::sort_descending(&scores);
    Ranking::new(order, scores, Criterion::Nca, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Modality;
    use crate::matrix::Matrix;

    fn ds_two_features() -> Dataset {
        // feature 0 separates the classes cleanly, feature 1 is noise
        let x = Matrix::from_vec(
            8,
            2,
            vec![
                2.0, 0.3, 2.2, -0.8, 1.8, 0.9, 2.1, -0.1, -2.0, 0.5, -2.2, -0.6, -1.9, 0.8,
                -2.1, -0.3,
            ],
        )
        .unwrap();
        Dataset::new(
            x,
            vec![1, 1, 1, 1, -1, -1, -1, -1],
            vec!["sep".into(), "noise".into()],
            Modality::GM,
        )
        .unwrap()
    }

    #[test]
    fn discriminative_feature_wins() {
        let ds = ds_two_features();
        let r = rank_nca(&ds, 0.01, 60, 0).unwrap();
        assert_eq!(r.order[0], 0);
        assert!(r.scores[0] > r.scores[1]);
    }

    #[test]
    fn objective_does_not_decrease() {
        let ds = ds_two_features();
        let state = NcaState { n: ds.n(), d: ds.d() };
        let w0 = vec![1.0; ds.d()];
        let p0 = state.probabilities(&ds, &w0);
        let f0 = state.objective(&ds, &w0, 0.01, &p0);
        let r = rank_nca(&ds, 0.01, 60, 0).unwrap();
        let w_final: Vec<f64> = r.scores.iter().map(|s| s.sqrt()).collect();
        let pf = state.probabilities(&ds, &w_final);
        let ff = state.objective(&ds, &w_final, 0.01, &pf);
        assert!(ff >= f0 - 1e-9);
    }

    #[test]
    fn huge_lambda_collapses_to_index_order() {
        let ds = ds_two_features();
        let r = rank_nca(&ds, 1e6, 100, 0).unwrap();
        assert_eq!(r.scores, vec![0.0, 0.0]);
        assert_eq!(r.order, vec![0, 1]);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let ds = ds_two_features();
        let a = rank_nca(&ds, 0.05, 40, 9).unwrap();
        let b = rank_nca(&ds, 0.05, 40, 9).unwrap();
        assert_eq!(a.order, b.order);
        assert_eq!(a.scores, b.scores);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let ds = ds_two_features();
        let state = NcaState { n: ds.n(), d: ds.d() };
        let w = vec![0.9, 1.3];
        let lambda = 0.07;
        let p = state.probabilities(&ds, &w);
        let grad = state.gradient(&ds, &w, lambda, &p);
        let h = 1e-6;
        for r in 0..2 {
            let mut wp = w.clone();
            wp[r] += h;
            let mut wm = w.clone();
            wm[r] -= h;
            let fp = state.objective(&ds, &wp, lambda, &state.probabilities(&ds, &wp));
            let fm = state.objective(&ds, &wm, lambda, &state.probabilities(&ds, &wm));
            let fd = (fp - fm) / (2.0 * h);
            assert!((grad[r] - fd).abs() < 1e-5, "feature {r}: {} vs {fd}", grad[r]);
        }
    }

    #[test]
    fn negative_lambda_rejected() {
        let ds = ds_two_features();
        assert!(rank_nca(&ds, -0.1, 10, 0).is_err());
    }
}
