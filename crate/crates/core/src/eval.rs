//! Metrics, cross-validation over a fold plan, and hyperparameter grid
//! evaluation for one experiment cell.

use serde::{Deserialize, Serialize};

use crate::data::{standardize_matrix, Dataset, FoldPlan, Modality};
use crate::error::{Error, Result};
use crate::featsel::{self, Criterion, Ranking};
use crate::matrix::Matrix;
use crate::rng::derive_seed;

pub const MRMR_DEFAULT_BINS: usize = 10;
/// NCA regularization defaults to λ = 2^1 / n_train, not jointly tuned.
pub const NCA_LAMBDA_EXP: i32 = 1;
pub const NCA_DEFAULT_ITERS: usize = 60;

const RANK_SEED_TAG: u64 = 1;
const TRAIN_SEED_TAG: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

/// Tally predictions against truth; +1 is the positive (patient) class.
pub fn confusion(pred: &[i8], y: &[i8]) -> Result<ConfusionCounts> {
    if pred.is_empty() {
        return Err(Error::InvalidParam("confusion: empty input".into()));
    }
    if pred.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "confusion: {} predictions vs {} labels",
            pred.len(),
            y.len()
        )));
    }
    let mut c = ConfusionCounts {
        true_pos: 0,
        false_pos: 0,
        true_neg: 0,
        false_neg: 0,
    };
    for (&p, &t) in pred.iter().zip(y) {
        match (p == 1, t == 1) {
            (true, true) => c.true_pos += 1,
            (true, false) => c.false_pos += 1,
            (false, false) => c.true_neg += 1,
            (false, true) => c.false_neg += 1,
        }
    }
    Ok(c)
}

/// JSON has no NaN literal, so undefined metrics serialize as null and read
/// back as NaN.
pub mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// The seven reported metrics. Undefined entries (zero denominators) are NaN,
/// mirroring the NaN cells in the published tables.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetricSet {
    #[serde(with = "nan_as_null")]
    pub accuracy: f64,
    #[serde(with = "nan_as_null")]
    pub auc: f64,
    #[serde(with = "nan_as_null")]
    pub sensitivity: f64,
    #[serde(with = "nan_as_null")]
    pub specificity: f64,
    #[serde(with = "nan_as_null")]
    pub precision: f64,
    #[serde(with = "nan_as_null")]
    pub f_measure: f64,
    #[serde(with = "nan_as_null")]
    pub g_mean: f64,
}

impl MetricSet {
    pub const FIELDS: [&'static str; 7] = [
        "accuracy",
        "auc",
        "sensitivity",
        "specificity",
        "precision",
        "f_measure",
        "g_mean",
    ];

    pub fn as_array(&self) -> [f64; 7] {
        [
            self.accuracy,
            self.auc,
            self.sensitivity,
            self.specificity,
            self.precision,
            self.f_measure,
            self.g_mean,
        ]
    }

    pub fn from_array(a: [f64; 7]) -> MetricSet {
        MetricSet {
            accuracy: a[0],
            auc: a[1],
            sensitivity: a[2],
            specificity: a[3],
            precision: a[4],
            f_measure: a[5],
            g_mean: a[6],
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num as f64 / den as f64
    }
}

/// Mann-Whitney AUC of scores against labels, with ½ credit for score ties.
fn auc_mann_whitney(scores: &[f64], y: &[i8]) -> f64 {
    let n_pos = y.iter().filter(|&&l| l == 1).count();
    let n_neg = y.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return f64::NAN;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            if y[idx] == 1 {
                rank_sum_pos += mid_rank;
            }
        }
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    u / (n_pos * n_neg) as f64
}

pub fn metrics(c: &ConfusionCounts, scores: &[f64], y: &[i8]) -> Result<MetricSet> {
    if y.is_empty() {
        return Err(Error::InvalidParam("metrics: empty input".into()));
    }
    if scores.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "metrics: {} scores vs {} labels",
            scores.len(),
            y.len()
        )));
    }
    if c.total() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "metrics: confusion total {} vs {} samples",
            c.total(),
            y.len()
        )));
    }
    let sensitivity = ratio(c.true_pos, c.true_pos + c.false_neg);
    let specificity = ratio(c.true_neg, c.true_neg + c.false_pos);
    let precision = ratio(c.true_pos, c.true_pos + c.false_pos);
    let f_measure = 2.0 * precision * sensitivity / (precision + sensitivity);
    Ok(MetricSet {
        accuracy: ratio(c.true_pos + c.true_neg, c.total()),
        auc: auc_mann_whitney(scores, y),
        sensitivity,
        specificity,
        precision,
        f_measure,
        g_mean: (sensitivity * specificity).sqrt(),
    })
}

/// Unweighted fold averages with NaN entries excluded per metric; `excluded`
/// counts how many evaluated folds were dropped from each metric's mean.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub set: MetricSet,
    pub excluded: [usize; 7],
    pub folds_used: usize,
}

fn mean_metrics(folds: &[Option<MetricSet>]) -> MeanMetrics {
    let mut sums = [0.0f64; 7];
    let mut counts = [0usize; 7];
    let mut excluded = [0usize; 7];
    let mut folds_used = 0;
    for m in folds.iter().flatten() {
        folds_used += 1;
        for (i, v) in m.as_array().into_iter().enumerate() {
            if v.is_finite() {
                sums[i] += v;
                counts[i] += 1;
            } else {
                excluded[i] += 1;
            }
        }
    }
    let mut mean = [f64::NAN; 7];
    for i in 0..7 {
        if counts[i] > 0 {
            mean[i] = sums[i] / counts[i] as f64;
        }
    }
    MeanMetrics {
        set: MetricSet::from_array(mean),
        excluded,
        folds_used,
    }
}

/// One experiment cell: a classifier/criterion/feature-count triple on one
/// matter, with per-fold and mean metrics. Skipped folds stay as None.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellResult {
    pub classifier: String,
    pub criterion: Criterion,
    pub feature_count: usize,
    pub matter: Modality,
    pub hyperparameters: String,
    pub fold_metrics: Vec<Option<MetricSet>>,
    pub mean: MeanMetrics,
}

/// Anything that can fit on a training split and score a test matrix.
pub trait Learner: Sync {
    fn fit_predict(&self, train: &Dataset, test: &Matrix, seed: u64)
        -> Result<(Vec<i8>, Vec<f64>)>;
}

impl<T: Learner> Learner for &T {
    fn fit_predict(
        &self,
        train: &Dataset,
        test: &Matrix,
        seed: u64,
    ) -> Result<(Vec<i8>, Vec<f64>)> {
        (*self).fit_predict(train, test, seed)
    }
}

/// Cell coordinates and protocol switches shared by every grid point.
#[derive(Debug, Clone)]
pub struct CellSpec {
    pub classifier: String,
    pub criterion: Criterion,
    pub feature_count: usize,
    pub standardize: bool,
    /// Paper-parity mode: rank features once on the full data instead of
    /// within each training fold.
    pub rank_on_full: bool,
    pub seed: u64,
}

/// Ranking dispatch with the documented defaults for the wrapper criteria.
pub fn rank_features(ds: &Dataset, criterion: Criterion, seed: u64) -> Result<Ranking> {
    match criterion {
        Criterion::Mrmr => featsel::rank_mrmr(ds, MRMR_DEFAULT_BINS),
        Criterion::Nca => {
            let lambda = (NCA_LAMBDA_EXP as f64).exp2() / ds.n() as f64;
            featsel::rank_nca(ds, lambda, NCA_DEFAULT_ITERS, seed)
        }
        _ => featsel::rank_by_criterion(ds, criterion),
    }
}

pub fn cross_validate<L: Learner>(
    ds: &Dataset,
    plan: &FoldPlan,
    spec: &CellSpec,
    hyper_label: &str,
    learner: &L,
) -> Result<CellResult> {
    cross_validate_with(ds, plan, spec, hyper_label, learner, None)
}

/// `cross_validate` with an optional precomputed ranking per fold, so a
/// runner can share one ranking across every classifier and feature count of
/// the same (matter, criterion) slice instead of recomputing it per cell.
pub fn cross_validate_with<L: Learner>(
    ds: &Dataset,
    plan: &FoldPlan,
    spec: &CellSpec,
    hyper_label: &str,
    learner: &L,
    shared_rankings: Option<&[Ranking]>,
) -> Result<CellResult> {
    if spec.feature_count == 0 || spec.feature_count > ds.d() {
        return Err(Error::InvalidParam(format!(
            "feature_count {} out of range 1..={}",
            spec.feature_count,
            ds.d()
        )));
    }
    if let Some(shared) = shared_rankings {
        if shared.len() != plan.k {
            return Err(Error::InvalidParam(format!(
                "shared rankings cover {} folds, plan has {}",
                shared.len(),
                plan.k
            )));
        }
    }
    let full_ranking = if spec.rank_on_full && shared_rankings.is_none() {
        Some(rank_features(
            ds,
            spec.criterion,
            derive_seed(spec.seed, &[RANK_SEED_TAG]),
        )?)
    } else {
        None
    };

    let mut fold_metrics = Vec::with_capacity(plan.k);
    for fold in 0..plan.k {
        let train_idx = plan.train_indices(fold);
        let test_idx = plan.test_indices(fold);
        let has_pos = train_idx.iter().any(|&i| ds.y[i] == 1);
        let has_neg = train_idx.iter().any(|&i| ds.y[i] == -1);
        if !has_pos || !has_neg || test_idx.is_empty() {
            fold_metrics.push(None);
            continue;
        }
        let train_ds = ds.subset_rows(&train_idx)?;
        let ranking = match (shared_rankings, &full_ranking) {
            (Some(shared), _) => shared[fold].clone(),
            (None, Some(r)) => r.clone(),
            (None, None) => rank_features(
                &train_ds,
                spec.criterion,
                derive_seed(spec.seed, &[RANK_SEED_TAG, fold as u64]),
            )?,
        };
        let cols = &ranking.order[..spec.feature_count];
        let train_sel = train_ds.select_features(cols)?;
        let test_x = ds.x.select_rows(&test_idx)?.select_columns(cols)?;
        let (x_train, x_test) = if spec.standardize {
            standardize_matrix(&train_sel.x, &test_x)?
        } else {
            (train_sel.x.clone(), test_x)
        };
        let train_final = Dataset::new(
            x_train,
            train_sel.y.clone(),
            train_sel.feature_ids.clone(),
            train_sel.modality,
        )?;
        let fold_seed = derive_seed(spec.seed, &[TRAIN_SEED_TAG, fold as u64]);
        let (pred, scores) = learner.fit_predict(&train_final, &x_test, fold_seed)?;
        let test_y: Vec<i8> = test_idx.iter().map(|&i| ds.y[i]).collect();
        let counts = confusion(&pred, &test_y)?;
        fold_metrics.push(Some(metrics(&counts, &scores, &test_y)?));
    }
    let mean = mean_metrics(&fold_metrics);
    Ok(CellResult {
        classifier: spec.classifier.clone(),
        criterion: spec.criterion,
        feature_count: spec.feature_count,
        matter: ds.modality,
        hyperparameters: hyper_label.to_string(),
        fold_metrics,
        mean,
    })
}

/// All grid points' results, with the winner by mean accuracy. The grid order
/// is the canonical order; ties keep the earliest point.
#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub best_index: usize,
    pub cells: Vec<CellResult>,
}

impl GridOutcome {
    pub fn best(&self) -> &CellResult {
        &self.cells[self.best_index]
    }
}

pub fn grid_evaluate<L: Learner>(
    ds: &Dataset,
    plan: &FoldPlan,
    spec: &CellSpec,
    grid: &[(String, L)],
) -> Result<GridOutcome> {
    grid_evaluate_with(ds, plan, spec, grid, None)
}

pub fn grid_evaluate_with<L: Learner>(
    ds: &Dataset,
    plan: &FoldPlan,
    spec: &CellSpec,
    grid: &[(String, L)],
    shared_rankings: Option<&[Ranking]>,
) -> Result<GridOutcome> {
    if grid.is_empty() {
        return Err(Error::InvalidParam("grid_evaluate: empty grid".into()));
    }
    let mut cells = Vec::with_capacity(grid.len());
    let mut best_index = 0;
    let mut best_acc = f64::NEG_INFINITY;
    for (i, (label, learner)) in grid.iter().enumerate() {
        let cell = cross_validate_with(ds, plan, spec, label, learner, shared_rankings)?;
        let acc = cell.mean.set.accuracy;
        let key = if acc.is_finite() { acc } else { f64::NEG_INFINITY };
        if key > best_acc {
            best_acc = key;
            best_index = i;
        }
        cells.push(cell);
    }
    Ok(GridOutcome { best_index, cells })
}
