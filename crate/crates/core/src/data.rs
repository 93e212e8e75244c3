//! Dataset ingestion, modality combination, per-fold standardization, and
//! stratified cross-validation plans.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::rng_from_seed;

/// Source tissue of a feature matrix. CM is the column-wise combination of
/// grey and white matter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modality {
    GM,
    WM,
    CM,
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Modality::GM => "GM",
            Modality::WM => "WM",
            Modality::CM => "CM",
        };
        f.write_str(s)
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GM" | "gm" => Ok(Modality::GM),
            "WM" | "wm" => Ok(Modality::WM),
            "CM" | "cm" => Ok(Modality::CM),
            other => Err(Error::InvalidParam(format!("unknown modality {other:?}"))),
        }
    }
}

/// Subjects × features with ±1 labels (+1 = patient).
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Matrix,
    pub y: Vec<i8>,
    pub feature_ids: Vec<String>,
    pub modality: Modality,
    pub subject_ids: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(x: Matrix, y: Vec<i8>, feature_ids: Vec<String>, modality: Modality) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "dataset: {} rows vs {} labels",
                x.rows(),
                y.len()
            )));
        }
        if x.cols() != feature_ids.len() {
            return Err(Error::DimensionMismatch(format!(
                "dataset: {} columns vs {} feature ids",
                x.cols(),
                feature_ids.len()
            )));
        }
        if y.iter().any(|&l| l != 1 && l != -1) {
            return Err(Error::Data("labels must be +1 or -1".into()));
        }
        if !y.contains(&1) || !y.contains(&-1) {
            return Err(Error::DegenerateClass("single-class data".into()));
        }
        Ok(Self {
            x,
            y,
            feature_ids,
            modality,
            subject_ids: None,
        })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }

    /// Subject indices carrying the given label, in dataset order.
    pub fn class_indices(&self, label: i8) -> Vec<usize> {
        self.y
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| i)
            .collect()
    }

    /// Restriction to a feature subset, keeping the requested column order.
    pub fn select_features(&self, cols: &[usize]) -> Result<Dataset> {
        let x = self.x.select_columns(cols)?;
        let feature_ids = cols.iter().map(|&c| self.feature_ids[c].clone()).collect();
        Ok(Dataset {
            x,
            y: self.y.clone(),
            feature_ids,
            modality: self.modality,
            subject_ids: self.subject_ids.clone(),
        })
    }

    /// Restriction to a subject subset, keeping the requested row order.
    pub fn subset_rows(&self, rows: &[usize]) -> Result<Dataset> {
        let x = self.x.select_rows(rows)?;
        let y = rows.iter().map(|&r| self.y[r]).collect();
        let subject_ids = self
            .subject_ids
            .as_ref()
            .map(|ids| rows.iter().map(|&r| ids[r].clone()).collect());
        Ok(Dataset {
            x,
            y,
            feature_ids: self.feature_ids.clone(),
            modality: self.modality,
            subject_ids,
        })
    }
}

/// Assignment of every subject to one of k folds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Reads a header-first CSV with an optional leading `subject_id` column and
/// one label column ({1,-1} or {1,0}; 0 maps to -1). Every other column is a
/// numeric feature.
pub fn load_csv(path: &Path, label_column: &str) -> Result<Dataset> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::Data(format!("missing label column {label_column:?}")))?;
    let has_subject_ids = headers.first().map(String::as_str) == Some("subject_id");

    let mut feature_cols = Vec::new();
    let mut feature_ids = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        if i == label_idx || (has_subject_ids && i == 0) {
            continue;
        }
        feature_cols.push(i);
        feature_ids.push(h.clone());
    }

    let mut rows = Vec::new();
    let mut y = Vec::new();
    let mut subject_ids = if has_subject_ids { Some(Vec::new()) } else { None };
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(Error::Data(format!(
                "row {} has {} cells, expected {}",
                r + 1,
                record.len(),
                headers.len()
            )));
        }
        if let Some(ids) = subject_ids.as_mut() {
            ids.push(record[0].to_string());
        }
        let label_cell = record[label_idx].trim();
        let label: f64 = label_cell
            .parse()
            .map_err(|_| Error::Data(format!("non-numeric label at row {}", r + 1)))?;
        let label = if label == 1.0 {
            1i8
        } else if label == -1.0 || label == 0.0 {
            -1i8
        } else {
            return Err(Error::Data(format!(
                "label {label} at row {} not in {{1, -1, 0}}",
                r + 1
            )));
        };
        y.push(label);

        let mut row = Vec::with_capacity(feature_cols.len());
        for &c in &feature_cols {
            let cell = record[c].trim();
            let v: f64 = cell.parse().map_err(|_| {
                Error::Data(format!("non-numeric cell at ({},{})", r + 1, c + 1))
            })?;
            if !v.is_finite() {
                return Err(Error::Data(format!(
                    "non-finite cell at ({},{})",
                    r + 1,
                    c + 1
                )));
            }
            row.push(v);
        }
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::Data("empty csv".into()));
    }
    let x = Matrix::from_rows(&rows)?;
    let mut ds = Dataset::new(x, y, feature_ids, Modality::GM)?;
    ds.subject_ids = subject_ids;
    Ok(ds)
}

/// Column-concatenates two modalities recorded over the same subjects.
pub fn combine_modalities(gm: &Dataset, wm: &Dataset) -> Result<Dataset> {
    if gm.n() != wm.n() {
        return Err(Error::Data(format!(
            "subject mismatch: {} vs {} rows",
            gm.n(),
            wm.n()
        )));
    }
    if let (Some(a), Some(b)) = (&gm.subject_ids, &wm.subject_ids) {
        if a != b {
            return Err(Error::Data("subject mismatch: differing subject_id".into()));
        }
    }
    if gm.y != wm.y {
        return Err(Error::Data("label mismatch between modalities".into()));
    }
    let x = gm.x.hstack(&wm.x)?;
    let mut feature_ids = gm.feature_ids.clone();
    feature_ids.extend(wm.feature_ids.iter().cloned());
    let mut ds = Dataset::new(x, gm.y.clone(), feature_ids, Modality::CM)?;
    ds.subject_ids = gm.subject_ids.clone();
    Ok(ds)
}

/// Stratified k-fold assignment: each class is shuffled with the seed and then
/// dealt round-robin onto folds, with the dealing cursor carried from class to
/// class so fold sizes stay within one of each other.
pub fn stratified_kfold(ds: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidParam(format!("k = {k} must be >= 2")));
    }
    let mut assignments = vec![0usize; ds.n()];
    let mut rng = rng_from_seed(seed);
    let mut cursor = 0usize;
    for label in [1i8, -1i8] {
        let mut members = ds.class_indices(label);
        if members.len() < k {
            return Err(Error::InvalidParam(format!(
                "class {label} has {} members, fewer than k = {k}",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for subject in members {
            assignments[subject] = cursor % k;
            cursor += 1;
        }
    }
    Ok(FoldPlan {
        k,
        assignments,
        seed,
    })
}

/// Z-scores both matrices with the first one's per-column mean and population
/// standard deviation. Columns with train std below 1e-12 are zeroed in both
/// outputs.
pub fn standardize_matrix(train_x: &Matrix, apply_x: &Matrix) -> Result<(Matrix, Matrix)> {
    if train_x.cols() != apply_x.cols() {
        return Err(Error::DimensionMismatch(format!(
            "standardize: {} vs {} features",
            train_x.cols(),
            apply_x.cols()
        )));
    }
    let n = train_x.rows() as f64;
    let d = train_x.cols();
    let mut mean = vec![0.0; d];
    let mut std = vec![0.0; d];
    for j in 0..d {
        let mut s = 0.0;
        for i in 0..train_x.rows() {
            s += train_x.get(i, j);
        }
        mean[j] = s / n;
        let mut v = 0.0;
        for i in 0..train_x.rows() {
            let c = train_x.get(i, j) - mean[j];
            v += c * c;
        }
        std[j] = (v / n).sqrt();
    }

    let transform = |x: &Matrix| -> Matrix {
        let mut out = x.clone();
        for i in 0..x.rows() {
            for j in 0..d {
                let v = if std[j] < 1e-12 {
                    0.0
                } else {
                    (x.get(i, j) - mean[j]) / std[j]
                };
                out.set(i, j, v);
            }
        }
        out
    };
    Ok((transform(train_x), transform(apply_x)))
}

/// Dataset-level wrapper around `standardize_matrix`.
pub fn standardize(train: &Dataset, apply_to: &Dataset) -> Result<(Dataset, Dataset)> {
    let (xtr, xap) = standardize_matrix(&train.x, &apply_to.x)?;
    let rewrap = |ds: &Dataset, x: Matrix| Dataset {
        x,
        y: ds.y.clone(),
        feature_ids: ds.feature_ids.clone(),
        modality: ds.modality,
        subject_ids: ds.subject_ids.clone(),
    };
    Ok((rewrap(train, xtr), rewrap(apply_to, xap)))
}
