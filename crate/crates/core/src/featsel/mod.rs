//! The seven feature-ranking procedures plus top-m selection.

mod filter;
mod mrmr;
mod nca;

pub use mrmr::rank_mrmr;
pub use nca::rank_nca;

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    TTest,
    Roc,
    Wilcoxon,
    Entropy,
    Bhattacharyya,
    Mrmr,
    Nca,
}

impl Criterion {
    pub const ALL: [Criterion; 7] = [
        Criterion::TTest,
        Criterion::Roc,
        Criterion::Wilcoxon,
        Criterion::Entropy,
        Criterion::Bhattacharyya,
        Criterion::Mrmr,
        Criterion::Nca,
    ];

    pub fn is_filter(&self) -> bool {
        !matches!(self, Criterion::Mrmr | Criterion::Nca)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Criterion::TTest => "T-Test",
            Criterion::Roc => "ROC",
            Criterion::Wilcoxon => "Wilcoxon",
            Criterion::Entropy => "Entropy",
            Criterion::Bhattacharyya => "Bhattacharyya",
            Criterion::Mrmr => "MRMR",
            Criterion::Nca => "NCA",
        };
        f.write_str(s)
    }
}

impl Serialize for Criterion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Criterion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t-test" | "ttest" => Ok(Criterion::TTest),
            "roc" => Ok(Criterion::Roc),
            "wilcoxon" => Ok(Criterion::Wilcoxon),
            "entropy" => Ok(Criterion::Entropy),
            "bhattacharyya" => Ok(Criterion::Bhattacharyya),
            "mrmr" => Ok(Criterion::Mrmr),
            "nca" => Ok(Criterion::Nca),
            other => Err(Error::InvalidParam(format!("unknown criterion {other:?}"))),
        }
    }
}

/// A full feature ordering, best first, with the per-feature scores that
/// produced it. `flagged` lists features whose score fell back to the
/// zero-variance convention.
#[derive(Debug, Clone)]
pub struct Ranking {
    pub order: Vec<usize>,
    pub scores: Vec<f64>,
    pub criterion: Criterion,
    pub flagged: Vec<usize>,
}

impl Ranking {
    pub fn new(order: Vec<usize>, scores: Vec<f64>, criterion: Criterion, flagged: Vec<usize>) -> Result<Self> {
        if order.len() != scores.len() {
            return Err(Error::DimensionMismatch(format!(
                "ranking: {} order entries vs {} scores",
                order.len(),
                scores.len()
            )));
        }
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || seen[i] {
                return Err(Error::InvalidParam("ranking order is not a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(Self {
            order,
            scores,
            criterion,
            flagged,
        })
    }
}

/// Indices sorted by score descending, ties broken by ascending index.
/// NaN (which the criteria never produce) sorts last.
pub(crate) fn sort_descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let sa = if scores[a].is_nan() { f64::NEG_INFINITY } else { scores[a] };
        let sb = if scores[b].is_nan() { f64::NEG_INFINITY } else { scores[b] };
        sb.partial_cmp(&sa).unwrap().then(a.cmp(&b))
    });
    order
}

/// Ranks every feature by one of the five filter criteria.
pub fn rank_by_criterion(ds: &Dataset, criterion: Criterion) -> Result<Ranking> {
    if !criterion.is_filter() {
        return Err(Error::InvalidParam(format!(
            "{criterion} is not a filter criterion"
        )));
    }
    let (scores, flagged) = filter::filter_scores(ds, criterion);
    let order = sort_descending(&scores);
    Ranking::new(order, scores, criterion, flagged)
}

/// Restricts a dataset to the first m ranked features.
pub fn select_top(r: &Ranking, m: usize, ds: &Dataset) -> Result<Dataset> {
    if m == 0 {
        return Err(Error::InvalidParam("select_top: m = 0".into()));
    }
    if m > ds.d() {
        return Err(Error::InvalidParam(format!(
            "select_top: m = {m} exceeds d = {}",
            ds.d()
        )));
    }
    if r.order.len() != ds.d() {
        return Err(Error::DimensionMismatch(format!(
            "select_top: ranking over {} features, dataset has {}",
            r.order.len(),
            ds.d()
        )));
    }
    ds.select_features(&r.order[..m])
}
