//! Experiment configuration: JSON file in, validated plan out.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twinbench_core::data::Modality;
use twinbench_core::featsel::Criterion;
use twinbench_core::{Error, Result};

use crate::models::{ClassifierId, GridOverride};

fn default_label_column() -> String {
    "label".into()
}

fn default_feature_counts() -> Vec<usize> {
    (1..=13).map(|i| i * 100).collect()
}

fn default_folds() -> usize {
    10
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_standardize() -> bool {
    true
}

/// The run plan. Every field has a default; an empty JSON object is a valid
/// config apart from the data paths.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub gm: Option<PathBuf>,
    pub wm: Option<PathBuf>,
    pub label_column: String,
    /// Subset of {GM, WM, CM}; defaults to whatever the data paths allow.
    pub matters: Option<Vec<Modality>>,
    /// Classifier names; defaults to the paper's 23 rows.
    pub classifiers: Option<Vec<ClassifierId>>,
    /// Criterion names; defaults to all 7.
    pub criteria: Option<Vec<Criterion>>,
    pub feature_counts: Vec<usize>,
    pub folds: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub standardize: bool,
    /// Rank once on the full data instead of per training fold.
    pub rank_on_full: bool,
    /// Per-classifier grid overrides, keyed by classifier name; the key
    /// "default" applies to every classifier without its own entry.
    pub grids: BTreeMap<String, GridOverride>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            gm: None,
            wm: None,
            label_column: default_label_column(),
            matters: None,
            classifiers: None,
            criteria: None,
            feature_counts: default_feature_counts(),
            folds: default_folds(),
            seed: 0,
            out_dir: default_out_dir(),
            standardize: default_standardize(),
            rank_on_full: false,
            grids: BTreeMap::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("config {}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParam(format!("config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.feature_counts.is_empty() {
            return Err(Error::InvalidParam("feature_counts is empty".into()));
        }
        let ascending = self
            .feature_counts
            .windows(2)
            .all(|w| w[0] < w[1]);
        if !ascending || self.feature_counts[0] == 0 {
            return Err(Error::InvalidParam(
                "feature_counts must be positive and strictly ascending".into(),
            ));
        }
        if self.folds < 2 {
            return Err(Error::InvalidParam(format!(
                "folds must be at least 2, got {}",
                self.folds
            )));
        }
        for matter in self.matters() {
            let needs_gm = matter != Modality::WM;
            let needs_wm = matter != Modality::GM;
            if needs_gm && self.gm.is_none() {
                return Err(Error::InvalidParam(format!("matter {matter} needs a gm path")));
            }
            if needs_wm && self.wm.is_none() {
                return Err(Error::InvalidParam(format!("matter {matter} needs a wm path")));
            }
        }
        for key in self.grids.keys() {
            if key != "default" {
                key.parse::<ClassifierId>()?;
            }
        }
        Ok(())
    }

    /// Matters to run: the explicit list, or everything the data paths allow.
    pub fn matters(&self) -> Vec<Modality> {
        if let Some(list) = &self.matters {
            return list.clone();
        }
        let mut out = Vec::new();
        if self.gm.is_some() {
            out.push(Modality::GM);
        }
        if self.wm.is_some() {
            out.push(Modality::WM);
        }
        if self.gm.is_some() && self.wm.is_some() {
            out.push(Modality::CM);
        }
        out
    }

    pub fn classifiers(&self) -> Vec<ClassifierId> {
        self.classifiers.clone().unwrap_or_else(ClassifierId::default_23)
    }

    pub fn criteria(&self) -> Vec<Criterion> {
        self.criteria.clone().unwrap_or_else(|| Criterion::ALL.to_vec())
    }

    /// Grid override for one classifier: its own entry, else "default",
    /// else Table 1.
    pub fn grid_for(&self, id: ClassifierId) -> GridOverride {
        self.grids
            .get(id.name())
            .or_else(|| self.grids.get("default"))
            .cloned()
            .unwrap_or_default()
    }

    /// Config seed, unless `TWINBENCH_SEED` is set.
    pub fn effective_seed(&self) -> Result<u64> {
        match std::env::var("TWINBENCH_SEED") {
            Ok(v) => v
                .parse::<u64>()
                .map_err(|_| Error::InvalidParam(format!("TWINBENCH_SEED must be a u64, got {v:?}"))),
            Err(_) => Ok(self.seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_protocol() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.feature_counts, (1..=13).map(|i| i * 100).collect::<Vec<_>>());
        assert_eq!(cfg.folds, 10);
        assert!(cfg.standardize);
        assert!(!cfg.rank_on_full);
        assert_eq!(cfg.classifiers().len(), 23);
        assert_eq!(cfg.criteria().len(), 7);
        assert!(cfg.matters().is_empty());
    }

    #[test]
    fn matters_follow_available_paths() {
        let mut cfg = ExperimentConfig::default();
        cfg.gm = Some("gm.csv".into());
        assert_eq!(cfg.matters(), vec![Modality::GM]);
        cfg.wm = Some("wm.csv".into());
        assert_eq!(cfg.matters(), vec![Modality::GM, Modality::WM, Modality::CM]);
    }

    #[test]
    fn validation_rejects_bad_shapes() {
        let mut cfg = ExperimentConfig::default();
        cfg.feature_counts = vec![200, 100];
        assert!(cfg.validate().is_err());
        cfg.feature_counts = vec![0, 100];
        assert!(cfg.validate().is_err());
        cfg.feature_counts = vec![100];
        cfg.folds = 1;
        assert!(cfg.validate().is_err());
        cfg.folds = 2;
        cfg.matters = Some(vec![Modality::CM]);
        assert!(cfg.validate().is_err(), "CM without data paths");
    }

    #[test]
    fn parses_json_with_overrides() {
        let text = r#"{
            "gm": "gm.csv",
            "matters": ["GM"],
            "classifiers": ["KNN", "TWSVM (Linear)"],
            "criteria": ["Wilcoxon"],
            "feature_counts": [10, 20],
            "folds": 5,
            "seed": 7,
            "grids": {"default": {"penalty_exps": [0]}, "KNN": {"k": 3}}
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.classifiers(), vec![ClassifierId::Knn, ClassifierId::TwsvmLin]);
        assert_eq!(cfg.grid_for(ClassifierId::Knn).k, Some(3));
        assert_eq!(cfg.grid_for(ClassifierId::TwsvmLin).penalty_exps, Some(vec![0]));
        assert_eq!(cfg.grid_for(ClassifierId::TwsvmLin).k, None);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn env_seed_overrides_config() {
        let mut cfg = ExperimentConfig::default();
        cfg.seed = 5;
        std::env::set_var("TWINBENCH_SEED", "99");
        assert_eq!(cfg.effective_seed().unwrap(), 99);
        std::env::set_var("TWINBENCH_SEED", "nope");
        assert!(cfg.effective_seed().is_err());
        std::env::remove_var("TWINBENCH_SEED");
        assert_eq!(cfg.effective_seed().unwrap(), 5);
    }
}
