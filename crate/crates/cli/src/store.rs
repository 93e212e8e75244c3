//! On-disk results store: one JSON file per lattice cell plus a manifest of
//! content hashes, which doubles as the resume index.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use twinbench_core::data::Modality;
use twinbench_core::eval::{nan_as_null, CellResult};
use twinbench_core::featsel::Criterion;
use twinbench_core::{Error, Result};

use crate::models::ClassifierId;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Best grid point in full, the rest as (label, mean accuracy) summaries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoredCell {
    pub best: CellResult,
    pub grid: Vec<GridPointSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridPointSummary {
    pub hyperparameters: String,
    #[serde(with = "nan_as_null")]
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub standardize: bool,
    pub rank_on_full: bool,
    pub folds: usize,
    pub version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub meta: RunMeta,
    /// Relative path -> sha256 of the file contents.
    pub files: BTreeMap<String, String>,
    /// Cell key -> error message for cells that failed.
    pub errors: BTreeMap<String, String>,
}

#[derive(Debug)]
pub struct ResultsStore {
    root: PathBuf,
    manifest: Manifest,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// `cells/<matter>_<criterion>_<count>_<classifier>.json`
pub fn cell_path(matter: Modality, criterion: Criterion, count: usize, id: ClassifierId) -> String {
    format!("cells/{matter}_{criterion}_{count}_{}.json", id.slug())
}

impl ResultsStore {
    pub fn create(root: &Path, meta: RunMeta) -> Result<Self> {
        fs::create_dir_all(root.join("cells"))
            .map_err(|e| Error::Data(format!("store {}: {e}", root.display())))?;
        let store = ResultsStore {
            root: root.to_path_buf(),
            manifest: Manifest { meta, files: BTreeMap::new(), errors: BTreeMap::new() },
        };
        store.write_manifest()?;
        Ok(store)
    }

    pub fn open(root: &Path) -> Result<Self> {
        let path = root.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::Data(format!("manifest {}: {e}", path.display())))?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| Error::Data(format!("manifest {}: {e}", path.display())))?;
        Ok(ResultsStore { root: root.to_path_buf(), manifest })
    }

    /// Open if a manifest exists, otherwise create. `meta` must match an
    /// existing manifest; a seed or protocol change invalidates resume.
    pub fn open_or_create(root: &Path, meta: RunMeta) -> Result<Self> {
        if root.join(MANIFEST_FILE).exists() {
            let store = Self::open(root)?;
            let m = &store.manifest.meta;
            if m.seed != meta.seed
                || m.standardize != meta.standardize
                || m.rank_on_full != meta.rank_on_full
                || m.folds != meta.folds
            {
                return Err(Error::InvalidParam(format!(
                    "existing store {} was produced with different settings; \
                     use a fresh --out directory",
                    root.display()
                )));
            }
            Ok(store)
        } else {
            Self::create(root, meta)
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn meta(&self) -> &RunMeta {
        &self.manifest.meta
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    /// True when the manifest lists the file and the bytes on disk still
    /// match the recorded hash.
    pub fn is_current(&self, rel: &str) -> bool {
        let Some(expected) = self.manifest.files.get(rel) else {
            return false;
        };
        match fs::read(self.root.join(rel)) {
            Ok(bytes) => sha256_hex(&bytes) == *expected,
            Err(_) => false,
        }
    }

    /// Write bytes and record their hash. The manifest itself is rewritten
    /// by `flush`.
    pub fn write_file(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)
                .map_err(|e| Error::Data(format!("store {}: {e}", parent.display())))?;
        }
        fs::write(&path, bytes).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        self.manifest.files.insert(rel.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_cell(&mut self, rel: &str, cell: &StoredCell) -> Result<()> {
        let json = serde_json::to_string_pretty(cell)
            .map_err(|e| Error::Data(format!("serialize {rel}: {e}")))?;
        self.manifest.errors.remove(rel);
        self.write_file(rel, json.as_bytes())
    }

    pub fn read_cell(&self, rel: &str) -> Result<StoredCell> {
        let path = self.root.join(rel);
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
    }

    pub fn record_error(&mut self, key: &str, message: &str) {
        self.manifest.errors.insert(key.to_string(), message.to_string());
    }

    pub fn flush(&self) -> Result<()> {
        self.write_manifest()
    }

    fn write_manifest(&self) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.manifest)
            .map_err(|e| Error::Data(format!("serialize manifest: {e}")))?;
        let path = self.root.join(MANIFEST_FILE);
        fs::write(&path, json).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use twinbench_core::eval::{MeanMetrics, MetricSet};

    fn meta() -> RunMeta {
        RunMeta {
            seed: 7,
            standardize: true,
            rank_on_full: false,
            folds: 10,
            version: "test".into(),
        }
    }

    fn sample_cell() -> StoredCell {
        let set = MetricSet::from_array([0.9, 0.95, 1.0, 0.8, f64::NAN, f64::NAN, 0.894]);
        StoredCell {
            best: CellResult {
                classifier: "KNN".into(),
                criterion: Criterion::Wilcoxon,
                feature_count: 100,
                matter: Modality::CM,
                hyperparameters: "k=5".into(),
                fold_metrics: vec![Some(set)],
                mean: MeanMetrics { set, excluded: [0; 7], folds_used: 1 },
            },
            grid: vec![GridPointSummary { hyperparameters: "k=5".into(), mean_accuracy: 0.9 }],
        }
    }

    #[test]
    fn round_trips_cells_and_tracks_hashes() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = ResultsStore::create(dir.path(), meta()).unwrap();
        let rel = cell_path(Modality::CM, Criterion::Wilcoxon, 100, ClassifierId::Knn);
        assert_eq!(rel, "cells/CM_Wilcoxon_100_KNN.json");
        assert!(!store.is_current(&rel));
        store.write_cell(&rel, &sample_cell()).unwrap();
        store.flush().unwrap();
        assert!(store.is_current(&rel));

        let reopened = ResultsStore::open(dir.path()).unwrap();
        assert!(reopened.is_current(&rel));
        let cell = reopened.read_cell(&rel).unwrap();
        assert_eq!(cell.best.classifier, "KNN");
        assert!(cell.best.mean.set.precision.is_nan());
        assert_eq!(cell.best.mean.set.accuracy, 0.9);
    }

    #[test]
    fn edits_invalidate_resume() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = ResultsStore::create(dir.path(), meta()).unwrap();
        let rel = cell_path(Modality::GM, Criterion::TTest, 5, ClassifierId::Raf);
        store.write_cell(&rel, &sample_cell()).unwrap();
        store.flush().unwrap();
        assert!(store.is_current(&rel));
        fs::write(dir.path().join(&rel), b"tampered").unwrap();
        assert!(!store.is_current(&rel));
    }

    #[test]
    fn open_or_create_guards_settings() {
        let dir = tempfile::tempdir().unwrap();
        ResultsStore::create(dir.path(), meta()).unwrap();
        assert!(ResultsStore::open_or_create(dir.path(), meta()).is_ok());
        let mut changed = meta();
        changed.seed = 8;
        assert!(ResultsStore::open_or_create(dir.path(), changed).is_err());
    }

    #[test]
    fn errors_recorded_and_cleared() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = ResultsStore::create(dir.path(), meta()).unwrap();
        let rel = cell_path(Modality::WM, Criterion::Nca, 10, ClassifierId::SvmNl);
        store.record_error(&rel, "boom");
        store.flush().unwrap();
        let reopened = ResultsStore::open(dir.path()).unwrap();
        assert_eq!(reopened.manifest().errors.get(&rel).unwrap(), "boom");
        store.write_cell(&rel, &sample_cell()).unwrap();
        assert!(store.manifest().errors.is_empty());
    }
}
