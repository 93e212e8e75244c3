//! Lattice scheduler: matter × criterion × feature count × classifier cells
//! over a shared worker pool, with per-slice ranking reuse and manifest-based
//! resume.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::mpsc;

use rayon::prelude::*;
use twinbench_core::data::{
    combine_modalities, load_csv, stratified_kfold, Dataset, FoldPlan, Modality,
};
use twinbench_core::eval::{grid_evaluate_with, rank_features, CellSpec};
use twinbench_core::featsel::{Criterion, Ranking};
use twinbench_core::rng::derive_seed;
use twinbench_core::{Error, Result};

use crate::config::ExperimentConfig;
use crate::models::{expand_grid, ClassifierId};
use crate::store::{cell_path, GridPointSummary, ResultsStore, RunMeta, StoredCell};

const PLAN_TAG: u64 = 0;
const RANK_TAG: u64 = 1;
const CELL_TAG: u64 = 2;

fn matter_code(m: Modality) -> u64 {
    match m {
        Modality::GM => 0,
        Modality::WM => 1,
        Modality::CM => 2,
    }
}

fn criterion_code(c: Criterion) -> u64 {
    Criterion::ALL.iter().position(|x| *x == c).expect("criterion in ALL") as u64
}

fn classifier_code(id: ClassifierId) -> u64 {
    ClassifierId::LINEAR_ORDER
        .into_iter()
        .chain(ClassifierId::NONLINEAR_ORDER)
        .position(|x| x == id)
        .expect("classifier in roster") as u64
}

#[derive(Debug)]
pub struct RunOutcome {
    pub completed: usize,
    pub skipped: usize,
    pub failed: usize,
}

struct MatterSlice {
    ds: Dataset,
    plan: FoldPlan,
}

/// Identity fallback for folds `cross_validate` will skip anyway (single
/// class in training data).
fn placeholder_ranking(d: usize, criterion: Criterion) -> Ranking {
    Ranking::new((0..d).collect(), vec![0.0; d], criterion, Vec::new())
        .expect("identity ranking is valid")
}

fn load_matters(cfg: &ExperimentConfig, seed: u64) -> Result<BTreeMap<u64, MatterSlice>> {
    let gm = match &cfg.gm {
        Some(p) => Some(load_csv(p, &cfg.label_column)?),
        None => None,
    };
    let wm = match &cfg.wm {
        Some(p) => {
            let mut ds = load_csv(p, &cfg.label_column)?;
            ds.modality = Modality::WM;
            Some(ds)
        }
        None => None,
    };
    let mut out = BTreeMap::new();
    for matter in cfg.matters() {
        let ds = match matter {
            Modality::GM => gm.clone().ok_or_else(|| Error::Data("gm path missing".into()))?,
            Modality::WM => wm.clone().ok_or_else(|| Error::Data("wm path missing".into()))?,
            Modality::CM => {
                let g = gm.as_ref().ok_or_else(|| Error::Data("gm path missing".into()))?;
                let w = wm.as_ref().ok_or_else(|| Error::Data("wm path missing".into()))?;
                combine_modalities(g, w)?
            }
        };
        let plan = stratified_kfold(&ds, cfg.folds, derive_seed(seed, &[PLAN_TAG, matter_code(matter)]))?;
        out.insert(matter_code(matter), MatterSlice { ds, plan });
    }
    Ok(out)
}

/// One ranking per fold for a (matter, criterion) slice. With `rank_on_full`
/// every fold shares the whole-data ranking, the paper-parity shortcut.
fn slice_rankings(
    slice: &MatterSlice,
    criterion: Criterion,
    rank_on_full: bool,
    seed: u64,
    m_code: u64,
) -> Result<Vec<Ranking>> {
    let c_code = criterion_code(criterion);
    if rank_on_full {
        let full = rank_features(
            &slice.ds,
            criterion,
            derive_seed(seed, &[RANK_TAG, m_code, c_code]),
        )?;
        return Ok(vec![full; slice.plan.k]);
    }
    (0..slice.plan.k)
        .map(|fold| {
            let train_idx = slice.plan.train_indices(fold);
            let has_pos = train_idx.iter().any(|&i| slice.ds.y[i] == 1);
            let has_neg = train_idx.iter().any(|&i| slice.ds.y[i] == -1);
            if !has_pos || !has_neg {
                return Ok(placeholder_ranking(slice.ds.d(), criterion));
            }
            let train = slice.ds.subset_rows(&train_idx)?;
            rank_features(
                &train,
                criterion,
                derive_seed(seed, &[RANK_TAG, m_code, c_code, fold as u64]),
            )
        })
        .collect()
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path, jobs: Option<usize>, resume: bool) -> Result<RunOutcome> {
    cfg.validate()?;
    let seed = cfg.effective_seed()?;
    let meta = RunMeta {
        seed,
        standardize: cfg.standardize,
        rank_on_full: cfg.rank_on_full,
        folds: cfg.folds,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let mut store = if resume {
        ResultsStore::open_or_create(out_dir, meta)?
    } else {
        ResultsStore::create(out_dir, meta)?
    };

    let matters = load_matters(cfg, seed)?;
    let criteria = cfg.criteria();
    let classifiers = cfg.classifiers();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParam(format!("worker pool: {e}")))?;

    // Rankings are shared across every classifier and feature count of the
    // same slice, so compute each slice once up front.
    let slice_keys: Vec<(u64, Criterion)> = matters
        .keys()
        .flat_map(|&m| criteria.iter().map(move |&c| (m, c)))
        .collect();
    let rankings: BTreeMap<(u64, u64), Vec<Ranking>> = pool.install(|| {
        slice_keys
            .par_iter()
            .map(|&(m_code, criterion)| {
                let slice = &matters[&m_code];
                let r = slice_rankings(slice, criterion, cfg.rank_on_full, seed, m_code)?;
                Ok(((m_code, criterion_code(criterion)), r))
            })
            .collect::<Result<_>>()
    })?;

    struct Coord {
        m_code: u64,
        criterion: Criterion,
        count: usize,
        id: ClassifierId,
        rel: String,
    }
    let mut coords = Vec::new();
    let mut skipped = 0usize;
    for (&m_code, slice) in &matters {
        for &criterion in &criteria {
            for &count in &cfg.feature_counts {
                for &id in &classifiers {
                    let rel = cell_path(slice.ds.modality, criterion, count, id);
                    if resume && store.is_current(&rel) {
                        skipped += 1;
                        continue;
                    }
                    coords.push(Coord { m_code, criterion, count, id, rel });
                }
            }
        }
    }

    let (tx, rx) = mpsc::channel::<(String, std::result::Result<StoredCell, String>)>();
    let mut completed = 0usize;
    let mut failed = 0usize;
    pool.in_place_scope(|scope| {
        scope.spawn(move |_| {
            coords.par_iter().for_each_with(tx, |tx, coord| {
                let slice = &matters[&coord.m_code];
                let outcome = (|| {
                    let grid = expand_grid(coord.id, &cfg.grid_for(coord.id));
                    let spec = CellSpec {
                        classifier: coord.id.name().to_string(),
                        criterion: coord.criterion,
                        feature_count: coord.count,
                        standardize: cfg.standardize,
                        rank_on_full: cfg.rank_on_full,
                        seed: derive_seed(
                            seed,
                            &[
                                CELL_TAG,
                                coord.m_code,
                                criterion_code(coord.criterion),
                                coord.count as u64,
                                classifier_code(coord.id),
                            ],
                        ),
                    };
                    let shared = &rankings[&(coord.m_code, criterion_code(coord.criterion))];
                    let out = grid_evaluate_with(&slice.ds, &slice.plan, &spec, &grid, Some(shared))?;
                    let grid_summary = out
                        .cells
                        .iter()
                        .map(|c| GridPointSummary {
                            hyperparameters: c.hyperparameters.clone(),
                            mean_accuracy: c.mean.set.accuracy,
                        })
                        .collect();
                    Ok::<_, Error>(StoredCell { best: out.best().clone(), grid: grid_summary })
                })();
                let msg = match outcome {
                    Ok(cell) => Ok(cell),
                    Err(e) => Err(e.to_string()),
                };
                let _ = tx.send((coord.rel.clone(), msg));
            });
        });
        for (rel, outcome) in rx {
            match outcome {
                Ok(cell) => {
                    store.write_cell(&rel, &cell)?;
                    completed += 1;
                }
                Err(msg) => {
                    store.record_error(&rel, &msg);
                    failed += 1;
                }
            }
            store.flush()?;
        }
        Ok::<(), Error>(())
    })?;
    store.flush()?;
    Ok(RunOutcome { completed, skipped, failed })
}
