//! Accuracy-vs-feature-count curves, averaged over the complementary lattice
//! axes, as CSV plus a standalone SVG per file.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use twinbench_core::data::Modality;
use twinbench_core::{Error, Result};

use crate::models::ClassifierId;
use crate::store::ResultsStore;
use crate::svg::{line_chart, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    ByFamily,
    ByCriterion,
    ByMatter,
}

impl std::str::FromStr for Grouping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "by_family" => Ok(Grouping::ByFamily),
            "by_criterion" => Ok(Grouping::ByCriterion),
            "by_matter" => Ok(Grouping::ByMatter),
            other => Err(Error::InvalidParam(format!(
                "unknown grouping {other:?}; use by_family, by_criterion or by_matter"
            ))),
        }
    }
}

/// Classifier families, following the paper's prose: the SVM family, the RaF
/// family, the network family, and KNN and KRR on their own.
pub fn family(id: ClassifierId) -> &'static str {
    use ClassifierId::*;
    match id {
        SvmLin | SvmNl | TwsvmLin | TwsvmNl | TbsvmLin | TbsvmNl | LstsvmLin | LstsvmNl
        | RelstsvmLin | RelstsvmNl | PinGtsvm => "SVM-family",
        Raf | MpRafT | MpRafP | MpRafN | HetRaf | RafLda | RafPca => "RaF-family",
        Neural | Rvfl | RvflAe => "Networks",
        Knn => "KNN",
        KrrLin | KrrNl => "KRR",
    }
}

struct Loaded {
    matter: Modality,
    criterion: String,
    count: usize,
    classifier: ClassifierId,
    accuracy: f64,
}

fn load_cells(store: &ResultsStore) -> Result<Vec<Loaded>> {
    let mut out = Vec::new();
    for rel in store.manifest().files.keys() {
        if !rel.starts_with("cells/") {
            continue;
        }
        let cell = store.read_cell(rel)?.best;
        out.push(Loaded {
            matter: cell.matter,
            criterion: cell.criterion.to_string(),
            count: cell.feature_count,
            classifier: cell.classifier.parse()?,
            accuracy: cell.mean.set.accuracy,
        });
    }
    Ok(out)
}

/// Mean of the finite accuracies, in percent; NaN when none.
fn percent_mean(values: &[f64]) -> f64 {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        f64::NAN
    } else {
        100.0 * finite.iter().sum::<f64>() / finite.len() as f64
    }
}

fn write_curve_files(
    store: &mut ResultsStore,
    stem: &str,
    title: &str,
    counts: &[usize],
    columns: &[(String, Vec<f64>)],
) -> Result<Vec<String>> {
    let mut csv = String::new();
    csv.push_str("features");
    for (name, _) in columns {
        csv.push(',');
        csv.push_str(name);
    }
    csv.push('\n');
    for (i, count) in counts.iter().enumerate() {
        csv.push_str(&count.to_string());
        for (_, values) in columns {
            csv.push(',');
            if values[i].is_nan() {
                csv.push_str("NaN");
            } else {
                csv.push_str(&format!("{}", values[i]));
            }
        }
        csv.push('\n');
    }
    let csv_rel = format!("{stem}.csv");
    store.write_file(&csv_rel, csv.as_bytes())?;

    let series: Vec<Series> = columns
        .iter()
        .map(|(name, values)| Series {
            name: name.clone(),
            points: counts.iter().map(|&c| c as f64).zip(values.iter().copied()).collect(),
        })
        .collect();
    let svg = line_chart(title, "selected features", "mean accuracy (%)", &series);
    let svg_rel = format!("{stem}.svg");
    store.write_file(&svg_rel, svg.as_bytes())?;
    Ok(vec![csv_rel, svg_rel])
}

/// Emit the grouping's CSV (x = feature count, one column per group) and its
/// SVG chart. `by_family` and `by_criterion` produce one pair per matter.
pub fn emit_curves(store: &mut ResultsStore, grouping: Grouping) -> Result<Vec<String>> {
    let cells = load_cells(store)?;
    if cells.is_empty() {
        return Err(Error::Data("store has no cells".into()));
    }
    let counts: Vec<usize> = cells.iter().map(|c| c.count).collect::<BTreeSet<_>>().into_iter().collect();
    let matters: Vec<Modality> = [Modality::GM, Modality::WM, Modality::CM]
        .into_iter()
        .filter(|m| cells.iter().any(|c| c.matter == *m))
        .collect();

    let mut written = Vec::new();
    match grouping {
        Grouping::ByMatter => {
            let columns: Vec<(String, Vec<f64>)> = matters
                .iter()
                .map(|&m| {
                    let values = counts
                        .iter()
                        .map(|&count| {
                            let acc: Vec<f64> = cells
                                .iter()
                                .filter(|c| c.matter == m && c.count == count)
                                .map(|c| c.accuracy)
                                .collect();
                            percent_mean(&acc)
                        })
                        .collect();
                    (m.to_string(), values)
                })
                .collect();
            written.extend(write_curve_files(
                store,
                "curves_by_matter",
                "Average accuracy by matter",
                &counts,
                &columns,
            )?);
        }
        Grouping::ByFamily | Grouping::ByCriterion => {
            for &m in &matters {
                let groups: Vec<String> = match grouping {
                    Grouping::ByFamily => {
                        let mut set = BTreeSet::new();
                        for c in cells.iter().filter(|c| c.matter == m) {
                            set.insert(group_of(grouping, c).to_string());
                        }
                        set.into_iter().collect()
                    }
                    _ => {
                        // keep the paper's criterion column order
                        let present: BTreeSet<String> = cells
                            .iter()
                            .filter(|c| c.matter == m)
                            .map(|c| c.criterion.clone())
                            .collect();
                        twinbench_core::featsel::Criterion::ALL
                            .iter()
                            .map(|c| c.to_string())
                            .filter(|c| present.contains(c))
                            .collect()
                    }
                };
                let columns: Vec<(String, Vec<f64>)> = groups
                    .into_iter()
                    .map(|g| {
                        let values = counts
                            .iter()
                            .map(|&count| {
                                let acc: Vec<f64> = cells
                                    .iter()
                                    .filter(|c| {
                                        c.matter == m
                                            && c.count == count
                                            && group_of(grouping, c) == g
                                    })
                                    .map(|c| c.accuracy)
                                    .collect();
                                percent_mean(&acc)
                            })
                            .collect();
                        (g, values)
                    })
                    .collect();
                let kind = match grouping {
                    Grouping::ByFamily => "family",
                    _ => "criterion",
                };
                let stem = format!("curves_by_{kind}_{m}");
                let title = format!("Average accuracy by {kind} ({m})");
                written.extend(write_curve_files(store, &stem, &title, &counts, &columns)?);
            }
        }
    }
    store.flush()?;
    Ok(written)
}

fn group_of(grouping: Grouping, cell: &Loaded) -> String {
    match grouping {
        Grouping::ByFamily => family(cell.classifier).to_string(),
        Grouping::ByCriterion => cell.criterion.clone(),
        Grouping::ByMatter => cell.matter.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use twinbench_core::eval::{CellResult, MeanMetrics, MetricSet};
    use twinbench_core::featsel::Criterion;

    use crate::store::{cell_path, GridPointSummary, RunMeta, StoredCell};

    fn put(
        store: &mut ResultsStore,
        matter: Modality,
        criterion: Criterion,
        count: usize,
        id: ClassifierId,
        accuracy: f64,
    ) {
        let set = MetricSet::from_array([accuracy, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5]);
        let cell = StoredCell {
            best: CellResult {
                classifier: id.name().into(),
                criterion,
                feature_count: count,
                matter,
                hyperparameters: "x".into(),
                fold_metrics: vec![Some(set)],
                mean: MeanMetrics { set, excluded: [0; 7], folds_used: 1 },
            },
            grid: vec![GridPointSummary { hyperparameters: "x".into(), mean_accuracy: accuracy }],
        };
        store.write_cell(&cell_path(matter, criterion, count, id), &cell).unwrap();
    }

    fn test_store(dir: &std::path::Path) -> ResultsStore {
        ResultsStore::create(
            dir,
            RunMeta { seed: 0, standardize: true, rank_on_full: false, folds: 10, version: "t".into() },
        )
        .unwrap()
    }

    #[test]
    fn degenerate_average_equals_cell_accuracy() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = test_store(dir.path());
        put(&mut store, Modality::GM, Criterion::TTest, 100, ClassifierId::Knn, 0.625);
        put(&mut store, Modality::GM, Criterion::TTest, 200, ClassifierId::Knn, 0.75);
        emit_curves(&mut store, Grouping::ByFamily).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("curves_by_family_GM.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "features,KNN");
        assert_eq!(lines[1], "100,62.5");
        assert_eq!(lines[2], "200,75");
        assert!(dir.path().join("curves_by_family_GM.svg").exists());
    }

    #[test]
    fn group_means_match_independent_recompute() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = test_store(dir.path());
        let members = [
            (ClassifierId::TwsvmLin, 0.71),
            (ClassifierId::RelstsvmNl, 0.77),
            (ClassifierId::PinGtsvm, 0.62),
        ];
        for (id, acc) in members {
            put(&mut store, Modality::CM, Criterion::Wilcoxon, 100, id, acc);
            put(&mut store, Modality::CM, Criterion::Nca, 100, id, acc / 2.0);
        }
        put(&mut store, Modality::CM, Criterion::Wilcoxon, 100, ClassifierId::Raf, 0.9);
        emit_curves(&mut store, Grouping::ByFamily).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("curves_by_family_CM.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "features,RaF-family,SVM-family");
        let row: Vec<&str> = lines[1].split(',').collect();
        let raf: f64 = row[1].parse().unwrap();
        let svm: f64 = row[2].parse().unwrap();
        let expect_svm =
            100.0 * (0.71 + 0.77 + 0.62 + 0.355 + 0.385 + 0.31) / 6.0;
        assert!((svm - expect_svm).abs() < 1e-9, "{svm} vs {expect_svm}");
        assert!((raf - 90.0).abs() < 1e-9);
    }

    #[test]
    fn by_matter_and_by_criterion_layouts() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = test_store(dir.path());
        put(&mut store, Modality::GM, Criterion::TTest, 100, ClassifierId::Knn, 0.6);
        put(&mut store, Modality::WM, Criterion::Roc, 100, ClassifierId::Knn, 0.8);
        emit_curves(&mut store, Grouping::ByMatter).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("curves_by_matter.csv")).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "features,GM,WM");

        emit_curves(&mut store, Grouping::ByCriterion).unwrap();
        let gm = std::fs::read_to_string(dir.path().join("curves_by_criterion_GM.csv")).unwrap();
        assert_eq!(gm.lines().next().unwrap(), "features,T-Test");
    }
}
