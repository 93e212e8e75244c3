//! Results tables: one CSV per (matter, feature count, metric, table half),
//! mirroring the paper's layout of classifier rows × criterion columns.

use twinbench_core::data::Modality;
use twinbench_core::eval::MetricSet;
use twinbench_core::featsel::Criterion;
use twinbench_core::Result;

use crate::models::{ClassifierId, TableHalf};
use crate::store::{cell_path, ResultsStore};

/// File stem per metric; accuracy keeps the paper's `results` stem.
pub const METRIC_STEMS: [&str; 7] =
    ["results", "auc", "sensitivity", "specificity", "precision", "fmeasure", "gmean"];

pub fn header() -> String {
    let mut cols = vec!["Methods".to_string()];
    cols.extend(Criterion::ALL.iter().map(|c| c.to_string()));
    cols.join(",")
}

fn format_cell(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{:.2}", v * 100.0)
    }
}

fn rows_for(half: TableHalf) -> Vec<ClassifierId> {
    match half {
        TableHalf::Linear => ClassifierId::LINEAR_ORDER.to_vec(),
        TableHalf::NonLinear => ClassifierId::NONLINEAR_ORDER.to_vec(),
    }
}

fn half_suffix(half: TableHalf) -> &'static str {
    match half {
        TableHalf::Linear => "lin",
        TableHalf::NonLinear => "nl",
    }
}

/// Emit the 7-metric × 2-half table files for one (matter, count). Returns
/// the written paths; rows with no cells at all are dropped, individual
/// missing cells become blanks with a warning on stderr.
pub fn emit_tables(store: &mut ResultsStore, matter: Modality, count: usize) -> Result<Vec<String>> {
    let mut cells: Vec<(ClassifierId, Vec<Option<MetricSet>>)> = Vec::new();
    for id in ClassifierId::LINEAR_ORDER.into_iter().chain(ClassifierId::NONLINEAR_ORDER) {
        let row: Vec<Option<MetricSet>> = Criterion::ALL
            .iter()
            .map(|&criterion| {
                let rel = cell_path(matter, criterion, count, id);
                store.is_current(&rel).then(|| store.read_cell(&rel).map(|c| c.best.mean.set))
            })
            .map(|r| r.transpose())
            .collect::<Result<_>>()?;
        if row.iter().any(Option::is_some) {
            cells.push((id, row));
        }
    }

    let mut written = Vec::new();
    for (metric_idx, stem) in METRIC_STEMS.iter().enumerate() {
        for half in [TableHalf::Linear, TableHalf::NonLinear] {
            let mut out = String::new();
            out.push_str(&header());
            out.push('\n');
            for id in rows_for(half) {
                let Some((_, row)) = cells.iter().find(|(c, _)| *c == id) else {
                    continue;
                };
                out.push_str(id.name());
                for (criterion, set) in Criterion::ALL.iter().zip(row) {
                    out.push(',');
                    match set {
                        Some(set) => out.push_str(&format_cell(set.as_array()[metric_idx])),
                        None => eprintln!(
                            "warning: no cell for {} / {criterion} at {matter} {count}",
                            id.name()
                        ),
                    }
                }
                out.push('\n');
            }
            let rel = format!("{matter}_{count}_{stem}_{}.csv", half_suffix(half));
            store.write_file(&rel, out.as_bytes())?;
            written.push(rel);
        }
    }
    store.flush()?;
    Ok(written)
}
