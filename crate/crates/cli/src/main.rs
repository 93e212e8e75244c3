use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twinbench_core::data::{load_csv, Modality};
use twinbench_core::eval::rank_features;
use twinbench_core::featsel::Criterion;
use twinbench_core::stats::{
    friedman_chi2, iman_davenport, nemenyi_cd, q_alpha_05, rank_algorithms, significant_pairs,
};
use twinbench_core::{Error, Matrix, Result};
use twinbench_cli::config::ExperimentConfig;
use twinbench_cli::curves::{emit_curves, Grouping};
use twinbench_cli::runner;
use twinbench_cli::store::ResultsStore;
use twinbench_cli::tables::emit_tables;

#[derive(Parser)]
#[command(name = "twinbench", version, about = "Classifier × feature-selection benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the matter × criterion × feature-count × classifier lattice.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Skip cells already present with matching hashes.
        #[arg(long)]
        resume: bool,
    },
    /// Rank the features of one data file by a selection criterion.
    Rank {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        criterion: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "label")]
        label_column: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Friedman, Iman-Davenport and Nemenyi analysis of a score matrix
    /// (rows = selection methods, columns = classifiers).
    Stats {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit the table and curve files for one matter and feature count.
    Report {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        matter: String,
        #[arg(long)]
        features: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run { config, out, jobs, resume } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let out_dir = out.unwrap_or_else(|| cfg.out_dir.clone());
            let outcome = runner::run(&cfg, &out_dir, jobs, resume)?;
            println!(
                "completed {} cells, skipped {}, failed {}",
                outcome.completed, outcome.skipped, outcome.failed
            );
            if outcome.failed > 0 {
                eprintln!("some cells failed; see the manifest error list");
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Rank { data, criterion, out, label_column, seed } => {
            let criterion: Criterion = criterion.parse()?;
            let seed = match std::env::var("TWINBENCH_SEED") {
                Ok(v) => v.parse::<u64>().map_err(|_| {
                    Error::InvalidParam(format!("TWINBENCH_SEED must be a u64, got {v:?}"))
                })?,
                Err(_) => seed,
            };
            let ds = load_csv(&data, &label_column)?;
            let ranking = rank_features(&ds, criterion, seed)?;
            let mut csv = String::from("rank,feature,score\n");
            for (pos, &j) in ranking.order.iter().enumerate() {
                csv.push_str(&format!("{},{},{}\n", pos + 1, ds.feature_ids[j], ranking.scores[j]));
            }
            write_file(&out, csv.as_bytes())?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { scores, alpha, out } => run_stats(&scores, alpha, &out),
        Command::Report { store, matter, features } => {
            let matter: Modality = matter.parse()?;
            let mut store = ResultsStore::open(&store)?;
            let mut written = emit_tables(&mut store, matter, features)?;
            for grouping in [Grouping::ByFamily, Grouping::ByCriterion, Grouping::ByMatter] {
                written.extend(emit_curves(&mut store, grouping)?);
            }
            for rel in &written {
                println!("wrote {}", store.root().join(rel).display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::Data(format!("{}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, bytes).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

/// Scores CSV: header `method,<classifier names>`, one row per selection
/// method; empty or `NaN` cells mark missing scores.
fn read_scores(path: &Path) -> Result<(Vec<String>, Vec<String>, Matrix)> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let classifiers: Vec<String> =
        reader.headers().map_err(|e| Error::Data(e.to_string()))?.iter().skip(1).map(String::from).collect();
    if classifiers.is_empty() {
        return Err(Error::Data("scores file needs at least one classifier column".into()));
    }
    let mut rows = Vec::new();
    let mut methods = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Data(e.to_string()))?;
        if record.len() != classifiers.len() + 1 {
            return Err(Error::Data(format!(
                "row {} has {} cells, expected {}",
                methods.len() + 2,
                record.len(),
                classifiers.len() + 1
            )));
        }
        methods.push(record[0].to_string());
        let mut row = Vec::with_capacity(classifiers.len());
        for cell in record.iter().skip(1) {
            let cell = cell.trim();
            if cell.is_empty() || cell.eq_ignore_ascii_case("nan") {
                row.push(f64::NAN);
            } else {
                row.push(cell.parse::<f64>().map_err(|_| {
                    Error::Data(format!("non-numeric score {cell:?} in {}", path.display()))
                })?);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Data("scores file has no data rows".into()));
    }
    let mut m = Matrix::zeros(rows.len(), classifiers.len());
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    Ok((methods, classifiers, m))
}

fn run_stats(scores_path: &Path, alpha: f64, out: &Path) -> Result<ExitCode> {
    if (alpha - 0.05).abs() > 1e-12 {
        return Err(Error::InvalidParam(format!(
            "only alpha = 0.05 is supported (built-in critical value table), got {alpha}"
        )));
    }
    let (methods, classifiers, scores) = read_scores(scores_path)?;
    let rm = rank_algorithms(&scores)?;
    for &i in &rm.dropped_rows {
        eprintln!("warning: dropped row {:?} (missing scores)", methods[i]);
    }
    let n = rm.n();
    let k = rm.k();
    if n < 10 {
        eprintln!(
            "note: N = {n} comparison rows; the chi-square approximation is unreliable for N < 10"
        );
    }
    let chi2 = friedman_chi2(&rm)?;
    let f_f = match iman_davenport(chi2, n, k) {
        Ok(v) => Some(v),
        Err(e) => {
            eprintln!("warning: Iman-Davenport statistic undefined: {e}");
            None
        }
    };
    let q = q_alpha_05(k)?;
    let cd = nemenyi_cd(k, n, q)?;
    let pairs = significant_pairs(&rm, cd);

    let mut pairs_csv = String::from("method_a,method_b,rank_a,rank_b,difference\n");
    for &(i, j) in &pairs {
        pairs_csv.push_str(&format!(
            "{},{},{:.4},{:.4},{:.4}\n",
            classifiers[i],
            classifiers[j],
            rm.avg_ranks[i],
            rm.avg_ranks[j],
            (rm.avg_ranks[i] - rm.avg_ranks[j]).abs()
        ));
    }
    write_file(&out.join("significant_pairs.csv"), pairs_csv.as_bytes())?;

    let mut ranks_csv = String::from("classifier,average_rank\n");
    for (name, r) in classifiers.iter().zip(&rm.avg_ranks) {
        ranks_csv.push_str(&format!("{name},{r:.4}\n"));
    }
    write_file(&out.join("average_ranks.csv"), ranks_csv.as_bytes())?;

    let summary = serde_json::json!({
        "n": n,
        "k": k,
        "chi2": chi2,
        "iman_davenport": f_f,
        "q_alpha": q,
        "critical_difference": cd,
        "significant_pairs": pairs.len(),
    });
    let summary_text = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Data(format!("serialize summary: {e}")))?;
    write_file(&out.join("stats_summary.json"), summary_text.as_bytes())?;

    println!("N = {n}, k = {k}");
    println!("Friedman chi2 = {chi2:.4}");
    match f_f {
        Some(v) => println!("Iman-Davenport F = {v:.4}"),
        None => println!("Iman-Davenport F = undefined (chi2 at pole)"),
    }
    println!("Nemenyi CD (alpha 0.05) = {cd:.4}");
    println!("{} significant pair(s)", pairs.len());
    Ok(ExitCode::SUCCESS)
}
