//! Acceptance gate: ten end-to-end checks, one per shipping criterion.
//! Each test prints a single PASS/FAIL line (visible with --nocapture).

use std::collections::HashSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use twinbench_core::data::{stratified_kfold, Dataset, Modality};
use twinbench_core::eval::{
    confusion, cross_validate, metrics, rank_features, CellResult, CellSpec, MeanMetrics,
    MetricSet,
};
use twinbench_core::featsel::{rank_by_criterion, Criterion};
use twinbench_core::kernels::{gram, KernelSpec};
use twinbench_core::matrix::Matrix;
use twinbench_core::numkit::{solve_box_qp, BoxQp, RIDGE_FALLBACK};
use twinbench_core::rng::{derive_seed, rng_from_seed};
use twinbench_core::shallow::{train_krr, train_rvfl};
use twinbench_core::stats::{iman_davenport, nemenyi_cd, q_alpha_05};
use twinbench_core::svmfam::{
    train_lstsvm, train_relstsvm, train_tbsvm, train_twsvm, TwinClassifier,
};
use twinbench_cli::config::ExperimentConfig;
use twinbench_cli::models::{reference_point, ClassifierId, GridOverride};
use twinbench_cli::runner;
use twinbench_cli::store::{cell_path, ResultsStore, RunMeta, StoredCell};
use twinbench_cli::tables::emit_tables;

fn check(num: u8, name: &str, body: impl FnOnce()) {
    let outcome = panic::catch_unwind(AssertUnwindSafe(body));
    match outcome {
        Ok(()) => println!("criterion {num:02}: PASS  {name}"),
        Err(e) => {
            println!("criterion {num:02}: FAIL  {name}");
            panic::resume_unwind(e);
        }
    }
}

fn gauss(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Two Gaussian blobs, +1 class first, centered at +-sep/2 per coordinate.
fn blobs(n_per_class: usize, d: usize, sep: f64, seed: u64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let n = 2 * n_per_class;
    let mut data = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for class in [1i8, -1i8] {
        let center = f64::from(class) * sep / 2.0;
        for _ in 0..n_per_class {
            for _ in 0..d {
                data.push(center + gauss(&mut rng));
            }
            y.push(class);
        }
    }
    let ids = (0..d).map(|j| format!("f{j}")).collect();
    Dataset::new(Matrix::from_vec(n, d, data).unwrap(), y, ids, Modality::GM).unwrap()
}

#[test]
fn criterion_01() {
    check(1, "published statistics example", || {
        let t0 = Instant::now();
        let ff = iman_davenport(54.48, 7, 12).unwrap();
        let q = q_alpha_05(12).unwrap();
        let cd = nemenyi_cd(12, 7, q).unwrap();
        let elapsed = t0.elapsed();
        assert!((ff - 14.52).abs() <= 0.01, "F_F = {ff}");
        assert_eq!(q, 3.268);
        assert!((cd - 6.30).abs() <= 0.01, "CD = {cd}");
        assert!(elapsed < Duration::from_millis(1), "took {elapsed:?}");
    });
}

fn qp_objective5(m: &Matrix, q: &[f64], x: &[f64; 5]) -> f64 {
    let mut acc = 0.0;
    for i in 0..5 {
        let mut mi = 0.0;
        for j in 0..5 {
            mi += m.get(i, j) * x[j];
        }
        acc += x[i] * (0.5 * mi - q[i]);
    }
    acc
}

/// 1-D nested grid refinement for coordinate `j` over its original interval.
/// In one dimension the 5-point argmin of a convex function is within one
/// cell of the true minimizer, so shrinking to +-1.5 cells never loses it.
fn line_refine(m: &Matrix, q: &[f64], x: &mut [f64; 5], j: usize, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut best_t = x[j].clamp(a, b);
    x[j] = best_t;
    let mut best_f = qp_objective5(m, q, x);
    for _ in 0..60 {
        let cell = (b - a) / 4.0;
        for p in 0..5 {
            let t = a + cell * p as f64;
            x[j] = t;
            let f = qp_objective5(m, q, x);
            if f < best_f {
                best_f = f;
                best_t = t;
            }
        }
        a = (best_t - 1.5 * cell).max(lo);
        b = (best_t + 1.5 * cell).min(hi);
    }
    x[j] = best_t;
    best_f
}

/// Nested grid refinement: a 5^5 lattice shrunk to +-1.5 cells around the
/// incumbent per pass to find the basin, then cyclic per-coordinate 1-D
/// refinement sweeps, which for a strictly convex box QP converge to the
/// global minimum from any starting point.
fn grid_refine_qp(m: &Matrix, q: &[f64], lower: &[f64], upper: &[f64]) -> f64 {
    const POINTS: usize = 5;
    let mut lo = lower.to_vec();
    let mut hi = upper.to_vec();
    let mut best_x = [0.0; 5];
    for i in 0..5 {
        best_x[i] = 0.5 * (lo[i] + hi[i]);
    }
    let mut best_f = qp_objective5(m, q, &best_x);
    for _ in 0..48 {
        let mut idx = [0usize; 5];
        loop {
            let mut x = [0.0; 5];
            for i in 0..5 {
                x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] as f64 / (POINTS - 1) as f64;
            }
            let f = qp_objective5(m, q, &x);
            if f < best_f {
                best_f = f;
                best_x = x;
            }
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < POINTS {
                    break;
                }
                idx[d] = 0;
                d += 1;
                if d == 5 {
                    break;
                }
            }
            if d == 5 {
                break;
            }
        }
        for i in 0..5 {
            let cell = (hi[i] - lo[i]) / (POINTS - 1) as f64;
            lo[i] = (best_x[i] - 1.5 * cell).max(lower[i]);
            hi[i] = (best_x[i] + 1.5 * cell).min(upper[i]);
        }
    }

    let mut stalled = 0;
    for _ in 0..30_000 {
        let before = best_f;
        for j in 0..5 {
            best_f = line_refine(m, q, &mut best_x, j, lower[j], upper[j]);
        }
        stalled = if before - best_f < 1e-14 { stalled + 1 } else { 0 };
        if stalled >= 3 {
            break;
        }
    }
    best_f
}

#[test]
fn criterion_02() {
    check(2, "box QP grid-refinement oracle", || {
        let mut rng = rng_from_seed(0xacc2);
        let t0 = Instant::now();
        for trial in 0..200 {
            let r_data: Vec<f64> = (0..25).map(|_| gauss(&mut rng)).collect();
            let r = Matrix::from_vec(5, 5, r_data).unwrap();
            let m = r.t_matmul(&r).unwrap();
            let q: Vec<f64> = (0..5).map(|_| 3.0 * gauss(&mut rng)).collect();
            let c = 0.5 + gauss(&mut rng).abs();
            let lower = vec![0.0; 5];
            let upper = vec![c; 5];

            let qp = BoxQp::zero_to_c(m.clone(), q.clone(), c).unwrap();
            let sol = solve_box_qp(&qp, 1e-8, 50_000).unwrap();
            let oracle = grid_refine_qp(&m, &q, &lower, &upper);
            assert!(
                (sol.objective - oracle).abs() <= 1e-6,
                "trial {trial}: solver {} vs oracle {}",
                sol.objective,
                oracle
            );
        }
        let elapsed = t0.elapsed();
        assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    });
}

fn assert_planes_close(a: &TwinClassifier, b: &TwinClassifier, tol: f64, tag: &str) {
    for (pa, pb) in [(&a.plane1, &b.plane1), (&a.plane2, &b.plane2)] {
        assert_eq!(pa.w.len(), pb.w.len(), "{tag}: weight lengths");
        for (x, y) in pa.w.iter().zip(&pb.w) {
            assert!((x - y).abs() <= tol, "{tag}: w {x} vs {y}");
        }
        assert!((pa.b - pb.b).abs() <= tol, "{tag}: b {} vs {}", pa.b, pb.b);
    }
}

#[test]
fn criterion_03() {
    check(3, "twin-SVM reduction identities", || {
        let t0 = Instant::now();
        let mut rng = rng_from_seed(0xacc3);
        let penalties = [0.1, 1.0, 10.0];
        for trial in 0..50u64 {
            let n_per = 4 + (trial as usize % 4);
            let d = 2 + (trial as usize % 3);
            let sep = 1.0 + 0.02 * trial as f64;
            let ds = blobs(n_per, d, sep, derive_seed(77, &[trial]));
            let kernel = if trial % 3 == 0 {
                KernelSpec::gaussian(0.5).unwrap()
            } else {
                KernelSpec::Linear
            };

            let c1 = penalties[rng.gen_range(0..3)];
            let c2 = penalties[rng.gen_range(0..3)];
            let tw = train_twsvm(&ds, c1, c2, kernel).unwrap();
            let tb = train_tbsvm(&ds, c1, 0.0, c2, 0.0, kernel).unwrap();
            assert_planes_close(&tw, &tb, 1e-8, &format!("trial {trial} twsvm"));

            let ls = train_lstsvm(&ds, 1.0, 1.0, kernel).unwrap();
            let re = train_relstsvm(&ds, 1.0, 0.0, 1.0, 0.0, &[1.0], &[1.0], kernel).unwrap();
            assert_planes_close(&ls, &re, 1e-8, &format!("trial {trial} lstsvm"));
        }
        let elapsed = t0.elapsed();
        assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    });
}

fn stacked(ds: &Dataset, label: i8) -> Matrix {
    let rows = ds.class_indices(label);
    ds.x.select_rows(&rows).unwrap().augment_ones()
}

fn residual_norm(a: &Matrix, x: &[f64], rhs: &[f64]) -> f64 {
    let ax = a.matvec(x).unwrap();
    ax.iter()
        .zip(rhs)
        .map(|(l, r)| (l - r) * (l - r))
        .sum::<f64>()
        .sqrt()
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[test]
fn criterion_04() {
    check(4, "closed-form system residuals", || {
        // LSTSVM: (G'G + (1/c1) H'H + rI)(-u1) = G'e and the plane-2 mirror
        let ds = blobs(10, 4, 2.0, 401);
        let (c1, c2) = (2.0, 0.7);
        let model = train_lstsvm(&ds, c1, c2, KernelSpec::Linear).unwrap();
        let h = stacked(&ds, 1);
        let g = stacked(&ds, -1);
        let (h_gram, g_gram) = (h.gram_self(), g.gram_self());

        let mut a1 = g_gram.clone();
        a1.add_scaled(&h_gram, 1.0 / c1).unwrap();
        a1.add_ridge(RIDGE_FALLBACK);
        let mut u1: Vec<f64> = model.plane1.w.iter().map(|w| -w).collect();
        u1.push(-model.plane1.b);
        let rhs1 = g.t_matvec(&vec![1.0; g.rows()]).unwrap();
        assert!(residual_norm(&a1, &u1, &rhs1) <= 1e-8);

        let mut a2 = h_gram.clone();
        a2.add_scaled(&g_gram, 1.0 / c2).unwrap();
        a2.add_ridge(RIDGE_FALLBACK);
        let mut u2 = model.plane2.w.clone();
        u2.push(model.plane2.b);
        let rhs2 = h.t_matvec(&vec![1.0; h.rows()]).unwrap();
        assert!(residual_norm(&a2, &u2, &rhs2) <= 1e-8);

        // RELSTSVM: (c1 G'G + H'H + c2 I)(-u1) = c1 G'(E e), plane 2 likewise
        let (r1, r2, r3, r4, e) = (1.5, 0.2, 0.8, 0.3, 0.7);
        let rel = train_relstsvm(&ds, r1, r2, r3, r4, &[e], &[e], KernelSpec::Linear).unwrap();
        let mut b1 = g_gram.clone();
        b1.scale(r1);
        b1.add_scaled(&h_gram, 1.0).unwrap();
        b1.add_ridge(r2);
        let mut v1: Vec<f64> = rel.plane1.w.iter().map(|w| -w).collect();
        v1.push(-rel.plane1.b);
        let rel_rhs1: Vec<f64> = g
            .t_matvec(&vec![e; g.rows()])
            .unwrap()
            .into_iter()
            .map(|v| r1 * v)
            .collect();
        assert!(residual_norm(&b1, &v1, &rel_rhs1) <= 1e-8);

        let mut b2 = h_gram.clone();
        b2.scale(r3);
        b2.add_scaled(&g_gram, 1.0).unwrap();
        b2.add_ridge(r4);
        let mut v2 = rel.plane2.w.clone();
        v2.push(rel.plane2.b);
        let rel_rhs2: Vec<f64> = h
            .t_matvec(&vec![e; h.rows()])
            .unwrap()
            .into_iter()
            .map(|v| r3 * v)
            .collect();
        assert!(residual_norm(&b2, &v2, &rel_rhs2) <= 1e-8);

        // KRR: (K + lambda I) c = y
        let krr_ds = blobs(12, 3, 1.5, 402);
        let lambda = 0.5;
        let kspec = KernelSpec::gaussian(0.3).unwrap();
        let krr = train_krr(&krr_ds, lambda, kspec).unwrap();
        let mut k = gram(&krr_ds.x, &krr_ds.x, kspec).unwrap();
        k.add_ridge(lambda);
        let y: Vec<f64> = krr_ds.y.iter().map(|&v| f64::from(v)).collect();
        assert!(residual_norm(&k, &krr.coefficients, &y) <= 1e-8);

        // RVFL: (D'D + lambda I) beta = D'y over D = [X | H], tall and wide
        for (n_per, d, n_hidden) in [(25usize, 4usize, 8usize), (6, 30, 10)] {
            let rds = blobs(n_per, d, 2.0, 403 + n_per as u64);
            let c_exp = 2;
            let model = train_rvfl(&rds, n_hidden, c_exp, 1.0, 9).unwrap();
            let mut hidden = rds.x.matmul(&model.w_in).unwrap();
            for i in 0..hidden.rows() {
                for (j, &b) in model.b_in.iter().enumerate() {
                    hidden.set(i, j, sigmoid(hidden.get(i, j) + b));
                }
            }
            let design = rds.x.hstack(&hidden).unwrap();
            let mut normal = design.gram_self();
            normal.add_ridge((c_exp as f64).exp2());
            let ry: Vec<f64> = rds.y.iter().map(|&v| f64::from(v)).collect();
            let rhs = design.t_matvec(&ry).unwrap();
            assert!(
                residual_norm(&normal, &model.beta, &rhs) <= 1e-8,
                "rvfl {n_per}x{d}"
            );
        }
    });
}

/// Mid-ranks by exhaustive pairwise counting, then the same z-statistic.
fn wilcoxon_by_enumeration(class1: &[f64], class2: &[f64]) -> f64 {
    let n1 = class1.len() as f64;
    let n2 = class2.len() as f64;
    let pooled: Vec<f64> = class1.iter().chain(class2).copied().collect();
    let mut r1 = 0.0;
    for &v in class1 {
        let less = pooled.iter().filter(|&&p| p < v).count() as f64;
        let equal = pooled.iter().filter(|&&p| p == v).count() as f64;
        r1 += less + (equal + 1.0) / 2.0;
    }
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    (u - n1 * n2 / 2.0).abs() / (n1 * n2 * (n1 + n2 + 1.0) / 12.0).sqrt()
}

fn one_feature_dataset(class1: &[f64], class2: &[f64]) -> Dataset {
    let mut data: Vec<f64> = class1.to_vec();
    data.extend_from_slice(class2);
    let mut y = vec![1i8; class1.len()];
    y.extend(vec![-1i8; class2.len()]);
    let n = y.len();
    Dataset::new(
        Matrix::from_vec(n, 1, data).unwrap(),
        y,
        vec!["f0".into()],
        Modality::GM,
    )
    .unwrap()
}

#[test]
fn criterion_05() {
    check(5, "informative-feature recovery and Wilcoxon enumeration", || {
        let informative = [7usize, 23, 41, 68, 90];
        let (n_per, d) = (50usize, 100usize);
        let mut rng = rng_from_seed(0xacc5);
        let mut data = Vec::with_capacity(2 * n_per * d);
        let mut y = Vec::with_capacity(2 * n_per);
        for class in [1i8, -1i8] {
            for _ in 0..n_per {
                for j in 0..d {
                    let shift = if informative.contains(&j) {
                        f64::from(class)
                    } else {
                        0.0
                    };
                    data.push(shift + gauss(&mut rng));
                }
                y.push(class);
            }
        }
        let ids = (0..d).map(|j| format!("f{j}")).collect();
        let ds = Dataset::new(
            Matrix::from_vec(2 * n_per, d, data).unwrap(),
            y,
            ids,
            Modality::GM,
        )
        .unwrap();

        for criterion in Criterion::ALL {
            let ranking = rank_features(&ds, criterion, 12345).unwrap();
            let top: HashSet<usize> = ranking.order[..10].iter().copied().collect();
            let hits = informative.iter().filter(|j| top.contains(j)).count();
            assert!(hits >= 4, "{criterion}: {hits} informative in top 10");
        }

        // exhaustive rank enumeration, n <= 10 per class, ties included
        fn draw(rng: &mut impl Rng, shift: f64, n: usize, quantize: bool) -> Vec<f64> {
            (0..n)
                .map(|_| {
                    let v = shift + gauss(rng);
                    if quantize {
                        (v * 2.0).round() / 2.0
                    } else {
                        v
                    }
                })
                .collect()
        }
        let mut wrng = rng_from_seed(0x5511);
        for trial in 0..40 {
            let n1 = wrng.gen_range(2..=10);
            let n2 = wrng.gen_range(2..=10);
            let class1 = draw(&mut wrng, 0.4, n1, trial % 2 == 0);
            let class2 = draw(&mut wrng, 0.0, n2, trial % 2 == 0);
            let ds = one_feature_dataset(&class1, &class2);
            let ranking = rank_by_criterion(&ds, Criterion::Wilcoxon).unwrap();
            let oracle = wilcoxon_by_enumeration(&class1, &class2);
            assert_eq!(ranking.scores[0], oracle, "trial {trial}");
        }
    });
}

#[test]
fn criterion_06() {
    check(6, "reference configurations on separated blobs", || {
        let t0 = Instant::now();
        let ds = blobs(50, 10, 4.0, 0xacc6);
        let plan = stratified_kfold(&ds, 10, 6001).unwrap();
        for (i, id) in ClassifierId::default_23().into_iter().enumerate() {
            let (label, spec) = reference_point(id);
            let cell_spec = CellSpec {
                classifier: id.name().to_string(),
                criterion: Criterion::TTest,
                feature_count: 10,
                standardize: true,
                rank_on_full: false,
                seed: derive_seed(0xacc6, &[i as u64]),
            };
            let result = cross_validate(&ds, &plan, &cell_spec, &label, &spec).unwrap();
            let acc = result.mean.set.accuracy;
            assert!(acc >= 0.95, "{} at {label}: accuracy {acc}", id.name());
        }
        let elapsed = t0.elapsed();
        assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    });
}

#[test]
fn criterion_07() {
    check(7, "metric oracles and NaN convention", || {
        let mut rng = rng_from_seed(0xacc7);
        for trial in 0..25 {
            let n = rng.gen_range(2..=50);
            let mut y: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            y[0] = 1;
            y[n - 1] = -1;
            let scores: Vec<f64> = (0..n)
                .map(|_| {
                    let v = gauss(&mut rng);
                    if trial % 2 == 0 {
                        (v * 2.0).round() / 2.0
                    } else {
                        v
                    }
                })
                .collect();
            let pred: Vec<i8> = scores.iter().map(|&s| if s >= 0.0 { 1 } else { -1 }).collect();
            let c = confusion(&pred, &y).unwrap();
            let m = metrics(&c, &scores, &y).unwrap();

            let mut wins = 0.0;
            let mut pairs = 0.0;
            for i in 0..n {
                if y[i] != 1 {
                    continue;
                }
                for j in 0..n {
                    if y[j] != -1 {
                        continue;
                    }
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        wins += 1.0;
                    } else if scores[i] == scores[j] {
                        wins += 0.5;
                    }
                }
            }
            assert_eq!(m.auc, wins / pairs, "trial {trial}");

            let (s, p) = (m.sensitivity, m.specificity);
            if s.is_finite() && p.is_finite() {
                assert!((m.g_mean * m.g_mean - s * p).abs() <= 1e-10);
            } else {
                assert!(m.g_mean.is_nan());
            }
        }

        // no positive truths: sensitivity undefined, g-mean inherits the NaN
        let y = vec![-1i8; 4];
        let pred = vec![-1i8; 4];
        let c = confusion(&pred, &y).unwrap();
        let m = metrics(&c, &[0.0; 4], &y).unwrap();
        assert!(m.sensitivity.is_nan() && m.g_mean.is_nan());

        // an undefined precision lands in the emitted table as a literal NaN
        let dir = tempfile::tempdir().unwrap();
        let meta = RunMeta {
            seed: 0,
            standardize: true,
            rank_on_full: false,
            folds: 2,
            version: "test".into(),
        };
        let mut store = ResultsStore::create(dir.path(), meta).unwrap();
        let mut set = MetricSet::from_array([0.5; 7]);
        set.precision = f64::NAN;
        let cell = CellResult {
            classifier: "KNN".into(),
            criterion: Criterion::TTest,
            feature_count: 100,
            matter: Modality::GM,
            hyperparameters: "k=5".into(),
            fold_metrics: vec![Some(set)],
            mean: MeanMetrics {
                set,
                excluded: [0; 7],
                folds_used: 1,
            },
        };
        store
            .write_cell(
                &cell_path(Modality::GM, Criterion::TTest, 100, ClassifierId::Knn),
                &StoredCell { best: cell, grid: vec![] },
            )
            .unwrap();
        emit_tables(&mut store, Modality::GM, 100).unwrap();
        let precision_table =
            fs::read_to_string(dir.path().join("GM_100_precision_lin.csv")).unwrap();
        let knn_row = precision_table
            .lines()
            .find(|l| l.starts_with("KNN,"))
            .expect("KNN row");
        assert_eq!(knn_row, "KNN,NaN,,,,,,");
        let results_table =
            fs::read_to_string(dir.path().join("GM_100_results_lin.csv")).unwrap();
        assert!(results_table.contains("KNN,50.00,"));
    });
}

fn write_blob_csv(path: &Path, n_per: usize, d: usize, sep: f64, seed: u64) {
    let ds = blobs(n_per, d, sep, seed);
    let mut out = String::from("label");
    for j in 0..d {
        out.push_str(&format!(",f{j}"));
    }
    out.push('\n');
    for i in 0..ds.n() {
        out.push_str(&ds.y[i].to_string());
        for j in 0..d {
            out.push_str(&format!(",{}", ds.x.get(i, j)));
        }
        out.push('\n');
    }
    fs::write(path, out).unwrap();
}

fn collect_files(root: &Path, prefix: &Path, into: &mut Vec<PathBuf>) {
    for entry in fs::read_dir(root).unwrap() {
        let entry = entry.unwrap();
        let rel = prefix.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            collect_files(&entry.path(), &rel, into);
        } else {
            into.push(rel);
        }
    }
}

#[test]
fn criterion_08() {
    check(8, "byte-identical results across --jobs", || {
        let bin = env!("CARGO_BIN_EXE_twinbench");
        let dir = tempfile::tempdir().unwrap();
        let gm = dir.path().join("gm.csv");
        write_blob_csv(&gm, 15, 12, 2.0, 0xacc8);

        let mut cfg = ExperimentConfig::default();
        cfg.gm = Some(gm);
        cfg.matters = Some(vec![Modality::GM]);
        cfg.classifiers = Some(vec![ClassifierId::Knn, ClassifierId::LstsvmLin]);
        cfg.criteria = Some(vec![Criterion::TTest, Criterion::Roc]);
        cfg.feature_counts = vec![5, 10];
        cfg.folds = 5;
        cfg.seed = 42;
        cfg.grids.insert(
            "default".into(),
            GridOverride {
                penalty_exps: Some(vec![0]),
                k: Some(3),
                ..GridOverride::default()
            },
        );
        let cfg_path = dir.path().join("config.json");
        fs::write(&cfg_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();

        let mut dirs = Vec::new();
        for jobs in ["1", "4"] {
            let out = dir.path().join(format!("out{jobs}"));
            let status = Command::new(bin)
                .args(["run", "--config"])
                .arg(&cfg_path)
                .arg("--out")
                .arg(&out)
                .args(["--jobs", jobs])
                .env_remove("TWINBENCH_SEED")
                .status()
                .unwrap();
            assert!(status.success(), "run --jobs {jobs}");
            for features in ["5", "10"] {
                let status = Command::new(bin)
                    .args(["report", "--store"])
                    .arg(&out)
                    .args(["--matter", "GM", "--features", features])
                    .env_remove("TWINBENCH_SEED")
                    .status()
                    .unwrap();
                assert!(status.success(), "report {features}");
            }
            dirs.push(out);
        }

        let mut files = Vec::new();
        collect_files(&dirs[0], Path::new(""), &mut files);
        files.sort();
        assert!(
            files.iter().any(|f| f.to_string_lossy().ends_with(".csv")),
            "no result CSVs emitted"
        );
        let mut other = Vec::new();
        collect_files(&dirs[1], Path::new(""), &mut other);
        other.sort();
        assert_eq!(files, other, "file sets differ");
        for rel in files {
            let a = fs::read(dirs[0].join(&rel)).unwrap();
            let b = fs::read(dirs[1].join(&rel)).unwrap();
            assert_eq!(a, b, "{} differs between --jobs 1 and --jobs 4", rel.display());
        }
    });
}

#[test]
fn criterion_09() {
    check(9, "emitted tables match the published layout", || {
        let dir = tempfile::tempdir().unwrap();
        let gm = dir.path().join("gm.csv");
        let wm = dir.path().join("wm.csv");
        write_blob_csv(&gm, 12, 260, 3.0, 0xacc9);
        write_blob_csv(&wm, 12, 260, 3.0, 0xacca);

        let mut cfg = ExperimentConfig::default();
        cfg.gm = Some(gm);
        cfg.wm = Some(wm);
        cfg.matters = Some(vec![Modality::CM]);
        cfg.feature_counts = vec![500];
        cfg.folds = 3;
        cfg.seed = 9;
        cfg.grids.insert(
            "default".into(),
            GridOverride {
                penalty_exps: Some(vec![0]),
                gamma_exps: Some(vec![-3]),
                energies: Some(vec![1.0]),
                c_exps: Some(vec![0]),
                hidden: Some(vec![4]),
                trees: Some(5),
                k: Some(3),
                epochs: Some(20),
                ..GridOverride::default()
            },
        );
        cfg.validate().unwrap();

        let out = dir.path().join("results");
        let outcome = runner::run(&cfg, &out, None, false).unwrap();
        assert_eq!(outcome.failed, 0, "cells failed");
        assert_eq!(outcome.completed, 23 * 7);

        let mut store = ResultsStore::open(&out).unwrap();
        emit_tables(&mut store, Modality::CM, 500).unwrap();

        let header = "Methods,T-Test,ROC,Wilcoxon,Entropy,Bhattacharyya,MRMR,NCA";
        let lin = fs::read_to_string(out.join("CM_500_results_lin.csv")).unwrap();
        let mut lines = lin.lines();
        assert_eq!(lines.next().unwrap(), header);
        let rows: Vec<&str> = lines.collect();
        let expected_lin: Vec<&str> = ClassifierId::LINEAR_ORDER
            .iter()
            .filter(|&&id| id != ClassifierId::SvmLin)
            .map(|id| id.name())
            .collect();
        assert_eq!(rows.len(), expected_lin.len());
        for (row, want) in rows.iter().zip(&expected_lin) {
            let fields: Vec<&str> = row.split(',').collect();
            assert_eq!(fields.len(), 8, "row {row}");
            assert_eq!(&fields[0], want);
            assert!(fields[1..].iter().all(|f| !f.is_empty()), "row {row}");
        }

        let nl = fs::read_to_string(out.join("CM_500_results_nl.csv")).unwrap();
        let mut lines = nl.lines();
        assert_eq!(lines.next().unwrap(), header);
        let rows: Vec<&str> = lines.collect();
        let expected_nl: Vec<&str> =
            ClassifierId::NONLINEAR_ORDER.iter().map(|id| id.name()).collect();
        assert_eq!(rows.len(), expected_nl.len());
        for (row, want) in rows.iter().zip(&expected_nl) {
            assert_eq!(row.split(',').next().unwrap(), *want);
        }
    });
}

#[test]
fn criterion_10() {
    check(10, "README states the reproduction limits", || {
        let readme_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../README.md");
        let readme = fs::read_to_string(readme_path).expect("README.md at workspace root");
        assert!(readme.contains("86.71"), "missing the headline figure");
        let lower = readme.to_lowercase();
        assert!(
            lower.contains("not reproducible"),
            "missing the reproducibility caveat"
        );
        for needle in ["gm", "wm", "label", "config"] {
            assert!(lower.contains(needle), "recipe does not mention {needle}");
        }
    });
}
