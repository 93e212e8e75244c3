//! Classifier registry: the 23 benchmark configurations, their Table-1
//! hyperparameter grids, and the dispatch from a grid point to a trained
//! model.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use twinbench_core::data::Dataset;
use twinbench_core::eval::Learner;
use twinbench_core::forests::{predict_forest, train_forest, ForestVariant};
use twinbench_core::kernels::KernelSpec;
use twinbench_core::shallow::{
    predict_knn_scored, predict_krr, predict_mlp, predict_rvfl, train_krr, train_mlp, train_rvfl,
    train_rvfl_ae,
};
use twinbench_core::svmfam::{
    predict_svm, predict_twin, train_lstsvm, train_pingtsvm, train_relstsvm, train_svm,
    train_tbsvm, train_twsvm,
};
use twinbench_core::{Error, Matrix, Result};

pub const DEFAULT_TREES: usize = 100;
pub const DEFAULT_KNN_K: usize = 5;
pub const PIN_TAU: f64 = 0.05;
pub const RVFL_SCALE: f64 = 1.0;
pub const RVFL_AE_L1: f64 = 0.01;
pub const MLP_EPOCHS: usize = 200;
pub const MLP_LR: f64 = 1e-3;
pub const MLP_HIDDEN: [usize; 3] = [32, 64, 128];

/// Table 1: penalties 10^i for i = -5..=5.
pub fn penalty_grid() -> Vec<f64> {
    (-5..=5).map(|i| 10f64.powi(i)).collect()
}

/// Table 1: Gaussian gamma 2^i for i = -10..=10.
pub fn gamma_grid() -> Vec<f64> {
    (-10..=10).map(|i| (i as f64).exp2()).collect()
}

/// Table 1: RELSTSVM energy parameter.
pub fn energy_grid() -> Vec<f64> {
    vec![0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
}

/// Table 1: RVFL regularization exponents -5..=14.
pub fn rvfl_c_grid() -> Vec<i32> {
    (-5..=14).collect()
}

/// Table 1: RVFL hidden-layer sizes 3:20:203.
pub fn rvfl_n_grid() -> Vec<usize> {
    (0..=10).map(|i| 3 + 20 * i).collect()
}

/// One benchmark row. The kernelized methods appear twice, once per table
/// half; `SvmLin` is kept available but is not part of the default 23.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassifierId {
    Raf,
    MpRafT,
    MpRafP,
    MpRafN,
    HetRaf,
    RafLda,
    RafPca,
    Knn,
    Neural,
    Rvfl,
    RvflAe,
    PinGtsvm,
    SvmLin,
    KrrLin,
    TwsvmLin,
    TbsvmLin,
    LstsvmLin,
    RelstsvmLin,
    SvmNl,
    KrrNl,
    TwsvmNl,
    TbsvmNl,
    LstsvmNl,
    RelstsvmNl,
}

/// Which half of the results table a classifier belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableHalf {
    Linear,
    NonLinear,
}

impl ClassifierId {
    /// Row order of the linear table half. `SvmLin` sits here when requested
    /// but is excluded from `DEFAULT_23`.
    pub const LINEAR_ORDER: [ClassifierId; 18] = [
        ClassifierId::Raf,
        ClassifierId::MpRafT,
        ClassifierId::MpRafP,
        ClassifierId::MpRafN,
        ClassifierId::HetRaf,
        ClassifierId::RafLda,
        ClassifierId::RafPca,
        ClassifierId::Knn,
        ClassifierId::Neural,
        ClassifierId::Rvfl,
        ClassifierId::RvflAe,
        ClassifierId::PinGtsvm,
        ClassifierId::SvmLin,
        ClassifierId::KrrLin,
        ClassifierId::TwsvmLin,
        ClassifierId::TbsvmLin,
        ClassifierId::LstsvmLin,
        ClassifierId::RelstsvmLin,
    ];

    /// Row order of the Gaussian-kernel table half.
    pub const NONLINEAR_ORDER: [ClassifierId; 6] = [
        ClassifierId::SvmNl,
        ClassifierId::KrrNl,
        ClassifierId::TwsvmNl,
        ClassifierId::TbsvmNl,
        ClassifierId::LstsvmNl,
        ClassifierId::RelstsvmNl,
    ];

    /// The paper's 23 table rows: 17 linear + 6 non-linear.
    pub fn default_23() -> Vec<ClassifierId> {
        let mut ids: Vec<ClassifierId> = Self::LINEAR_ORDER
            .into_iter()
            .filter(|id| *id != ClassifierId::SvmLin)
            .collect();
        ids.extend(Self::NONLINEAR_ORDER);
        ids
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassifierId::Raf => "RaF",
            ClassifierId::MpRafT => "MPRaF-T",
            ClassifierId::MpRafP => "MPRaF-P",
            ClassifierId::MpRafN => "MPRaF-N",
            ClassifierId::HetRaf => "Het-RaF",
            ClassifierId::RafLda => "RaF-LDA",
            ClassifierId::RafPca => "RaF-PCA",
            ClassifierId::Knn => "KNN",
            ClassifierId::Neural => "Neural Network",
            ClassifierId::Rvfl => "RVFL",
            ClassifierId::RvflAe => "RVFLAE",
            ClassifierId::PinGtsvm => "pinGTSVM",
            ClassifierId::SvmLin => "SVM (Linear)",
            ClassifierId::KrrLin => "KRR (Linear)",
            ClassifierId::TwsvmLin => "TWSVM (Linear)",
            ClassifierId::TbsvmLin => "TBSVM (Linear)",
            ClassifierId::LstsvmLin => "LSTWSVM (Linear)",
            ClassifierId::RelstsvmLin => "RELSTSVM (Linear)",
            ClassifierId::SvmNl => "SVM",
            ClassifierId::KrrNl => "KRR (Non-Linear)",
            ClassifierId::TwsvmNl => "TWSVM (Non-Linear)",
            ClassifierId::TbsvmNl => "TBSVM (Non-Linear)",
            ClassifierId::LstsvmNl => "LSTWSVM (Non-Linear)",
            ClassifierId::RelstsvmNl => "RELSTSVM (Non-Linear)",
        }
    }

    pub fn table_half(self) -> TableHalf {
        if Self::NONLINEAR_ORDER.contains(&self) {
            TableHalf::NonLinear
        } else {
            TableHalf::Linear
        }
    }

    /// Filesystem-safe form of the name.
    pub fn slug(self) -> String {
        self.name()
            .chars()
            .filter_map(|c| match c {
                ' ' => Some('_'),
                '(' | ')' => None,
                c => Some(c),
            })
            .collect()
    }
}

impl fmt::Display for ClassifierId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassifierId::LINEAR_ORDER
            .into_iter()
            .chain(ClassifierId::NONLINEAR_ORDER)
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParam(format!("unknown classifier {s:?}")))
    }
}

impl Serialize for ClassifierId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ClassifierId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// A fully resolved hyperparameter point, trainable on any fold.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Svm { c: f64, kernel: KernelSpec },
    Twsvm { c1: f64, c2: f64, kernel: KernelSpec },
    Tbsvm { c1: f64, c2: f64, c3: f64, c4: f64, kernel: KernelSpec },
    Lstsvm { c1: f64, c2: f64, kernel: KernelSpec },
    Relstsvm { c1: f64, c2: f64, c3: f64, c4: f64, energy: f64, kernel: KernelSpec },
    PinGtsvm { c1: f64, c2: f64, tau: f64 },
    Forest { variant: ForestVariant, trees: usize },
    Knn { k: usize },
    Mlp { hidden: usize, epochs: usize, lr: f64 },
    Rvfl { n_hidden: usize, c_exp: i32, scale: f64 },
    RvflAe { n_hidden: usize, c_exp: i32, l1: f64 },
    Krr { lambda: f64, kernel: KernelSpec },
}

impl Learner for ModelSpec {
    fn fit_predict(
        &self,
        train: &Dataset,
        test: &Matrix,
        seed: u64,
    ) -> Result<(Vec<i8>, Vec<f64>)> {
        match *self {
            ModelSpec::Svm { c, kernel } => {
                let model = train_svm(train, c, kernel)?;
                predict_svm(&model, test)
            }
            ModelSpec::Twsvm { c1, c2, kernel } => {
                let model = train_twsvm(train, c1, c2, kernel)?;
                predict_twin(&model, test)
            }
            ModelSpec::Tbsvm { c1, c2, c3, c4, kernel } => {
                let model = train_tbsvm(train, c1, c2, c3, c4, kernel)?;
                predict_twin(&model, test)
            }
            ModelSpec::Lstsvm { c1, c2, kernel } => {
                let model = train_lstsvm(train, c1, c2, kernel)?;
                predict_twin(&model, test)
            }
            ModelSpec::Relstsvm { c1, c2, c3, c4, energy, kernel } => {
                let model = train_relstsvm(train, c1, c2, c3, c4, &[energy], &[energy], kernel)?;
                predict_twin(&model, test)
            }
            ModelSpec::PinGtsvm { c1, c2, tau } => {
                let model = train_pingtsvm(train, c1, c2, tau, tau, KernelSpec::Linear)?;
                predict_twin(&model, test)
            }
            ModelSpec::Forest { variant, trees } => {
                let forest = train_forest(train, variant, trees, seed)?;
                predict_forest(&forest, test)
            }
            ModelSpec::Knn { k } => predict_knn_scored(train, test, k),
            ModelSpec::Mlp { hidden, epochs, lr } => {
                let model = train_mlp(train, hidden, epochs, lr, seed)?;
                predict_mlp(&model, test)
            }
            ModelSpec::Rvfl { n_hidden, c_exp, scale } => {
                let model = train_rvfl(train, n_hidden, c_exp, scale, seed)?;
                predict_rvfl(&model, test)
            }
            ModelSpec::RvflAe { n_hidden, c_exp, l1 } => {
                let model = train_rvfl_ae(train, n_hidden, c_exp, l1, seed)?;
                predict_rvfl(&model, test)
            }
            ModelSpec::Krr { lambda, kernel } => {
                let model = train_krr(train, lambda, kernel)?;
                predict_krr(&model, test)
            }
        }
    }
}

/// Grid knobs a config file may override; unset fields fall back to Table 1.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridOverride {
    /// Penalty exponents i for c = 10^i.
    pub penalty_exps: Option<Vec<i32>>,
    /// Gaussian kernel exponents i for gamma = 2^i.
    pub gamma_exps: Option<Vec<i32>>,
    pub energies: Option<Vec<f64>>,
    /// RVFL regularization exponents i for lambda = 2^i.
    pub c_exps: Option<Vec<i32>>,
    /// Hidden-layer widths (RVFL N, MLP hidden units).
    pub hidden: Option<Vec<usize>>,
    pub trees: Option<usize>,
    pub k: Option<usize>,
    pub epochs: Option<usize>,
    pub lr: Option<f64>,
    pub tau: Option<f64>,
    pub l1: Option<f64>,
    pub scale: Option<f64>,
}

fn penalties(over: &GridOverride) -> Vec<(String, f64)> {
    match &over.penalty_exps {
        Some(exps) => exps.iter().map(|&i| (format!("10^{i}"), 10f64.powi(i))).collect(),
        None => (-5..=5).map(|i| (format!("10^{i}"), 10f64.powi(i))).collect(),
    }
}

fn gammas(over: &GridOverride) -> Vec<(String, f64)> {
    match &over.gamma_exps {
        Some(exps) => exps.iter().map(|&i| (format!("2^{i}"), (i as f64).exp2())).collect(),
        None => (-10..=10).map(|i| (format!("2^{i}"), (i as f64).exp2())).collect(),
    }
}

/// Expand one classifier into its labelled hyperparameter grid. Penalty pairs
/// are tied (c1 = c2 for TWSVM-style models, c3 = c1 and c4 = c2 for the
/// bounded variants), matching the footnote of Table 1.
pub fn expand_grid(id: ClassifierId, over: &GridOverride) -> Vec<(String, ModelSpec)> {
    let lin = KernelSpec::Linear;
    let mut grid = Vec::new();
    match id {
        ClassifierId::Raf
        | ClassifierId::MpRafT
        | ClassifierId::MpRafP
        | ClassifierId::MpRafN
        | ClassifierId::HetRaf
        | ClassifierId::RafLda
        | ClassifierId::RafPca => {
            let variant = forest_variant(id);
            let trees = over.trees.unwrap_or(DEFAULT_TREES);
            grid.push((format!("trees={trees}"), ModelSpec::Forest { variant, trees }));
        }
        ClassifierId::Knn => {
            let k = over.k.unwrap_or(DEFAULT_KNN_K);
            grid.push((format!("k={k}"), ModelSpec::Knn { k }));
        }
        ClassifierId::Neural => {
            let epochs = over.epochs.unwrap_or(MLP_EPOCHS);
            let lr = over.lr.unwrap_or(MLP_LR);
            let widths = over.hidden.clone().unwrap_or_else(|| MLP_HIDDEN.to_vec());
            for hidden in widths {
                grid.push((
                    format!("hidden={hidden},epochs={epochs},lr={lr}"),
                    ModelSpec::Mlp { hidden, epochs, lr },
                ));
            }
        }
        ClassifierId::Rvfl => {
            let scale = over.scale.unwrap_or(RVFL_SCALE);
            for c_exp in over.c_exps.clone().unwrap_or_else(rvfl_c_grid) {
                for n_hidden in over.hidden.clone().unwrap_or_else(rvfl_n_grid) {
                    grid.push((
                        format!("C=2^{c_exp},N={n_hidden}"),
                        ModelSpec::Rvfl { n_hidden, c_exp, scale },
                    ));
                }
            }
        }
        ClassifierId::RvflAe => {
            let l1 = over.l1.unwrap_or(RVFL_AE_L1);
            for c_exp in over.c_exps.clone().unwrap_or_else(rvfl_c_grid) {
                for n_hidden in over.hidden.clone().unwrap_or_else(rvfl_n_grid) {
                    grid.push((
                        format!("C=2^{c_exp},N={n_hidden},l1={l1}"),
                        ModelSpec::RvflAe { n_hidden, c_exp, l1 },
                    ));
                }
            }
        }
        ClassifierId::PinGtsvm => {
            let tau = over.tau.unwrap_or(PIN_TAU);
            for (cl, c) in penalties(over) {
                grid.push((
                    format!("c1=c2={cl},tau={tau}"),
                    ModelSpec::PinGtsvm { c1: c, c2: c, tau },
                ));
            }
        }
        ClassifierId::SvmLin | ClassifierId::SvmNl => {
            for (cl, c) in penalties(over) {
                if id == ClassifierId::SvmLin {
                    grid.push((format!("c={cl}"), ModelSpec::Svm { c, kernel: lin }));
                } else {
                    for (gl, g) in gammas(over) {
                        let kernel = KernelSpec::gaussian(g).expect("grid gamma positive");
                        grid.push((format!("c={cl},gamma={gl}"), ModelSpec::Svm { c, kernel }));
                    }
                }
            }
        }
        ClassifierId::KrrLin => {
            for (cl, c) in penalties(over) {
                grid.push((format!("lambda={cl}"), ModelSpec::Krr { lambda: c, kernel: lin }));
            }
        }
        ClassifierId::KrrNl => {
            for (cl, c) in penalties(over) {
                for (gl, g) in gammas(over) {
                    let kernel = KernelSpec::gaussian(g).expect("grid gamma positive");
                    grid.push((
                        format!("lambda={cl},gamma={gl}"),
                        ModelSpec::Krr { lambda: c, kernel },
                    ));
                }
            }
        }
        ClassifierId::TwsvmLin | ClassifierId::LstsvmLin => {
            for (cl, c) in penalties(over) {
                grid.push((format!("c1=c2={cl}"), twin_point(id, c, c, 0.0, lin)));
            }
        }
        ClassifierId::TwsvmNl | ClassifierId::LstsvmNl => {
            for (cl, c) in penalties(over) {
                for (gl, g) in gammas(over) {
                    let kernel = KernelSpec::gaussian(g).expect("grid gamma positive");
                    grid.push((
                        format!("c1=c2={cl},gamma={gl}"),
                        twin_point(id, c, c, 0.0, kernel),
                    ));
                }
            }
        }
        ClassifierId::TbsvmLin => {
            for (c1l, c1) in penalties(over) {
                for (c2l, c2) in penalties(over) {
                    grid.push((
                        format!("c1=c3={c1l},c2=c4={c2l}"),
                        twin_point(id, c1, c2, 0.0, lin),
                    ));
                }
            }
        }
        ClassifierId::TbsvmNl => {
            for (c1l, c1) in penalties(over) {
                for (c2l, c2) in penalties(over) {
                    for (gl, g) in gammas(over) {
                        let kernel = KernelSpec::gaussian(g).expect("grid gamma positive");
                        grid.push((
                            format!("c1=c3={c1l},c2=c4={c2l},gamma={gl}"),
                            twin_point(id, c1, c2, 0.0, kernel),
                        ));
                    }
                }
            }
        }
        ClassifierId::RelstsvmLin => {
            for (c1l, c1) in penalties(over) {
                for (c2l, c2) in penalties(over) {
                    for &e in over.energies.as_deref().unwrap_or(&[0.5, 0.6, 0.7, 0.8, 0.9, 1.0]) {
                        grid.push((
                            format!("c1=c3={c1l},c2=c4={c2l},E={e}"),
                            twin_point(id, c1, c2, e, lin),
                        ));
                    }
                }
            }
        }
        ClassifierId::RelstsvmNl => {
            for (c1l, c1) in penalties(over) {
                for (c2l, c2) in penalties(over) {
                    for &e in over.energies.as_deref().unwrap_or(&[0.5, 0.6, 0.7, 0.8, 0.9, 1.0]) {
                        for (gl, g) in gammas(over) {
                            let kernel = KernelSpec::gaussian(g).expect("grid gamma positive");
                            grid.push((
                                format!("c1=c3={c1l},c2=c4={c2l},E={e},gamma={gl}"),
                                twin_point(id, c1, c2, e, kernel),
                            ));
                        }
                    }
                }
            }
        }
    }
    grid
}

fn forest_variant(id: ClassifierId) -> ForestVariant {
    match id {
        ClassifierId::Raf => ForestVariant::RaF,
        ClassifierId::MpRafT => ForestVariant::MpRafT,
        ClassifierId::MpRafP => ForestVariant::MpRafP,
        ClassifierId::MpRafN => ForestVariant::MpRafN,
        ClassifierId::HetRaf => ForestVariant::Het,
        ClassifierId::RafLda => ForestVariant::RafLda,
        ClassifierId::RafPca => ForestVariant::RafPca,
        other => unreachable!("{other:?} is not a forest"),
    }
}

fn twin_point(id: ClassifierId, c1: f64, c2: f64, energy: f64, kernel: KernelSpec) -> ModelSpec {
    match id {
        ClassifierId::TwsvmLin | ClassifierId::TwsvmNl => ModelSpec::Twsvm { c1, c2, kernel },
        ClassifierId::LstsvmLin | ClassifierId::LstsvmNl => ModelSpec::Lstsvm { c1, c2, kernel },
        ClassifierId::TbsvmLin | ClassifierId::TbsvmNl => {
            ModelSpec::Tbsvm { c1, c2, c3: c1, c4: c2, kernel }
        }
        ClassifierId::RelstsvmLin | ClassifierId::RelstsvmNl => {
            ModelSpec::Relstsvm { c1, c2, c3: c1, c4: c2, energy, kernel }
        }
        other => unreachable!("{other:?} is not a twin model"),
    }
}

/// One representative grid point per classifier, for smoke tests and docs.
pub fn reference_point(id: ClassifierId) -> (String, ModelSpec) {
    let over = GridOverride {
        penalty_exps: Some(vec![0]),
        gamma_exps: Some(vec![-3]),
        energies: Some(vec![1.0]),
        c_exps: Some(vec![0]),
        hidden: Some(vec![if id == ClassifierId::Neural { 32 } else { 103 }]),
        ..GridOverride::default()
    };
    let mut grid = expand_grid(id, &over);
    grid.swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_roster_is_23_rows() {
        let ids = ClassifierId::default_23();
        assert_eq!(ids.len(), 23);
        assert!(!ids.contains(&ClassifierId::SvmLin));
        let lin = ids.iter().filter(|id| id.table_half() == TableHalf::Linear).count();
        let nl = ids.iter().filter(|id| id.table_half() == TableHalf::NonLinear).count();
        assert_eq!((lin, nl), (17, 6));
    }

    #[test]
    fn names_round_trip() {
        for id in ClassifierId::LINEAR_ORDER.into_iter().chain(ClassifierId::NONLINEAR_ORDER) {
            assert_eq!(id.name().parse::<ClassifierId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(serde_json::from_str::<ClassifierId>(&json).unwrap(), id);
        }
        assert!("bogus".parse::<ClassifierId>().is_err());
    }

    #[test]
    fn table_one_grid_cardinalities() {
        assert_eq!(penalty_grid().len(), 11);
        assert_eq!(gamma_grid().len(), 21);
        assert_eq!(energy_grid().len(), 6);
        assert_eq!(rvfl_c_grid().len(), 20);
        assert_eq!(rvfl_n_grid(), vec![3, 23, 43, 63, 83, 103, 123, 143, 163, 183, 203]);
        assert_eq!(penalty_grid()[0], 1e-5);
        assert_eq!(penalty_grid()[10], 1e5);
        assert_eq!(gamma_grid()[0], (-10f64).exp2());
    }

    #[test]
    fn default_grid_sizes() {
        let over = GridOverride::default();
        assert_eq!(expand_grid(ClassifierId::TwsvmLin, &over).len(), 11);
        assert_eq!(expand_grid(ClassifierId::TwsvmNl, &over).len(), 11 * 21);
        assert_eq!(expand_grid(ClassifierId::TbsvmLin, &over).len(), 11 * 11);
        assert_eq!(expand_grid(ClassifierId::RelstsvmLin, &over).len(), 11 * 11 * 6);
        assert_eq!(expand_grid(ClassifierId::Rvfl, &over).len(), 20 * 11);
        assert_eq!(expand_grid(ClassifierId::Raf, &over).len(), 1);
        assert_eq!(expand_grid(ClassifierId::Neural, &over).len(), 3);
        assert_eq!(expand_grid(ClassifierId::PinGtsvm, &over).len(), 11);
    }

    #[test]
    fn overrides_shrink_grids() {
        let mut over = GridOverride::default();
        over.penalty_exps = Some(vec![0]);
        over.gamma_exps = Some(vec![0, 1]);
        over.energies = Some(vec![1.0]);
        assert_eq!(expand_grid(ClassifierId::RelstsvmNl, &over).len(), 2);
        let (label, spec) = expand_grid(ClassifierId::TwsvmNl, &over).remove(0);
        assert_eq!(label, "c1=c2=10^0,gamma=2^0");
        assert_eq!(
            spec,
            ModelSpec::Twsvm { c1: 1.0, c2: 1.0, kernel: KernelSpec::gaussian(1.0).unwrap() }
        );
    }

    #[test]
    fn reference_points_cover_roster() {
        for id in ClassifierId::default_23() {
            let (label, _) = reference_point(id);
            assert!(!label.is_empty(), "{id}");
        }
    }

    #[test]
    fn slugs_are_filename_safe() {
        for id in ClassifierId::default_23() {
            let slug = id.slug();
            assert!(slug.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_'));
        }
        assert_eq!(ClassifierId::KrrLin.slug(), "KRR_Linear");
    }
}
