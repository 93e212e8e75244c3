//! Random-forest variants: axis-parallel RaF, the three MPSVM-split oblique
//! forests, the heterogeneous-split forest, and LDA/PCA direction forests.

mod split;

pub use split::{hyperclass_partition, HetTrace, SplitRule};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, rng_from_seed};
use split::MpReg;

const MAX_DEPTH: usize = 30;
const MIN_SAMPLES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ForestVariant {
    RaF,
    MpRafT,
    MpRafP,
    MpRafN,
    Het,
    RafLda,
    RafPca,
}

impl ForestVariant {
    pub const ALL: [ForestVariant; 7] = [
        ForestVariant::RaF,
        ForestVariant::MpRafT,
        ForestVariant::MpRafP,
        ForestVariant::MpRafN,
        ForestVariant::Het,
        ForestVariant::RafLda,
        ForestVariant::RafPca,
    ];
}

impl fmt::Display for ForestVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ForestVariant::RaF => "RaF",
            ForestVariant::MpRafT => "MPRaF-T",
            ForestVariant::MpRafP => "MPRaF-P",
            ForestVariant::MpRafN => "MPRaF-N",
            ForestVariant::Het => "Het-RaF",
            ForestVariant::RafLda => "RaF-LDA",
            ForestVariant::RafPca => "RaF-PCA",
        };
        f.write_str(name)
    }
}

impl FromStr for ForestVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "raf" => Ok(ForestVariant::RaF),
            "mpraf-t" => Ok(ForestVariant::MpRafT),
            "mpraf-p" => Ok(ForestVariant::MpRafP),
            "mpraf-n" => Ok(ForestVariant::MpRafN),
            "het-raf" | "het" => Ok(ForestVariant::Het),
            "raf-lda" => Ok(ForestVariant::RafLda),
            "raf-pca" => Ok(ForestVariant::RafPca),
            other => Err(Error::InvalidParam(format!(
                "unknown forest variant '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum TreeNode {
    Leaf {
        p_pos: f64,
    },
    Split {
        rule: SplitRule,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    fn leaf(pos: usize, total: usize) -> TreeNode {
        TreeNode::Leaf {
            p_pos: pos as f64 / total as f64,
        }
    }

    /// Probability of the +1 class at the leaf reached by `row`.
    pub fn p_pos(&self, row: &[f64]) -> f64 {
        match self {
            TreeNode::Leaf { p_pos } => *p_pos,
            TreeNode::Split { rule, left, right } => {
                if rule.value(row) <= 0.0 {
                    left.p_pos(row)
                } else {
                    right.p_pos(row)
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Forest {
    pub trees: Vec<TreeNode>,
    pub n_trees: usize,
    pub n_features: usize,
    pub variant: ForestVariant,
    pub seed: u64,
}

/// Bootstrap draw for one tree; exposed so tests can reproduce in-bag sets.
#[doc(hidden)]
pub fn bootstrap_indices(seed: u64, tree: usize, n: usize) -> Vec<usize> {
    let mut rng = rng_from_seed(derive_seed(seed, &[tree as u64]));
    draw_bootstrap(&mut rng, n)
}

fn draw_bootstrap(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

fn sample_features(rng: &mut ChaCha8Rng, d: usize, mtry: usize) -> Vec<usize> {
    let mut picked = rand::seq::index::sample(rng, d, mtry).into_vec();
    picked.sort_unstable();
    picked
}

struct Grower<'a> {
    x: &'a Matrix,
    y: &'a [i8],
    mtry: usize,
    variant: ForestVariant,
    trace: Option<&'a mut Vec<HetTrace>>,
}

impl Grower<'_> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> TreeNode {
        let n = rows.len();
        let pos = rows.iter().filter(|&&r| self.y[r] == 1).count();
        if pos == 0 || pos == n || depth >= MAX_DEPTH || n < MIN_SAMPLES {
            return TreeNode::leaf(pos, n);
        }
        let features = sample_features(rng, self.x.cols(), self.mtry);
        let chosen = self.choose_rule(&rows, &features);
        let rule = match chosen {
            Some(r) => r,
            None => return TreeNode::leaf(pos, n),
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| rule.value(self.x.row(r)) <= 0.0);
        if left_rows.is_empty() || right_rows.is_empty() {
            return TreeNode::leaf(pos, n);
        }
        let left = Box::new(self.grow(left_rows, depth + 1, rng));
        let right = Box::new(self.grow(right_rows, depth + 1, rng));
        TreeNode::Split { rule, left, right }
    }

    fn choose_rule(&mut self, rows: &[usize], features: &[usize]) -> Option<SplitRule> {
        let x = self.x;
        let y = self.y;
        match self.variant {
            ForestVariant::RaF => split::best_axis(x, rows, y, features).map(|(r, _)| r),
            ForestVariant::MpRafT => {
                self.usable(split::mpsvm_split(x, rows, y, features, MpReg::Tikhonov), rows)
            }
            ForestVariant::MpRafP => {
                match split::mpsvm_split(x, rows, y, features, MpReg::AxisFallback) {
                    Some(rule) => self.usable(Some(rule), rows),
                    None => split::best_axis(x, rows, y, features).map(|(r, _)| r),
                }
            }
            ForestVariant::MpRafN => {
                self.usable(split::mpsvm_split(x, rows, y, features, MpReg::NullSpace), rows)
            }
            ForestVariant::Het => {
                let (rule, _, trace) = split::het_split(x, rows, y, features)?;
                if let Some(sink) = self.trace.as_deref_mut() {
                    sink.push(trace);
                }
                Some(rule)
            }
            ForestVariant::RafLda => self.usable(split::lda_split(x, rows, y, features), rows),
            ForestVariant::RafPca => self.usable(split::pca_split(x, rows, features), rows),
        }
    }

    /// Keep an oblique rule only when it actually partitions the node.
    fn usable(&self, rule: Option<SplitRule>, rows: &[usize]) -> Option<SplitRule> {
        let rule = rule?;
        split::rule_gain(&rule, self.x, rows, self.y).map(|_| rule)
    }
}

pub fn train_forest(
    ds: &Dataset,
    variant: ForestVariant,
    n_trees: usize,
    seed: u64,
) -> Result<Forest> {
    train_forest_impl(ds, variant, n_trees, seed, None)
}

/// Training entry that also returns the per-node gain bookkeeping for the
/// heterogeneous variant.
#[doc(hidden)]
pub fn train_forest_traced(
    ds: &Dataset,
    variant: ForestVariant,
    n_trees: usize,
    seed: u64,
) -> Result<(Forest, Vec<HetTrace>)> {
    let mut traces = Vec::new();
    let forest = train_forest_impl(ds, variant, n_trees, seed, Some(&mut traces))?;
    Ok((forest, traces))
}

fn train_forest_impl(
    ds: &Dataset,
    variant: ForestVariant,
    n_trees: usize,
    seed: u64,
    mut trace: Option<&mut Vec<HetTrace>>,
) -> Result<Forest> {
    if n_trees == 0 {
        return Err(Error::InvalidParam("n_trees must be at least 1".into()));
    }
    let n = ds.n();
    let d = ds.d();
    let mtry = ((d as f64).sqrt().floor() as usize).clamp(1, d);
    let mut trees = Vec::with_capacity(n_trees);
    for t in 0..n_trees {
        let mut rng = rng_from_seed(derive_seed(seed, &[t as u64]));
        let rows = draw_bootstrap(&mut rng, n);
        let mut grower = Grower {
            x: &ds.x,
            y: &ds.y,
            mtry,
            variant,
            trace: trace.as_deref_mut(),
        };
        trees.push(grower.grow(rows, 0, &mut rng));
    }
    Ok(Forest {
        trees,
        n_trees,
        n_features: d,
        variant,
        seed,
    })
}

/// Mean +1-leaf probability across trees; score > 0.5 votes +1, ties go to +1.
pub fn predict_forest(forest: &Forest, x: &Matrix) -> Result<(Vec<i8>, Vec<f64>)> {
    if x.cols() != forest.n_features {
        return Err(Error::DimensionMismatch(format!(
            "forest expects {} features, got {}",
            forest.n_features,
            x.cols()
        )));
    }
    let mut labels = Vec::with_capacity(x.rows());
    let mut scores = Vec::with_capacity(x.rows());
    for i in 0..x.rows() {
        let row = x.row(i);
        let total: f64 = forest.trees.iter().map(|t| t.p_pos(row)).sum();
        let score = total / forest.trees.len() as f64;
        labels.push(if score >= 0.5 { 1 } else { -1 });
        scores.push(score);
    }
    Ok((labels, scores))
}
