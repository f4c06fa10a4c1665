//! Seeded random-forest regression on pre-binned features.
//!
//! Feature values are quantile-binned once per training run (at most
//! `max_bins` bins per feature), so node splitting scans bin histograms
//! instead of sorting rows. Trees are grown from per-tree RNGs derived from
//! `(seed, tree index)`, which makes parallel and sequential training
//! bit-identical; see [`crate::exec`].

use crate::exec::{self, ExecMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use thiserror::Error;

/// How many features each split considers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeaturesPerSplit {
    Fraction(f64),
    Count(usize),
    All,
}

impl FeaturesPerSplit {
    fn mtry(&self, n_features: usize) -> usize {
        match *self {
            FeaturesPerSplit::Fraction(f) => {
                ((n_features as f64 * f).ceil() as usize).clamp(1, n_features)
            }
            FeaturesPerSplit::Count(c) => c.clamp(1, n_features),
            FeaturesPerSplit::All => n_features,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows until leaves are pure or below `min_samples_leaf`.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub features_per_split: FeaturesPerSplit,
    /// Upper bound on histogram bins per feature.
    pub max_bins: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 500,
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: FeaturesPerSplit::Fraction(1.0 / 3.0),
            max_bins: 255,
            seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum ForestError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("need at least 2 training rows, got {0}")]
    TooFewRows(usize),
    #[error("{rows} rows but {targets} targets")]
    DimensionMismatch { rows: usize, targets: usize },
    #[error("prediction row has {got} values, model expects {expected}")]
    RowLength { expected: usize, got: usize },
    #[error("training data contains a non-finite value")]
    NonFinite,
    #[error("invalid forest config: {0}")]
    InvalidConfig(String),
    #[error("malformed forest data: {0}")]
    Codec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature as usize] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }
}

/// A trained ensemble. Immutable after training; safe to share across
/// threads for prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub config: ForestConfig,
    pub n_features: usize,
    trees: Vec<Tree>,
    importances: Vec<f64>,
}

pub(crate) fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Midpoint thresholds between up to `max_bins` quantile cut points of the
/// column's distinct values. Values never coincide with thresholds.
fn bin_thresholds(column: &[f64], max_bins: usize) -> Vec<f64> {
    let mut uniques: Vec<f64> = column.to_vec();
    uniques.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    uniques.dedup();
    if uniques.len() < 2 {
        return Vec::new();
    }
    let n_cuts = uniques.len().min(max_bins) - 1;
    let mut thresholds = Vec::with_capacity(n_cuts);
    for q in 1..=n_cuts {
        let at = q * uniques.len() / (n_cuts + 1);
        let at = at.clamp(1, uniques.len() - 1);
        thresholds.push((uniques[at - 1] + uniques[at]) / 2.0);
    }
    thresholds.dedup();
    thresholds
}

fn bin_index(thresholds: &[f64], value: f64) -> u16 {
    thresholds.partition_point(|&t| t < value) as u16
}

struct TreeBuilder<'a> {
    binned: &'a [Vec<u16>],
    thresholds: &'a [Vec<f64>],
    targets: &'a [f64],
    cfg: &'a ForestConfig,
    mtry: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
    importance: Vec<f64>,
}

impl TreeBuilder<'_> {
    fn build(&mut self, indices: &mut [u32], depth: usize) -> u32 {
        let n = indices.len();
        let sum: f64 = indices.iter().map(|&i| self.targets[i as usize]).sum();
        let mean = sum / n as f64;
        let at_depth_limit = self.cfg.max_depth.is_some_and(|d| depth >= d);
        if n < 2 * self.cfg.min_samples_leaf || at_depth_limit {
            return self.push(Node::Leaf { value: mean });
        }

        let parent_score = sum * sum / n as f64;
        let candidates = self.sample_features();
        let mut best: Option<(f64, usize, u16)> = None;
        for &feature in &candidates {
            let thresholds = &self.thresholds[feature];
            if thresholds.is_empty() {
                continue;
            }
            let n_bins = thresholds.len() + 1;
            let mut counts = vec![0u32; n_bins];
            let mut sums = vec![0f64; n_bins];
            let col = &self.binned[feature];
            for &i in indices.iter() {
                let b = col[i as usize] as usize;
                counts[b] += 1;
                sums[b] += self.targets[i as usize];
            }
            let mut left_count = 0u32;
            let mut left_sum = 0f64;
            for cut in 0..n_bins - 1 {
                left_count += counts[cut];
                left_sum += sums[cut];
                let right_count = n as u32 - left_count;
                if (left_count as usize) < self.cfg.min_samples_leaf
                    || (right_count as usize) < self.cfg.min_samples_leaf
                    || right_count == 0
                    || left_count == 0
                {
                    continue;
                }
                let right_sum = sum - left_sum;
                let score = left_sum * left_sum / left_count as f64
                    + right_sum * right_sum / right_count as f64;
                if best.is_none_or(|(s, _, _)| score > s) {
                    best = Some((score, feature, cut as u16));
                }
            }
        }

        let tolerance = 1e-12 * parent_score.abs().max(1.0);
        let Some((score, feature, cut)) = best else {
            return self.push(Node::Leaf { value: mean });
        };
        if score <= parent_score + tolerance {
            return self.push(Node::Leaf { value: mean });
        }
        self.importance[feature] += score - parent_score;

        let col = &self.binned[feature];
        let split_at = partition(indices, |i| col[i as usize] <= cut);
        let (left_idx, right_idx) = indices.split_at_mut(split_at);
        debug_assert!(!left_idx.is_empty() && !right_idx.is_empty());
        let node_at = self.push(Node::Split {
            feature: feature as u32,
            threshold: self.thresholds[feature][cut as usize],
            left: 0,
            right: 0,
        });
        let left = self.build(left_idx, depth + 1);
        let right = self.build(right_idx, depth + 1);
        if let Node::Split {
            left: l, right: r, ..
        } = &mut self.nodes[node_at as usize]
        {
            *l = left;
            *r = right;
        }
        node_at
    }

    fn push(&mut self, node: Node) -> u32 {
        self.nodes.push(node);
        (self.nodes.len() - 1) as u32
    }

    /// `mtry` distinct feature indices, order determined by the RNG.
    fn sample_features(&mut self) -> Vec<usize> {
        let p = self.binned.len();
        if self.mtry >= p {
            return (0..p).collect();
        }
        let mut pool: Vec<usize> = (0..p).collect();
        for i in 0..self.mtry {
            let j = self.rng.gen_range(i..p);
            pool.swap(i, j);
        }
        pool.truncate(self.mtry);
        pool
    }
}

/// Stable in-place partition; returns the count of matching elements.
fn partition(indices: &mut [u32], pred: impl Fn(u32) -> bool) -> usize {
    let mut sorted: Vec<u32> = Vec::with_capacity(indices.len());
    sorted.extend(indices.iter().copied().filter(|&i| pred(i)));
    let split = sorted.len();
    sorted.extend(indices.iter().copied().filter(|&i| !pred(i)));
    indices.copy_from_slice(&sorted);
    split
}

fn validate_config(cfg: &ForestConfig) -> Result<(), ForestError> {
    if cfg.n_trees == 0 {
        return Err(ForestError::InvalidConfig("n_trees must be ≥ 1".into()));
    }
    if cfg.min_samples_leaf == 0 {
        return Err(ForestError::InvalidConfig("min_samples_leaf must be ≥ 1".into()));
    }
    if cfg.max_bins < 2 || cfg.max_bins > u16::MAX as usize {
        return Err(ForestError::InvalidConfig(format!(
            "max_bins must be in 2..={}",
            u16::MAX
        )));
    }
    if let FeaturesPerSplit::Fraction(f) = cfg.features_per_split {
        if !(f > 0.0 && f <= 1.0) {
            return Err(ForestError::InvalidConfig(
                "features_per_split fraction must be in (0, 1]".into(),
            ));
        }
    }
    Ok(())
}

/// Train on column-major data: `columns[j][i]` is feature `j` of row `i`.
pub fn train(
    columns: &[Vec<f64>],
    targets: &[f64],
    config: &ForestConfig,
    mode: ExecMode,
) -> Result<Forest, ForestError> {
    validate_config(config)?;
    if columns.is_empty() {
        return Err(ForestError::EmptyTrainingSet);
    }
    let n = targets.len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(ForestError::DimensionMismatch {
            rows: columns[0].len(),
            targets: n,
        });
    }
    if n < 2 {
        return Err(ForestError::TooFewRows(n));
    }
    if targets.iter().any(|v| !v.is_finite())
        || columns.iter().any(|c| c.iter().any(|v| !v.is_finite()))
    {
        return Err(ForestError::NonFinite);
    }

    let p = columns.len();
    let thresholds: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| bin_thresholds(c, config.max_bins))
        .collect();
    let binned: Vec<Vec<u16>> = columns
        .iter()
        .zip(&thresholds)
        .map(|(col, th)| col.iter().map(|&v| bin_index(th, v)).collect())
        .collect();
    let mtry = config.features_per_split.mtry(p);

    let grown: Vec<(Tree, Vec<f64>)> = exec::map_indexed(mode, config.n_trees, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, t as u64));
        let mut indices: Vec<u32> = (0..n).map(|_| rng.gen_range(0..n) as u32).collect();
        let mut builder = TreeBuilder {
            binned: &binned,
            thresholds: &thresholds,
            targets,
            cfg: config,
            mtry,
            rng,
            nodes: Vec::new(),
            importance: vec![0.0; p],
        };
        builder.build(&mut indices, 0);
        (
            Tree {
                nodes: builder.nodes,
            },
            builder.importance,
        )
    });

    // Reduce in tree order so both exec modes sum identically.
    let mut trees = Vec::with_capacity(config.n_trees);
    let mut importances = vec![0.0; p];
    for (tree, imp) in grown {
        for (acc, v) in importances.iter_mut().zip(&imp) {
            *acc += v;
        }
        trees.push(tree);
    }
    let total: f64 = importances.iter().sum();
    if total > 0.0 {
        for v in &mut importances {
            *v /= total;
        }
    } else {
        importances = vec![1.0 / p as f64; p];
    }

    Ok(Forest {
        config: config.clone(),
        n_features: p,
        trees,
        importances,
    })
}

impl Forest {
    /// Ensemble mean over all trees for one row of raw feature values.
    pub fn predict_row(&self, row: &[f64]) -> Result<f64, ForestError> {
        if row.len() != self.n_features {
            return Err(ForestError::RowLength {
                expected: self.n_features,
                got: row.len(),
            });
        }
        let sum: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        Ok(sum / self.trees.len() as f64)
    }

    /// Predict for column-major data, parallel across rows.
    pub fn predict_columns(
        &self,
        columns: &[Vec<f64>],
        mode: ExecMode,
    ) -> Result<Vec<f64>, ForestError> {
        if columns.len() != self.n_features {
            return Err(ForestError::RowLength {
                expected: self.n_features,
                got: columns.len(),
            });
        }
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(ForestError::DimensionMismatch {
                rows: n,
                targets: n,
            });
        }
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        let out = exec::map_slice(mode, &rows, |row| self.predict_row(row).expect("row length checked"));
        Ok(out)
    }

    /// Normalized impurity-decrease importances; sums to 1. Uniform when
    /// the forest made no splits.
    pub fn importances(&self) -> &[f64] {
        &self.importances
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    // --- compact binary codec ---------------------------------------------
    //
    // Little-endian. Layout:
    //   magic "LSFRST1\n" | u64 n_features | u64 n_trees
    //   | config (JSON, u64 length prefix)
    //   | n_features × f64 importances
    //   | per tree: u64 n_nodes, then per node:
    //       u32 feature (u32::MAX = leaf) | f64 threshold-or-value | u32 left | u32 right

    const MAGIC: &'static [u8; 8] = b"LSFRST1\n";

    pub fn write_to(&self, mut w: impl Write) -> Result<(), ForestError> {
        w.write_all(Self::MAGIC)?;
        w.write_all(&(self.n_features as u64).to_le_bytes())?;
        w.write_all(&(self.trees.len() as u64).to_le_bytes())?;
        let cfg = serde_json::to_vec(&self.config)
            .map_err(|e| ForestError::Codec(format!("config serialization: {e}")))?;
        w.write_all(&(cfg.len() as u64).to_le_bytes())?;
        w.write_all(&cfg)?;
        for v in &self.importances {
            w.write_all(&v.to_le_bytes())?;
        }
        for tree in &self.trees {
            w.write_all(&(tree.nodes.len() as u64).to_le_bytes())?;
            for node in &tree.nodes {
                match node {
                    Node::Leaf { value } => {
                        w.write_all(&u32::MAX.to_le_bytes())?;
                        w.write_all(&value.to_le_bytes())?;
                        w.write_all(&0u32.to_le_bytes())?;
                        w.write_all(&0u32.to_le_bytes())?;
                    }
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => {
                        w.write_all(&feature.to_le_bytes())?;
                        w.write_all(&threshold.to_le_bytes())?;
                        w.write_all(&left.to_le_bytes())?;
                        w.write_all(&right.to_le_bytes())?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Forest, ForestError> {
        fn read_exact<const N: usize>(r: &mut impl Read) -> Result<[u8; N], ForestError> {
            let mut buf = [0u8; N];
            r.read_exact(&mut buf)?;
            Ok(buf)
        }
        fn read_u64(r: &mut impl Read) -> Result<u64, ForestError> {
            Ok(u64::from_le_bytes(read_exact::<8>(r)?))
        }
        fn read_u32(r: &mut impl Read) -> Result<u32, ForestError> {
            Ok(u32::from_le_bytes(read_exact::<4>(r)?))
        }
        fn read_f64(r: &mut impl Read) -> Result<f64, ForestError> {
            Ok(f64::from_le_bytes(read_exact::<8>(r)?))
        }

        let magic = read_exact::<8>(&mut r)?;
        if &magic != Self::MAGIC {
            return Err(ForestError::Codec("bad magic".into()));
        }
        let n_features = read_u64(&mut r)? as usize;
        let n_trees = read_u64(&mut r)? as usize;
        let cfg_len = read_u64(&mut r)? as usize;
        if cfg_len > 1 << 20 {
            return Err(ForestError::Codec("config block too large".into()));
        }
        let mut cfg_buf = vec![0u8; cfg_len];
        r.read_exact(&mut cfg_buf)?;
        let config: ForestConfig = serde_json::from_slice(&cfg_buf)
            .map_err(|e| ForestError::Codec(format!("config parse: {e}")))?;
        let mut importances = Vec::with_capacity(n_features);
        for _ in 0..n_features {
            importances.push(read_f64(&mut r)?);
        }
        let mut trees = Vec::with_capacity(n_trees);
        for _ in 0..n_trees {
            let n_nodes = read_u64(&mut r)? as usize;
            if n_nodes > 1 << 28 {
                return Err(ForestError::Codec("tree too large".into()));
            }
            let mut nodes = Vec::with_capacity(n_nodes);
            for _ in 0..n_nodes {
                let feature = read_u32(&mut r)?;
                let value = read_f64(&mut r)?;
                let left = read_u32(&mut r)?;
                let right = read_u32(&mut r)?;
                nodes.push(if feature == u32::MAX {
                    Node::Leaf { value }
                } else {
                    if feature as usize >= n_features {
                        return Err(ForestError::Codec("feature index out of range".into()));
                    }
                    Node::Split {
                        feature,
                        threshold: value,
                        left,
                        right,
                    }
                });
            }
            for node in &nodes {
                if let Node::Split { left, right, .. } = node {
                    if *left as usize >= nodes.len() || *right as usize >= nodes.len() {
                        return Err(ForestError::Codec("child index out of range".into()));
                    }
                }
            }
            trees.push(Tree { nodes });
        }
        Ok(Forest {
            config,
            n_features,
            trees,
            importances,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::rmse;

    fn small_cfg(seed: u64) -> ForestConfig {
        ForestConfig {
            n_trees: 50,
            max_depth: Some(10),
            min_samples_leaf: 2,
            max_bins: 64,
            seed,
            ..ForestConfig::default()
        }
    }

    fn linear_data(n: usize, seed: u64, noise: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
        use rand_distr::{Distribution, Normal};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gauss = Normal::new(0.0, noise).unwrap();
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
        let nuisance: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| 1.0 + 0.5 * v + gauss.sample(&mut rng))
            .collect();
        (vec![x, nuisance], y)
    }

    #[test]
    fn constant_targets_predict_constant() {
        let columns = vec![(0..50).map(|i| i as f64).collect::<Vec<_>>()];
        let targets = vec![4.0; 50];
        let forest = train(&columns, &targets, &small_cfg(7), ExecMode::Sequential).unwrap();
        for i in 0..50 {
            let pred = forest.predict_row(&[i as f64]).unwrap();
            assert!((pred - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let (columns, targets) = linear_data(120, 3, 0.2);
        let a = train(&columns, &targets, &small_cfg(42), ExecMode::Sequential).unwrap();
        let b = train(&columns, &targets, &small_cfg(42), ExecMode::Sequential).unwrap();
        assert_eq!(a, b);
        let probe = vec![3.7, 1.2];
        assert_eq!(a.predict_row(&probe).unwrap(), b.predict_row(&probe).unwrap());
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_training_matches_sequential() {
        let (columns, targets) = linear_data(120, 5, 0.2);
        let seq = train(&columns, &targets, &small_cfg(9), ExecMode::Sequential).unwrap();
        let par = train(&columns, &targets, &small_cfg(9), ExecMode::Parallel).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn beats_mean_predictor_on_linear_signal() {
        let (columns, targets) = linear_data(500, 11, 0.1);
        let train_cols: Vec<Vec<f64>> = columns.iter().map(|c| c[..400].to_vec()).collect();
        let train_targets = &targets[..400];
        let test_cols: Vec<Vec<f64>> = columns.iter().map(|c| c[400..].to_vec()).collect();
        let test_targets = &targets[400..];

        let forest = train(&train_cols, train_targets, &small_cfg(1), ExecMode::Sequential).unwrap();
        let preds = forest.predict_columns(&test_cols, ExecMode::Sequential).unwrap();
        let forest_rmse = rmse(&preds, test_targets).unwrap();

        let mean = train_targets.iter().sum::<f64>() / train_targets.len() as f64;
        let mean_preds = vec![mean; test_targets.len()];
        let mean_rmse = rmse(&mean_preds, test_targets).unwrap();
        assert!(
            forest_rmse < mean_rmse,
            "forest {forest_rmse} not better than mean predictor {mean_rmse}"
        );
    }

    #[test]
    fn predictions_bounded_by_target_range() {
        let (columns, targets) = linear_data(200, 13, 0.3);
        let lo = targets.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let forest = train(&columns, &targets, &small_cfg(2), ExecMode::Sequential).unwrap();
        for i in 0..100 {
            let pred = forest.predict_row(&[i as f64 * 0.2 - 2.0, 5.0]).unwrap();
            assert!(pred >= lo - 1e-12 && pred <= hi + 1e-12);
        }
    }

    #[test]
    fn importances_normalized_and_signal_dominates() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 300;
        let signal: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let noise: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let targets: Vec<f64> = signal.iter().map(|&v| 5.0 * v).collect();
        let mut columns = vec![signal];
        columns.extend(noise);
        let forest = train(&columns, &targets, &small_cfg(3), ExecMode::Sequential).unwrap();
        let imp = forest.importances();
        assert!((imp.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(imp.iter().all(|&v| v >= 0.0));
        let max_at = imp
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(max_at, 0, "importances: {imp:?}");
    }

    #[test]
    fn pure_noise_importances_stay_near_uniform() {
        let p = 5;
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let n = 200;
            let columns: Vec<Vec<f64>> = (0..p)
                .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let targets: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let forest = train(&columns, &targets, &small_cfg(seed), ExecMode::Sequential).unwrap();
            let uniform = 1.0 / p as f64;
            for &v in forest.importances() {
                assert!(v < 3.0 * uniform, "seed {seed}: importance {v} vs uniform {uniform}");
            }
        }
    }

    #[test]
    fn constant_feature_forest_falls_back_to_uniform_importance() {
        let columns = vec![vec![1.0; 30], vec![2.0; 30]];
        let targets: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let forest = train(&columns, &targets, &small_cfg(4), ExecMode::Sequential).unwrap();
        assert_eq!(forest.importances(), &[0.5, 0.5]);
        // No split possible: every prediction is a bootstrap mean.
        let pred = forest.predict_row(&[1.0, 2.0]).unwrap();
        assert!(pred > 5.0 && pred < 25.0);
    }

    #[test]
    fn binary_round_trip() {
        let (columns, targets) = linear_data(80, 17, 0.2);
        let forest = train(&columns, &targets, &small_cfg(5), ExecMode::Sequential).unwrap();
        let mut buf = Vec::new();
        forest.write_to(&mut buf).unwrap();
        let loaded = Forest::read_from(buf.as_slice()).unwrap();
        assert_eq!(loaded, forest);
    }

    #[test]
    fn codec_rejects_garbage() {
        assert!(matches!(
            Forest::read_from(&b"not a forest"[..]),
            Err(ForestError::Codec(_)) | Err(ForestError::Io(_))
        ));
    }

    #[test]
    fn dimension_errors() {
        let columns = vec![vec![1.0, 2.0, 3.0]];
        assert!(matches!(
            train(&columns, &[1.0, 2.0], &small_cfg(0), ExecMode::Sequential),
            Err(ForestError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            train(&[], &[1.0], &small_cfg(0), ExecMode::Sequential),
            Err(ForestError::EmptyTrainingSet)
        ));
        let forest = train(
            &[vec![1.0, 2.0, 3.0, 4.0]],
            &[1.0, 2.0, 3.0, 4.0],
            &small_cfg(0),
            ExecMode::Sequential,
        )
        .unwrap();
        assert!(matches!(
            forest.predict_row(&[1.0, 2.0]),
            Err(ForestError::RowLength { .. })
        ));
    }

    #[test]
    fn batch_predict_equals_single_rows() {
        let (columns, targets) = linear_data(100, 19, 0.2);
        let forest = train(&columns, &targets, &small_cfg(6), ExecMode::Sequential).unwrap();
        let batch = forest.predict_columns(&columns, ExecMode::Sequential).unwrap();
        for i in 0..100 {
            let single = forest.predict_row(&[columns[0][i], columns[1][i]]).unwrap();
            assert_eq!(batch[i], single);
        }
    }
}
