//! Three-stage feature selection: missing-value filter, correlation filter,
//! recursive feature elimination with a forest.
//!
//! Each stage can be disabled independently by setting its config field to
//! `None`; a disabled stage passes its input through unchanged. The report
//! partitions the input feature names into four disjoint lists (removed per
//! stage plus kept), so downstream tooling can account for every column.

use crate::evaluation;
use crate::exec::ExecMode;
use crate::features::{DenseMatrix, FeatureError, FeatureMatrix};
use crate::forest::{self, ForestConfig, ForestError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionConfig {
    /// Columns whose missing fraction exceeds this are dropped; survivors
    /// are imputed with their training mean. `None` disables the stage and
    /// requires a complete matrix.
    pub max_missing_fraction: Option<f64>,
    /// Pairs with |r| at or above this lose the later column. `None`
    /// disables the stage.
    pub correlation_threshold: Option<f64>,
    /// Recursive elimination target size. `None` disables the stage.
    pub k: Option<usize>,
    /// Forest retrained each elimination round; its seed is remixed per
    /// round so rounds are independent but reproducible.
    pub rfe_forest: ForestConfig,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            max_missing_fraction: Some(0.25),
            correlation_threshold: Some(0.9),
            k: Some(20),
            rfe_forest: ForestConfig::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SelectionError {
    #[error("feature matrix has no rows")]
    EmptyMatrix,
    #[error("{rows} matrix rows but {targets} targets")]
    TargetMismatch { rows: usize, targets: usize },
    #[error("targets contain a non-finite value")]
    NonFiniteTarget,
    #[error("feature {feature} of sentence {sentence_id} is missing but the missing-value stage is disabled")]
    MissingValue { feature: String, sentence_id: String },
    #[error("invalid selection config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Forest(#[from] ForestError),
}

/// Outcome of the missing-value and correlation stages plus elimination.
/// `kept`, `removed_missing`, `removed_correlated` and `removed_rfe`
/// partition the input feature names. `zero_variance` is the subset of
/// `removed_correlated` that was constant (dropped before any correlation
/// was computed). `removed_rfe` is in elimination order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub removed_missing: Vec<String>,
    pub removed_correlated: Vec<String>,
    pub zero_variance: Vec<String>,
    pub removed_rfe: Vec<String>,
    pub kept: Vec<String>,
    /// Training means for the kept columns, used to impute at predict time.
    pub imputation_means: BTreeMap<String, f64>,
}

#[derive(Debug)]
pub struct SelectionOutcome {
    pub report: SelectionReport,
    /// Kept columns only, imputed, rows in input order.
    pub matrix: DenseMatrix,
}

/// Survivors, removed column names and imputation means of the
/// missing-value stage.
pub type MissingOutcome = (DenseMatrix, Vec<String>, BTreeMap<String, f64>);

/// Drop columns whose missing fraction exceeds `max_fraction`, impute the
/// rest with column means. A surviving column with no observed values gets
/// mean 0.0.
pub fn drop_missing(
    matrix: &FeatureMatrix,
    max_fraction: f64,
) -> Result<MissingOutcome, SelectionError> {
    if !(0.0..=1.0).contains(&max_fraction) {
        return Err(SelectionError::InvalidConfig(
            "max_missing_fraction must be in [0, 1]".into(),
        ));
    }
    let n = matrix.n_rows();
    if n == 0 {
        return Err(SelectionError::EmptyMatrix);
    }
    let mut names = Vec::new();
    let mut columns = Vec::new();
    let mut removed = Vec::new();
    let mut means = BTreeMap::new();
    for name in &matrix.feature_names {
        let column = matrix.column(name)?;
        let missing = column.iter().filter(|v| v.is_none()).count();
        if missing as f64 / n as f64 > max_fraction {
            removed.push(name.clone());
            continue;
        }
        let present: Vec<f64> = column.iter().filter_map(|v| *v).collect();
        let mean = if present.is_empty() {
            0.0
        } else {
            present.iter().sum::<f64>() / present.len() as f64
        };
        columns.push(column.iter().map(|v| v.unwrap_or(mean)).collect());
        names.push(name.clone());
        means.insert(name.clone(), mean);
    }
    Ok((
        DenseMatrix {
            names,
            columns,
            n_rows: n,
        },
        removed,
        means,
    ))
}

fn is_constant(column: &[f64]) -> bool {
    column.windows(2).all(|w| w[0] == w[1])
}

/// Remove constant columns, then greedily remove the later member of every
/// pair with |r| >= threshold, scanning pairs in column order. Idempotent:
/// the surviving set contains no pair at or above the threshold.
pub fn drop_correlated(
    dense: &DenseMatrix,
    threshold: f64,
) -> Result<(DenseMatrix, Vec<String>, Vec<String>), SelectionError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(SelectionError::InvalidConfig(
            "correlation_threshold must be in (0, 1]".into(),
        ));
    }
    let p = dense.names.len();
    let mut dropped = vec![false; p];
    let mut zero_variance = Vec::new();
    for (j, column) in dense.columns.iter().enumerate() {
        if is_constant(column) {
            dropped[j] = true;
            zero_variance.push(dense.names[j].clone());
        }
    }
    let mut removed = zero_variance.clone();
    for i in 0..p {
        if dropped[i] {
            continue;
        }
        for (j, column) in dense.columns.iter().enumerate().skip(i + 1) {
            if dropped[j] {
                continue;
            }
            let r = evaluation::pearson(&dense.columns[i], column)
                .expect("constant columns removed before correlation");
            if r.abs() >= threshold {
                dropped[j] = true;
                removed.push(dense.names[j].clone());
            }
        }
    }
    let mut names = Vec::new();
    let mut columns = Vec::new();
    for ((name, column), &was_dropped) in dense.names.iter().zip(&dense.columns).zip(&dropped) {
        if !was_dropped {
            names.push(name.clone());
            columns.push(column.clone());
        }
    }
    Ok((
        DenseMatrix {
            names,
            columns,
            n_rows: dense.n_rows,
        },
        removed,
        zero_variance,
    ))
}

/// Recursive feature elimination down to `k` columns. Each round trains a
/// forest (seed remixed per round) and removes the lowest-importance
/// column, preferring the later one on ties. No-op when `k` already covers
/// the input.
pub fn rfe(
    dense: &DenseMatrix,
    targets: &[f64],
    k: usize,
    forest_cfg: &ForestConfig,
    mode: ExecMode,
) -> Result<(DenseMatrix, Vec<String>), SelectionError> {
    if k == 0 {
        return Err(SelectionError::InvalidConfig("k must be >= 1".into()));
    }
    if targets.len() != dense.n_rows {
        return Err(SelectionError::TargetMismatch {
            rows: dense.n_rows,
            targets: targets.len(),
        });
    }
    let mut current = dense.clone();
    let mut removed = Vec::new();
    let mut round = 0u64;
    while current.names.len() > k {
        let cfg = ForestConfig {
            seed: forest::mix_seed(forest_cfg.seed, round),
            ..forest_cfg.clone()
        };
        let model = forest::train(&current.columns, targets, &cfg, mode)?;
        let importances = model.importances();
        let mut worst = 0usize;
        for (j, &v) in importances.iter().enumerate() {
            if v <= importances[worst] {
                worst = j;
            }
        }
        removed.push(current.names[worst].clone());
        current.drop_column(worst);
        round += 1;
    }
    Ok((current, removed))
}

/// Run the enabled stages in order and return the partition report plus the
/// imputed matrix of kept columns.
pub fn select_features(
    matrix: &FeatureMatrix,
    targets: &[f64],
    config: &SelectionConfig,
    mode: ExecMode,
) -> Result<SelectionOutcome, SelectionError> {
    let n = matrix.n_rows();
    if n == 0 {
        return Err(SelectionError::EmptyMatrix);
    }
    if targets.len() != n {
        return Err(SelectionError::TargetMismatch {
            rows: n,
            targets: targets.len(),
        });
    }
    if targets.iter().any(|v| !v.is_finite()) {
        return Err(SelectionError::NonFiniteTarget);
    }

    let (dense, removed_missing, mut means) = match config.max_missing_fraction {
        Some(fraction) => drop_missing(matrix, fraction)?,
        None => {
            let dense = matrix.to_dense().map_err(|e| match e {
                FeatureError::MissingValue {
                    feature,
                    sentence_id,
                } => SelectionError::MissingValue {
                    feature,
                    sentence_id,
                },
                other => SelectionError::Feature(other),
            })?;
            let means = dense
                .names
                .iter()
                .zip(&dense.columns)
                .map(|(name, col)| (name.clone(), col.iter().sum::<f64>() / n as f64))
                .collect();
            (dense, Vec::new(), means)
        }
    };

    let (dense, removed_correlated, zero_variance) = match config.correlation_threshold {
        Some(threshold) => drop_correlated(&dense, threshold)?,
        None => (dense, Vec::new(), Vec::new()),
    };

    let (dense, removed_rfe) = match config.k {
        Some(k) => rfe(&dense, targets, k, &config.rfe_forest, mode)?,
        None => (dense, Vec::new()),
    };

    means.retain(|name, _| dense.names.contains(name));
    Ok(SelectionOutcome {
        report: SelectionReport {
            removed_missing,
            removed_correlated,
            zero_variance,
            removed_rfe,
            kept: dense.names.clone(),
            imputation_means: means,
        },
        matrix: dense,
    })
}
