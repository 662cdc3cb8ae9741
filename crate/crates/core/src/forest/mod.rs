//! Binary tree-ensemble classifiers: a probabilistic random forest and
//! logistic-loss gradient-boosted trees.
//!
//! Both learners quantize features into at most 256 bins before training
//! (exact for features with few distinct values) and store raw-value
//! thresholds, so prediction works on the original [`FeatureMatrix`].
//!
//! Models serialize to versioned JSON; see `docs/model_format.md`.

mod binning;
mod gbt;
mod rf;
mod tree;

pub use tree::{DecisionTree, Node};

use std::path::Path;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::FeatureMatrix;
use crate::seed::rng_for;
use crate::{Error, Result};
use binning::BinnedMatrix;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// L2 penalty on boosted leaf weights.
pub const GBT_LAMBDA: f64 = gbt::LAMBDA;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RFParams {
    pub n_estimators: usize,
    /// Fraction of columns considered at each split.
    pub max_features: f64,
    pub seed: u64,
}

impl RFParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_estimators == 0 {
            return Err(Error::Param("random forest needs at least one tree".into()));
        }
        if !(self.max_features > 0.0 && self.max_features <= 1.0) {
            return Err(Error::Param(format!("max_features must lie in (0, 1], got {}", self.max_features)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GBTParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub subsample: f64,
    pub max_depth: usize,
    pub colsample_bytree: f64,
    pub min_child_weight: f64,
    pub seed: u64,
}

impl GBTParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::Param(format!("{name} must lie in (0, 1], got {v}")))
            }
        };
        if self.n_estimators == 0 {
            return Err(Error::Param("boosting needs at least one tree".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Param(format!("learning_rate must be positive, got {}", self.learning_rate)));
        }
        unit("subsample", self.subsample)?;
        unit("colsample_bytree", self.colsample_bytree)?;
        if self.max_depth == 0 {
            return Err(Error::Param("max_depth must be at least 1".into()));
        }
        if self.min_child_weight.is_nan() || self.min_child_weight < 0.0 {
            return Err(Error::Param("min_child_weight must be non-negative".into()));
        }
        Ok(())
    }
}

impl Default for GBTParams {
    fn default() -> Self {
        GBTParams {
            n_estimators: 200,
            learning_rate: 0.05,
            subsample: 0.8,
            max_depth: 4,
            colsample_bytree: 0.8,
            min_child_weight: 1.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Rf(RFParams),
    Gbt(GBTParams),
}

impl ModelParams {
    pub fn seed(&self) -> u64 {
        match self {
            ModelParams::Rf(p) => p.seed,
            ModelParams::Gbt(p) => p.seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> ModelParams {
        match self {
            ModelParams::Rf(p) => ModelParams::Rf(RFParams { seed, ..p.clone() }),
            ModelParams::Gbt(p) => ModelParams::Gbt(GBTParams { seed, ..p.clone() }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub format_version: u32,
    pub params: ModelParams,
    pub columns: Vec<String>,
    /// Log-odds offset (boosting only).
    pub base_score: f64,
    pub trees: Vec<DecisionTree>,
    /// Set when training saw a single class; every score equals it.
    pub constant: Option<f64>,
}

fn class_balance(matrix: &FeatureMatrix) -> Result<(usize, usize)> {
    if matrix.n_rows() == 0 {
        return Err(Error::Train("training matrix has no rows".into()));
    }
    let pos = matrix.labels.iter().filter(|&&y| y).count();
    Ok((pos, matrix.n_rows() - pos))
}

fn degenerate(params: ModelParams, matrix: &FeatureMatrix, pos: usize) -> EnsembleModel {
    let prevalence = pos as f64 / matrix.n_rows() as f64;
    log::warn!("training data holds a single class; the model predicts a constant {prevalence}");
    EnsembleModel {
        format_version: MODEL_FORMAT_VERSION,
        params,
        columns: matrix.columns.clone(),
        base_score: 0.0,
        trees: Vec::new(),
        constant: Some(prevalence),
    }
}

/// Random forest of unpruned Gini trees on bootstrap samples. The score of a
/// row is the mean over trees of the leaf's class-1 fraction. Trees are
/// grown in parallel; tree `t` draws from the stream `(seed, t)`.
pub fn train_rf(matrix: &FeatureMatrix, params: &RFParams) -> Result<EnsembleModel> {
    params.validate()?;
    let (pos, neg) = class_balance(matrix)?;
    if pos == 0 || neg == 0 {
        return Ok(degenerate(ModelParams::Rf(params.clone()), matrix, pos));
    }
    let data = BinnedMatrix::new(matrix);
    let k = ((params.max_features * matrix.n_cols() as f64).ceil() as usize).clamp(1, matrix.n_cols().max(1));
    let trees: Vec<DecisionTree> = (0..params.n_estimators)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(params.seed, t as u64);
            rf::grow_tree(&data, &matrix.labels, k, &mut rng)
        })
        .collect();
    Ok(EnsembleModel {
        format_version: MODEL_FORMAT_VERSION,
        params: ModelParams::Rf(params.clone()),
        columns: matrix.columns.clone(),
        base_score: 0.0,
        trees,
        constant: None,
    })
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Mean logistic loss of margins against labels.
pub fn logistic_loss(margins: &[f64], labels: &[bool]) -> f64 {
    let total: f64 = margins
        .iter()
        .zip(labels)
        .map(|(&m, &y)| {
            // log(1 + exp(-z)) with z = m for positives, -m for negatives
            let z = if y { m } else { -m };
            if z > 0.0 {
                (-z).exp().ln_1p()
            } else {
                -z + z.exp().ln_1p()
            }
        })
        .sum();
    total / margins.len().max(1) as f64
}

/// Per-round training diagnostics of a boosted model.
#[derive(Clone, Debug, Default)]
pub struct BoostingTrace {
    /// Mean logistic loss on the full training set after each round
    /// (index 0 is the loss of the base score alone).
    pub loss: Vec<f64>,
}

/// Gradient-boosted trees on logistic loss with second-order splits.
pub fn train_gbt(matrix: &FeatureMatrix, params: &GBTParams) -> Result<EnsembleModel> {
    train_gbt_traced(matrix, params).map(|(m, _)| m)
}

pub fn train_gbt_traced(matrix: &FeatureMatrix, params: &GBTParams) -> Result<(EnsembleModel, BoostingTrace)> {
    params.validate()?;
    let (pos, neg) = class_balance(matrix)?;
    if pos == 0 || neg == 0 {
        return Ok((degenerate(ModelParams::Gbt(params.clone()), matrix, pos), BoostingTrace::default()));
    }
    let n = matrix.n_rows();
    let p = matrix.n_cols();
    let data = BinnedMatrix::new(matrix);
    let base_score = (pos as f64 / neg as f64).ln();
    let mut margins = vec![base_score; n];
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let n_rows_sampled = ((params.subsample * n as f64).floor() as usize).clamp(1, n);
    let n_cols_sampled = ((params.colsample_bytree * p as f64).floor() as usize).clamp(1, p.max(1));
    let mut trace = BoostingTrace {
        loss: vec![logistic_loss(&margins, &matrix.labels)],
    };

    let mut trees = Vec::with_capacity(params.n_estimators);
    for round in 0..params.n_estimators {
        let mut rng = rng_for(params.seed, round as u64);
        for i in 0..n {
            let prob = sigmoid(margins[i]);
            grad[i] = prob - f64::from(u8::from(matrix.labels[i]));
            hess[i] = prob * (1.0 - prob);
        }
        let rows: Vec<u32> = if n_rows_sampled == n {
            (0..n as u32).collect()
        } else {
            let mut r: Vec<u32> = sample(&mut rng, n, n_rows_sampled).into_iter().map(|i| i as u32).collect();
            r.sort_unstable();
            r
        };
        let mut features: Vec<usize> = if n_cols_sampled == p {
            (0..p).collect()
        } else {
            sample(&mut rng, p, n_cols_sampled).into_vec()
        };
        features.sort_unstable();
        let tree = gbt::grow_tree(
            &data,
            &grad,
            &hess,
            rows,
            &gbt::GrowOptions {
                features: &features,
                max_depth: params.max_depth,
                min_child_weight: params.min_child_weight,
            },
        );
        for (i, row) in matrix.rows().enumerate() {
            margins[i] += params.learning_rate * tree.predict_row(row);
        }
        trace.loss.push(logistic_loss(&margins, &matrix.labels));
        trees.push(tree);
    }
    Ok((
        EnsembleModel {
            format_version: MODEL_FORMAT_VERSION,
            params: ModelParams::Gbt(params.clone()),
            columns: matrix.columns.clone(),
            base_score,
            trees,
            constant: None,
        },
        trace,
    ))
}

/// Dispatches on the parameter kind.
pub fn train(matrix: &FeatureMatrix, params: &ModelParams) -> Result<EnsembleModel> {
    match params {
        ModelParams::Rf(p) => train_rf(matrix, p),
        ModelParams::Gbt(p) => train_gbt(matrix, p),
    }
}

impl EnsembleModel {
    pub fn is_rf(&self) -> bool {
        matches!(self.params, ModelParams::Rf(_))
    }

    /// Score of a single row, in [0, 1].
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        if let Some(c) = self.constant {
            return c;
        }
        match &self.params {
            ModelParams::Rf(_) => {
                let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
                (sum / self.trees.len() as f64).clamp(0.0, 1.0)
            }
            ModelParams::Gbt(p) => {
                let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
                sigmoid(self.base_score + p.learning_rate * sum)
            }
        }
    }

    pub fn check_schema(&self, columns: &[String]) -> Result<()> {
        for i in 0..self.columns.len().max(columns.len()) {
            let expected = self.columns.get(i);
            let found = columns.get(i);
            if expected != found {
                return Err(Error::SchemaMismatch {
                    index: i,
                    expected: expected.cloned().unwrap_or_else(|| "<none>".into()),
                    found: found.cloned().unwrap_or_else(|| "<none>".into()),
                });
            }
        }
        Ok(())
    }

    /// One score per row of `matrix`.
    pub fn predict(&self, matrix: &FeatureMatrix) -> Result<Vec<f64>> {
        self.check_schema(&matrix.columns)?;
        Ok(matrix.rows().map(|r| self.predict_row(r)).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<EnsembleModel> {
        let model: EnsembleModel = serde_json::from_str(text)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Input(format!(
                "unsupported model format version {} (expected {MODEL_FORMAT_VERSION})",
                model.format_version
            )));
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::from(e).in_file(path))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<EnsembleModel> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        EnsembleModel::from_json(&text).map_err(|e| e.in_file(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> FeatureMatrix {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let labels = (0..40).map(|i| i >= 20).collect();
        FeatureMatrix::from_rows(vec!["a".into(), "b".into()], &rows, labels).unwrap()
    }

    #[test]
    fn single_class_gives_constant_model() {
        let mut m = toy();
        m.labels = vec![true; 40];
        let model = train_rf(
            &m,
            &RFParams {
                n_estimators: 5,
                max_features: 0.5,
                seed: 1,
            },
        )
        .unwrap();
        assert!(model.predict(&m).unwrap().iter().all(|&s| s == 1.0));
    }

    #[test]
    fn schema_mismatch_names_column() {
        let m = toy();
        let model = train_gbt(&m, &GBTParams::default()).unwrap();
        let mut other = m.clone();
        other.columns[1] = "zzz".into();
        let err = model.predict(&other).unwrap_err();
        assert!(err.to_string().contains("zzz"), "{err}");
    }

    #[test]
    fn empty_matrix_predicts_nothing() {
        let m = toy();
        let model = train_gbt(&m, &GBTParams::default()).unwrap();
        let empty = FeatureMatrix::from_rows(m.columns.clone(), &[], vec![]).unwrap();
        assert!(model.predict(&empty).unwrap().is_empty());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = toy();
        let model = train_gbt(&m, &GBTParams::default()).unwrap();
        let back = EnsembleModel::from_json(&model.to_json().unwrap()).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.predict(&m).unwrap(), model.predict(&m).unwrap());
    }

    #[test]
    fn invalid_params_are_rejected() {
        let bad = RFParams {
            n_estimators: 10,
            max_features: 0.0,
            seed: 0,
        };
        assert!(train_rf(&toy(), &bad).is_err());
        let bad = GBTParams {
            subsample: 1.5,
            ..GBTParams::default()
        };
        assert!(train_gbt(&toy(), &bad).is_err());
    }
}
