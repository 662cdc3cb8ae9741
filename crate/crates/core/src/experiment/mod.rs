//! Experiment orchestration: the six tree-based approaches, random-search
//! hyperparameter optimization under three validation strategies, and
//! evaluation on the test split with optional smoothing.

mod model;
mod prep;
mod search;

pub use model::{BucketModel, CalibrationSet, Classifiers, PipelineOptions, TrainedApproach};
pub use prep::{prepare, PrepConfig, PreparedData, Truncation};
pub use search::{
    evaluate_config, evaluate_on_test, rank_candidates, run_search, split_validation, CandidateScore, ConfigEvaluation,
    ReportSlice, SearchOptions, SearchOutcome, SearchScope, Selection, TestEvaluation, DEFAULT_SEARCH_ITERATIONS,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::EncodingKind;
use crate::forest::{GBTParams, ModelParams, RFParams};
use crate::seed::rng_for;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassifierKind {
    #[serde(rename = "rf")]
    RandomForest,
    #[serde(rename = "xgb")]
    BoostedTrees,
}

/// One row of the approach table: encoding, bucketing and classifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Approach {
    #[serde(rename = "RF_agg")]
    RfAgg,
    #[serde(rename = "RF_idx_pad")]
    RfIdxPad,
    #[serde(rename = "RF_idx_mul")]
    RfIdxMul,
    #[serde(rename = "XGB_agg")]
    XgbAgg,
    #[serde(rename = "XGB_idx_pad")]
    XgbIdxPad,
    #[serde(rename = "XGB_idx_mul")]
    XgbIdxMul,
}

impl Approach {
    pub const ALL: [Approach; 6] = [
        Approach::RfAgg,
        Approach::RfIdxPad,
        Approach::RfIdxMul,
        Approach::XgbAgg,
        Approach::XgbIdxPad,
        Approach::XgbIdxMul,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Approach::RfAgg => "RF_agg",
            Approach::RfIdxPad => "RF_idx_pad",
            Approach::RfIdxMul => "RF_idx_mul",
            Approach::XgbAgg => "XGB_agg",
            Approach::XgbIdxPad => "XGB_idx_pad",
            Approach::XgbIdxMul => "XGB_idx_mul",
        }
    }

    pub fn encoding(self) -> EncodingKind {
        match self {
            Approach::RfAgg | Approach::XgbAgg => EncodingKind::Aggregation,
            Approach::RfIdxPad | Approach::XgbIdxPad => EncodingKind::IndexPadded,
            Approach::RfIdxMul | Approach::XgbIdxMul => EncodingKind::IndexBucketed,
        }
    }

    /// One classifier per prefix length.
    pub fn is_multiclassifier(self) -> bool {
        self.encoding() == EncodingKind::IndexBucketed
    }

    pub fn classifier(self) -> ClassifierKind {
        match self {
            Approach::RfAgg | Approach::RfIdxPad | Approach::RfIdxMul => ClassifierKind::RandomForest,
            _ => ClassifierKind::BoostedTrees,
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Approach::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Param(format!("unknown approach `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "snake_case")]
pub enum ParamDistribution {
    UniformInt { low: i64, high: i64 },
    Uniform { low: f64, high: f64 },
    LogUniform { low: f64, high: f64 },
}

impl ParamDistribution {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            ParamDistribution::UniformInt { low, high } => rng.gen_range(low..=high) as f64,
            ParamDistribution::Uniform { low, high } if low == high => low,
            ParamDistribution::Uniform { low, high } => rng.gen_range(low..high),
            ParamDistribution::LogUniform { low, high } if low == high => low,
            ParamDistribution::LogUniform { low, high } => rng.gen_range(low.ln()..high.ln()).exp().clamp(low, high),
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            ParamDistribution::UniformInt { low, high } => (low as f64, high as f64),
            ParamDistribution::Uniform { low, high } | ParamDistribution::LogUniform { low, high } => (low, high),
        }
    }
}

/// Sampling distributions for one classifier's hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub classifier: ClassifierKind,
    pub params: BTreeMap<String, ParamDistribution>,
}

impl SearchSpace {
    pub fn random_forest() -> SearchSpace {
        SearchSpace {
            classifier: ClassifierKind::RandomForest,
            params: BTreeMap::from([
                ("n_estimators".into(), ParamDistribution::UniformInt { low: 150, high: 1000 }),
                ("max_features".into(), ParamDistribution::LogUniform { low: 0.01, high: 0.9 }),
            ]),
        }
    }

    pub fn boosted_trees() -> SearchSpace {
        SearchSpace {
            classifier: ClassifierKind::BoostedTrees,
            params: BTreeMap::from([
                ("n_estimators".into(), ParamDistribution::UniformInt { low: 150, high: 1000 }),
                ("learning_rate".into(), ParamDistribution::Uniform { low: 0.01, high: 0.07 }),
                ("subsample".into(), ParamDistribution::Uniform { low: 0.5, high: 1.0 }),
                ("max_depth".into(), ParamDistribution::UniformInt { low: 3, high: 9 }),
                ("colsample_bytree".into(), ParamDistribution::Uniform { low: 0.5, high: 1.0 }),
                ("min_child_weight".into(), ParamDistribution::UniformInt { low: 1, high: 3 }),
            ]),
        }
    }

    pub fn for_classifier(kind: ClassifierKind) -> SearchSpace {
        match kind {
            ClassifierKind::RandomForest => Self::random_forest(),
            ClassifierKind::BoostedTrees => Self::boosted_trees(),
        }
    }

    /// Setting drawn for `iteration`; a pure function of `(seed, iteration)`.
    /// The returned parameters carry `seed` as their training seed.
    pub fn sample(&self, seed: u64, iteration: usize) -> Result<ModelParams> {
        let mut rng = rng_for(seed, iteration as u64);
        let values: BTreeMap<&str, f64> = self.params.iter().map(|(k, d)| (k.as_str(), d.sample(&mut rng))).collect();
        let get = |name: &str| {
            values
                .get(name)
                .copied()
                .ok_or_else(|| Error::Param(format!("search space lacks `{name}`")))
        };
        let params = match self.classifier {
            ClassifierKind::RandomForest => ModelParams::Rf(RFParams {
                n_estimators: get("n_estimators")? as usize,
                max_features: get("max_features")?,
                seed,
            }),
            ClassifierKind::BoostedTrees => ModelParams::Gbt(GBTParams {
                n_estimators: get("n_estimators")? as usize,
                learning_rate: get("learning_rate")?,
                subsample: get("subsample")?,
                max_depth: get("max_depth")? as usize,
                colsample_bytree: get("colsample_bytree")?,
                min_child_weight: get("min_child_weight")?,
                seed,
            }),
        };
        Ok(params)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    /// Validation AUC of a single training run.
    Auc1Run,
    /// Mean validation AUC over five runs.
    Auc5Run,
    /// Weighted mean of AUC and inter-run stability over five runs.
    Combined5Run,
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auc_1run" => Ok(StrategyKind::Auc1Run),
            "auc_5run" => Ok(StrategyKind::Auc5Run),
            "combined_5run" => Ok(StrategyKind::Combined5Run),
            other => Err(Error::Param(format!(
                "unknown strategy `{other}` (expected auc_1run, auc_5run or combined_5run)"
            ))),
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Auc1Run => "auc_1run",
            StrategyKind::Auc5Run => "auc_5run",
            StrategyKind::Combined5Run => "combined_5run",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationStrategy {
    pub kind: StrategyKind,
    pub runs: usize,
    pub auc_weight: f64,
    pub stability_weight: f64,
    /// When false every run reuses the first run's seed.
    pub distinct_run_seeds: bool,
}

impl ValidationStrategy {
    pub fn new(kind: StrategyKind) -> Self {
        let (runs, stability_weight) = match kind {
            StrategyKind::Auc1Run => (1, 0.0),
            StrategyKind::Auc5Run => (5, 0.0),
            StrategyKind::Combined5Run => (5, 5.0),
        };
        ValidationStrategy {
            kind,
            runs,
            auc_weight: 1.0,
            stability_weight,
            distinct_run_seeds: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approach_names_round_trip() {
        for a in Approach::ALL {
            assert_eq!(a.name().parse::<Approach>().unwrap(), a);
        }
        assert!("LSTM".parse::<Approach>().is_err());
        assert!(Approach::XgbIdxMul.is_multiclassifier());
        assert_eq!(Approach::RfAgg.classifier(), ClassifierKind::RandomForest);
    }

    #[test]
    fn samples_respect_bounds() {
        let rf = SearchSpace::random_forest();
        let gbt = SearchSpace::boosted_trees();
        for it in 0..200 {
            let ModelParams::Rf(p) = rf.sample(3, it).unwrap() else { panic!() };
            assert!((0.01..=0.9).contains(&p.max_features));
            assert!((150..=1000).contains(&p.n_estimators));
            let ModelParams::Gbt(g) = gbt.sample(3, it).unwrap() else { panic!() };
            assert!((0.01..=0.07).contains(&g.learning_rate));
            assert!((0.5..=1.0).contains(&g.subsample));
            assert!((3..=9).contains(&g.max_depth));
            assert!((0.5..=1.0).contains(&g.colsample_bytree));
            assert!([1.0, 2.0, 3.0].contains(&g.min_child_weight));
        }
    }

    #[test]
    fn sampling_is_deterministic_and_varied() {
        let space = SearchSpace::boosted_trees();
        assert_eq!(space.sample(9, 4).unwrap(), space.sample(9, 4).unwrap());
        let draws: Vec<_> = (0..16).map(|i| space.sample(9, i).unwrap()).collect();
        for i in 0..16 {
            for j in i + 1..16 {
                assert_ne!(draws[i], draws[j]);
            }
        }
    }

    #[test]
    fn strategy_defaults() {
        let c = ValidationStrategy::new(StrategyKind::Combined5Run);
        assert_eq!((c.runs, c.auc_weight, c.stability_weight), (5, 1.0, 5.0));
        assert_eq!(ValidationStrategy::new(StrategyKind::Auc1Run).runs, 1);
        assert_eq!("combined_5run".parse::<StrategyKind>().unwrap(), StrategyKind::Combined5Run);
    }
}
