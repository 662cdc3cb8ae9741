use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{CalibrationSet, PipelineOptions, TrainedApproach};
use super::{Approach, SearchSpace, StrategyKind, ValidationStrategy};
use crate::encoding::{route_bucket, LabeledPrefix};
use crate::event_log::EventLog;
use crate::forest::ModelParams;
use crate::metrics::{auc, mspd, overall_auc, EvaluationReport, RunMatrix, ScoreSeries};
use crate::seed::{derive_seed, rng_for};
use crate::smoothing::{smooth, SmoothingParams};
use crate::{Error, Result};

pub const DEFAULT_SEARCH_ITERATIONS: usize = 16;
const MIN_VALIDATION_CASES: usize = 5;
const SPLIT_ATTEMPTS: u64 = 10;

/// Whether multiclassifier buckets share one configuration or each pick
/// their own.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchScope {
    #[default]
    Shared,
    PerBucket,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub approach: Approach,
    pub strategy: ValidationStrategy,
    pub iterations: usize,
    pub seed: u64,
    pub scope: SearchScope,
    pub pipeline: PipelineOptions,
    pub space: SearchSpace,
}

impl SearchOptions {
    pub fn new(approach: Approach, strategy: StrategyKind, pipeline: PipelineOptions, seed: u64) -> Self {
        SearchOptions {
            approach,
            strategy: ValidationStrategy::new(strategy),
            iterations: DEFAULT_SEARCH_ITERATIONS,
            seed,
            scope: SearchScope::Shared,
            pipeline,
            space: SearchSpace::for_classifier(approach.classifier()),
        }
    }
}

/// Validation metrics of one configuration over its runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub run_aucs: Vec<f64>,
    pub mean_auc: f64,
    /// Mean squared pairwise difference between runs; `None` with one run.
    pub mspd: Option<f64>,
}

impl CandidateScore {
    fn from_runs(run_aucs: Vec<f64>, run_scores: Vec<Vec<f64>>) -> Result<CandidateScore> {
        let mean_auc = run_aucs.iter().sum::<f64>() / run_aucs.len() as f64;
        let mspd = if run_scores.len() >= 2 {
            Some(mspd(&RunMatrix::new(run_scores)?)?)
        } else {
            None
        };
        Ok(CandidateScore {
            run_aucs,
            mean_auc,
            mspd,
        })
    }
}

/// One sampled configuration and its validation results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEvaluation {
    pub iteration: usize,
    pub params: ModelParams,
    pub run_seeds: Vec<u64>,
    /// `None` when training or scoring failed.
    pub score: Option<CandidateScore>,
    /// Scores restricted to each bucket (per-bucket scope only).
    pub per_bucket: BTreeMap<usize, CandidateScore>,
    pub error: Option<String>,
}

/// Splits training cases into inner-train and validation parts (80/20,
/// random, both parts containing both classes).
pub fn split_validation(log: &EventLog, seed: u64) -> Result<(EventLog, EventLog)> {
    let n = log.traces.len();
    if n < MIN_VALIDATION_CASES {
        return Err(Error::Split(format!(
            "need at least {MIN_VALIDATION_CASES} training cases for validation, got {n}"
        )));
    }
    let n_inner = ((0.8 * n as f64).round() as usize).clamp(1, n - 1);
    let has_both = |l: &EventLog| {
        l.traces.iter().any(|t| t.outcome == Some(true)) && l.traces.iter().any(|t| t.outcome == Some(false))
    };
    for attempt in 0..SPLIT_ATTEMPTS {
        let mut ids = log.case_ids();
        ids.shuffle(&mut rng_for(seed, attempt));
        let inner: BTreeSet<&str> = ids[..n_inner].iter().copied().collect();
        let validation: BTreeSet<&str> = ids[n_inner..].iter().copied().collect();
        let (a, b) = (log.subset(&inner), log.subset(&validation));
        if has_both(&a) && has_both(&b) {
            return Ok((a, b));
        }
    }
    Err(Error::Split(format!(
        "no validation split with both classes on each side after {SPLIT_ATTEMPTS} attempts"
    )))
}

/// AUC over validation prefixes, averaged across prefix lengths.
fn validation_auc(prefixes: &[LabeledPrefix<'_>], scores: &[f64], options: &PipelineOptions) -> Result<f64> {
    let mut by_len: BTreeMap<usize, (Vec<f64>, Vec<bool>)> = BTreeMap::new();
    for (p, s) in prefixes.iter().zip(scores) {
        let entry = by_len.entry(p.len).or_default();
        entry.0.push(*s);
        entry.1.push(p.outcome());
    }
    let mut aucs = BTreeMap::new();
    let mut counts = BTreeMap::new();
    for (len, (s, y)) in by_len {
        counts.insert(len, s.len());
        if let Ok(v) = auc(&s, &y) {
            aucs.insert(len, v);
        }
    }
    overall_auc(&aucs, &counts, options.weighting)
}

fn run_seeds(strategy: &ValidationStrategy, seed: u64) -> Vec<u64> {
    let base = derive_seed(seed, 3);
    (0..strategy.runs)
        .map(|r| derive_seed(base, if strategy.distinct_run_seeds { r as u64 } else { 0 }))
        .collect()
}

fn train_scores(
    approach: Approach,
    params: &ModelParams,
    inner: &EventLog,
    prefixes: &[LabeledPrefix<'_>],
    options: &PipelineOptions,
) -> Result<(Vec<f64>, BTreeSet<usize>)> {
    let model = TrainedApproach::train(approach, params, inner, options)?;
    Ok((model.scores(prefixes, false)?, model.bucket_lengths()))
}

/// Trains `params` once per run seed on `inner` and scores the validation
/// prefixes. Per-bucket scores are filled when `per_bucket` is set.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_config(
    approach: Approach,
    iteration: usize,
    params: &ModelParams,
    inner: &EventLog,
    validation: &EventLog,
    seeds: &[u64],
    options: &PipelineOptions,
    per_bucket: bool,
) -> ConfigEvaluation {
    let prefixes = crate::encoding::extract_prefixes(validation, options.min_prefix_len, options.max_prefix_len);
    let result = prefixes.and_then(|prefixes| {
        let runs: Vec<(Vec<f64>, BTreeSet<usize>)> = seeds
            .par_iter()
            .map(|&s| train_scores(approach, &params.with_seed(s), inner, &prefixes, options))
            .collect::<Result<_>>()?;
        score_runs(&prefixes, runs, options, per_bucket)
    });
    let (score, buckets, error) = match result {
        Ok((s, b)) => (Some(s), b, None),
        Err(e) => {
            log::warn!("configuration {iteration} failed: {e}");
            (None, BTreeMap::new(), Some(e.to_string()))
        }
    };
    ConfigEvaluation {
        iteration,
        params: params.clone(),
        run_seeds: seeds.to_vec(),
        score,
        per_bucket: buckets,
        error,
    }
}

fn score_runs(
    prefixes: &[LabeledPrefix<'_>],
    runs: Vec<(Vec<f64>, BTreeSet<usize>)>,
    options: &PipelineOptions,
    per_bucket: bool,
) -> Result<(CandidateScore, BTreeMap<usize, CandidateScore>)> {
    let run_aucs = runs
        .iter()
        .map(|(s, _)| validation_auc(prefixes, s, options))
        .collect::<Result<Vec<_>>>()?;
    let mut buckets = BTreeMap::new();
    if per_bucket {
        let lengths = &runs[0].1;
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, p) in prefixes.iter().enumerate() {
            if let Some(len) = route_bucket(lengths, p.len) {
                members.entry(len).or_default().push(i);
            }
        }
        for (len, idx) in members {
            let labels: Vec<bool> = idx.iter().map(|&i| prefixes[i].outcome()).collect();
            let sub: Vec<Vec<f64>> = runs.iter().map(|(s, _)| idx.iter().map(|&i| s[i]).collect()).collect();
            let aucs: Option<Vec<f64>> = sub.iter().map(|s| auc(s, &labels).ok()).collect();
            if let Some(aucs) = aucs {
                buckets.insert(len, CandidateScore::from_runs(aucs, sub)?);
            }
        }
    }
    let all: Vec<Vec<f64>> = runs.into_iter().map(|(s, _)| s).collect();
    Ok((CandidateScore::from_runs(run_aucs, all)?, buckets))
}

/// Goodness of each candidate (`None` for failed ones). The stability term
/// is `1 - mspd / max mspd` over the scored candidates.
pub fn rank_candidates(scores: &[Option<&CandidateScore>], strategy: &ValidationStrategy) -> Vec<Option<f64>> {
    let max_mspd = scores
        .iter()
        .flatten()
        .filter_map(|s| s.mspd)
        .fold(0.0_f64, f64::max);
    scores
        .iter()
        .map(|s| {
            let s = (*s)?;
            if strategy.stability_weight == 0.0 {
                return Some(s.mean_auc);
            }
            let stability = match s.mspd {
                Some(m) if max_mspd > 0.0 => 1.0 - m / max_mspd,
                _ => 1.0,
            };
            Some(
                (strategy.auc_weight * s.mean_auc + strategy.stability_weight * stability)
                    / (strategy.auc_weight + strategy.stability_weight),
            )
        })
        .collect()
}

/// Index of the highest goodness; ties go to the earliest candidate.
fn best(goodness: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, g) in goodness.iter().enumerate() {
        if let Some(g) = *g {
            if best.is_none_or(|(_, b)| g > b) {
                best = Some((i, g));
            }
        }
    }
    best.map(|(i, _)| i)
}

/// Configuration chosen for the final model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    Shared { iteration: usize, goodness: f64 },
    PerBucket { iterations: BTreeMap<usize, usize>, fallback: usize },
}

/// Record of a search, serializable for run manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub options: SearchOptions,
    pub candidates: Vec<ConfigEvaluation>,
    pub goodness: Vec<Option<f64>>,
    pub selection: Selection,
    /// Validation scores of the selected configuration.
    pub selected_score: CandidateScore,
    pub final_seed: u64,
    pub calibration: CalibrationSet,
}

impl SearchOutcome {
    pub fn selected_params(&self) -> &ModelParams {
        let i = match &self.selection {
            Selection::Shared { iteration, .. } => *iteration,
            Selection::PerBucket { fallback, .. } => *fallback,
        };
        &self.candidates[i].params
    }
}

fn params_for<'a>(
    candidates: &'a [ConfigEvaluation],
    selection: &Selection,
    seed: u64,
) -> impl Fn(Option<usize>) -> ModelParams + 'a {
    let selection = selection.clone();
    move |len| {
        let (i, bucket_seed) = match (&selection, len) {
            (Selection::Shared { iteration, .. }, None) => (*iteration, seed),
            (Selection::Shared { iteration, .. }, Some(l)) => (*iteration, derive_seed(seed, l as u64)),
            (Selection::PerBucket { iterations, fallback }, Some(l)) => {
                (iterations.get(&l).copied().unwrap_or(*fallback), derive_seed(seed, l as u64))
            }
            (Selection::PerBucket { fallback, .. }, None) => (*fallback, seed),
        };
        candidates[i].params.with_seed(bucket_seed)
    }
}

/// Random search over `options.space`, model selection, retraining on the
/// whole training log and Platt calibration on held-out validation scores.
pub fn run_search(train: &EventLog, options: &SearchOptions) -> Result<(SearchOutcome, TrainedApproach)> {
    if options.iterations == 0 || options.strategy.runs == 0 {
        return Err(Error::Param("search needs at least one iteration and one run".into()));
    }
    let (inner, validation) = split_validation(train, derive_seed(options.seed, 1))?;
    let sample_seed = derive_seed(options.seed, 2);
    let seeds = run_seeds(&options.strategy, options.seed);
    let per_bucket = options.scope == SearchScope::PerBucket && options.approach.is_multiclassifier();

    let params: Vec<ModelParams> = (0..options.iterations)
        .map(|i| options.space.sample(sample_seed, i))
        .collect::<Result<_>>()?;
    let candidates: Vec<ConfigEvaluation> = params
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            evaluate_config(options.approach, i, p, &inner, &validation, &seeds, &options.pipeline, per_bucket)
        })
        .collect();

    let overall: Vec<Option<&CandidateScore>> = candidates.iter().map(|c| c.score.as_ref()).collect();
    let goodness = rank_candidates(&overall, &options.strategy);
    let winner = best(&goodness).ok_or_else(|| {
        Error::Search(format!("all {} configurations failed", candidates.len()))
    })?;
    let selection = if per_bucket {
        let lengths: BTreeSet<usize> = candidates.iter().flat_map(|c| c.per_bucket.keys().copied()).collect();
        let iterations = lengths
            .into_iter()
            .filter_map(|len| {
                let scores: Vec<Option<&CandidateScore>> = candidates.iter().map(|c| c.per_bucket.get(&len)).collect();
                best(&rank_candidates(&scores, &options.strategy)).map(|i| (len, i))
            })
            .collect();
        Selection::PerBucket {
            iterations,
            fallback: winner,
        }
    } else {
        Selection::Shared {
            iteration: winner,
            goodness: goodness[winner].expect("winner is scored"),
        }
    };
    log::info!(
        "{} {}: selected configuration {} of {}",
        options.approach,
        options.strategy.kind,
        winner,
        candidates.len()
    );

    let calibration = {
        let reference =
            TrainedApproach::train_with(options.approach, &inner, &options.pipeline, params_for(&candidates, &selection, seeds[0]))?;
        reference.fit_calibration(&validation)?
    };
    let final_seed = derive_seed(options.seed, 4);
    let mut model =
        TrainedApproach::train_with(options.approach, train, &options.pipeline, params_for(&candidates, &selection, final_seed))?;
    model.set_calibration(&calibration);

    let selected_score = candidates[winner].score.clone().expect("winner is scored");
    Ok((
        SearchOutcome {
            options: options.clone(),
            candidates,
            goodness,
            selection,
            selected_score,
            final_seed,
            calibration,
        },
        model,
    ))
}

/// One report, raw (`alpha == None`) or smoothed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSlice {
    pub alpha: Option<f64>,
    pub report: EvaluationReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestEvaluation {
    /// Test cases shorter than the minimum prefix length.
    pub skipped: usize,
    pub slices: Vec<ReportSlice>,
}

/// Scores the test log with calibrated scores and reports accuracy and
/// stability unsmoothed and for each smoothing weight.
pub fn evaluate_on_test(model: &TrainedApproach, test: &EventLog, alphas: &[f64]) -> Result<TestEvaluation> {
    let (series, skipped) = model.score_series(test, true)?;
    let weighting = model.options.weighting;
    let mut slices = vec![ReportSlice {
        alpha: None,
        report: EvaluationReport::from_series(&series, weighting)?,
    }];
    for &alpha in alphas {
        let params = SmoothingParams::new(alpha)?;
        let smoothed: Vec<ScoreSeries> = series.iter().map(|s| smooth(s, params)).collect::<Result<_>>()?;
        slices.push(ReportSlice {
            alpha: Some(alpha),
            report: EvaluationReport::from_series(&smoothed, weighting)?,
        });
    }
    Ok(TestEvaluation { skipped, slices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{signal_log, SignalLogSpec};

    fn score(mean_auc: f64, mspd: Option<f64>) -> CandidateScore {
        CandidateScore {
            run_aucs: vec![mean_auc],
            mean_auc,
            mspd,
        }
    }

    #[test]
    fn combined_goodness_trades_auc_for_stability() {
        let a = score(0.80, Some(0.04));
        let b = score(0.78, Some(0.01));
        let strategy = ValidationStrategy::new(StrategyKind::Combined5Run);
        let g = rank_candidates(&[Some(&a), Some(&b), None], &strategy);
        assert!((g[0].unwrap() - 0.80 / 6.0).abs() < 1e-12);
        assert!((g[1].unwrap() - (0.78 + 5.0 * 0.75) / 6.0).abs() < 1e-12);
        assert_eq!(g[2], None);
        assert_eq!(best(&g), Some(1));
        let auc_only = rank_candidates(&[Some(&a), Some(&b)], &ValidationStrategy::new(StrategyKind::Auc5Run));
        assert_eq!(best(&auc_only), Some(0));
    }

    #[test]
    fn ties_pick_earliest() {
        assert_eq!(best(&[None, Some(0.5), Some(0.5)]), Some(1));
        assert_eq!(best(&[None, None]), None);
    }

    #[test]
    fn validation_split_keeps_both_classes() {
        let log = signal_log(&SignalLogSpec {
            n_cases: 50,
            ..SignalLogSpec::default()
        });
        let (inner, val) = split_validation(&log, 11).unwrap();
        assert_eq!(inner.traces.len() + val.traces.len(), 50);
        assert_eq!(val.traces.len(), 10);
        assert_eq!(split_validation(&log, 11).unwrap().1, val);
    }
}
