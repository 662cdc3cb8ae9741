use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Approach;
use crate::calibration::{fit_platt, PlattModel};
use crate::encoding::{bucket_by_length, extract_prefixes, route_bucket, EncoderSpec, EncodingKind, LabeledPrefix, Vocabulary};
use crate::event_log::EventLog;
use crate::forest::{self, EnsembleModel, ModelParams};
use crate::metrics::{AucWeighting, ScoreSeries};
use crate::seed::derive_seed;
use crate::{Error, Result};

/// Settings shared by training and evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub min_prefix_len: usize,
    /// Longest prefix encoded (the truncation length).
    pub max_prefix_len: usize,
    pub weighting: AucWeighting,
    /// Fit one Platt model per bucket (multiclassifiers) instead of a pooled one.
    pub per_bucket_calibration: bool,
}

impl PipelineOptions {
    pub fn new(max_prefix_len: usize) -> Self {
        PipelineOptions {
            min_prefix_len: 1,
            max_prefix_len,
            weighting: AucWeighting::OngoingCases,
            per_bucket_calibration: true,
        }
    }
}

/// Encoder, classifier and optional calibration for one bucket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BucketModel {
    pub encoder: EncoderSpec,
    pub model: EnsembleModel,
    pub calibration: Option<PlattModel>,
}

impl BucketModel {
    fn raw_scores(&self, prefixes: &[LabeledPrefix<'_>]) -> Result<Vec<f64>> {
        if prefixes.is_empty() {
            return Ok(Vec::new());
        }
        let matrix = self.encoder.encode(prefixes)?;
        self.model.predict(&matrix)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Classifiers {
    Single(BucketModel),
    /// Keyed by prefix length.
    PerLength(BTreeMap<usize, BucketModel>),
}

/// Platt models fitted on held-out prefixes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSet {
    pub pooled: Option<PlattModel>,
    pub per_bucket: BTreeMap<usize, PlattModel>,
}

/// A trained approach: encoder(s), classifier(s) and calibration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedApproach {
    pub approach: Approach,
    pub options: PipelineOptions,
    pub classifiers: Classifiers,
}

impl TrainedApproach {
    /// Trains with one parameter setting. Multiclassifier buckets share the
    /// setting and use the seed derived from `(params.seed, length)`.
    pub fn train(approach: Approach, params: &ModelParams, log: &EventLog, options: &PipelineOptions) -> Result<Self> {
        Self::train_with(approach, log, options, |len| match len {
            None => params.clone(),
            Some(l) => params.with_seed(derive_seed(params.seed(), l as u64)),
        })
    }

    /// Trains with a per-bucket parameter choice (`None` for single
    /// classifiers).
    pub fn train_with(
        approach: Approach,
        log: &EventLog,
        options: &PipelineOptions,
        params_for: impl Fn(Option<usize>) -> ModelParams,
    ) -> Result<Self> {
        let prefixes = extract_prefixes(log, options.min_prefix_len, options.max_prefix_len)?;
        if prefixes.is_empty() {
            return Err(Error::Train("training log yields no prefixes".into()));
        }
        let vocabulary = Vocabulary::fit(&log.attributes, &prefixes)?;
        let classifiers = match approach.encoding() {
            EncodingKind::Aggregation => Classifiers::Single(fit_bucket(
                EncoderSpec::aggregation(vocabulary),
                &prefixes,
                &params_for(None),
            )?),
            EncodingKind::IndexPadded => Classifiers::Single(fit_bucket(
                EncoderSpec::index(vocabulary, options.max_prefix_len, EncodingKind::IndexPadded)?,
                &prefixes,
                &params_for(None),
            )?),
            EncodingKind::IndexBucketed => {
                let mut buckets = BTreeMap::new();
                for (len, bucket) in bucket_by_length(&prefixes) {
                    let encoder = EncoderSpec::index(vocabulary.clone(), len, EncodingKind::IndexBucketed)?;
                    buckets.insert(len, fit_bucket(encoder, &bucket, &params_for(Some(len)))?);
                }
                Classifiers::PerLength(buckets)
            }
        };
        Ok(TrainedApproach {
            approach,
            options: options.clone(),
            classifiers,
        })
    }

    pub fn bucket_lengths(&self) -> BTreeSet<usize> {
        match &self.classifiers {
            Classifiers::Single(_) => BTreeSet::new(),
            Classifiers::PerLength(b) => b.keys().copied().collect(),
        }
    }

    /// Scores of every prefix, routed to its bucket. Prefixes longer than
    /// their bucket are cut to the bucket length.
    pub fn scores(&self, prefixes: &[LabeledPrefix<'_>], calibrated: bool) -> Result<Vec<f64>> {
        let finish = |bucket: &BucketModel, raw: Vec<f64>| match (&bucket.calibration, calibrated) {
            (Some(platt), true) => platt.apply(&raw),
            _ => raw,
        };
        match &self.classifiers {
            Classifiers::Single(bucket) => Ok(finish(bucket, bucket.raw_scores(prefixes)?)),
            Classifiers::PerLength(buckets) => {
                let lengths: BTreeSet<usize> = buckets.keys().copied().collect();
                let mut routed: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for (i, p) in prefixes.iter().enumerate() {
                    let len = route_bucket(&lengths, p.len).ok_or_else(|| Error::Train("no trained buckets".into()))?;
                    routed.entry(len).or_default().push(i);
                }
                let mut out = vec![0.0; prefixes.len()];
                for (len, indices) in routed {
                    let bucket = &buckets[&len];
                    let batch: Vec<LabeledPrefix<'_>> = indices.iter().map(|&i| prefixes[i].shortened(len)).collect();
                    let scores = finish(bucket, bucket.raw_scores(&batch)?);
                    for (i, s) in indices.into_iter().zip(scores) {
                        out[i] = s;
                    }
                }
                Ok(out)
            }
        }
    }

    /// Prefixes of `log` this model scores, in case order then length order.
    pub fn prefixes<'a>(&self, log: &'a EventLog) -> Result<Vec<LabeledPrefix<'a>>> {
        extract_prefixes(log, self.options.min_prefix_len, self.options.max_prefix_len)
    }

    /// One score series per case with at least `min_prefix_len` events; the
    /// second value counts skipped cases.
    pub fn score_series(&self, log: &EventLog, calibrated: bool) -> Result<(Vec<ScoreSeries>, usize)> {
        let prefixes = self.prefixes(log)?;
        let scores = self.scores(&prefixes, calibrated)?;
        let mut series: Vec<ScoreSeries> = Vec::new();
        for (p, s) in prefixes.iter().zip(scores) {
            match series.last_mut() {
                Some(last) if last.case_id == p.case_id() => last.scores.push(s),
                _ => series.push(ScoreSeries::new(p.case_id(), p.outcome(), vec![s])),
            }
        }
        let skipped = log.traces.len() - series.len();
        Ok((series, skipped))
    }

    /// Fits Platt models on the scores this model gives to `log`.
    pub fn fit_calibration(&self, log: &EventLog) -> Result<CalibrationSet> {
        let prefixes = self.prefixes(log)?;
        let raw = self.scores(&prefixes, false)?;
        let labels: Vec<bool> = prefixes.iter().map(LabeledPrefix::outcome).collect();
        let mut set = CalibrationSet {
            pooled: usable_platt(&raw, &labels),
            per_bucket: BTreeMap::new(),
        };
        if let Classifiers::PerLength(buckets) = &self.classifiers {
            if self.options.per_bucket_calibration {
                let lengths: BTreeSet<usize> = buckets.keys().copied().collect();
                let mut grouped: BTreeMap<usize, (Vec<f64>, Vec<bool>)> = BTreeMap::new();
                for ((p, s), y) in prefixes.iter().zip(&raw).zip(&labels) {
                    if let Some(len) = route_bucket(&lengths, p.len) {
                        let entry = grouped.entry(len).or_default();
                        entry.0.push(*s);
                        entry.1.push(*y);
                    }
                }
                for (len, (s, y)) in grouped {
                    if let Some(platt) = usable_platt(&s, &y) {
                        set.per_bucket.insert(len, platt);
                    }
                }
            }
        }
        if set.pooled.is_none() {
            log::warn!("no increasing calibration map could be fitted; scores stay uncalibrated");
        }
        Ok(set)
    }

    /// Attaches calibration maps. Buckets without their own map use the
    /// pooled one.
    pub fn set_calibration(&mut self, set: &CalibrationSet) {
        match &mut self.classifiers {
            Classifiers::Single(bucket) => bucket.calibration = set.pooled,
            Classifiers::PerLength(buckets) => {
                for (len, bucket) in buckets.iter_mut() {
                    bucket.calibration = set.per_bucket.get(len).copied().or(set.pooled);
                }
            }
        }
    }

    /// Fits calibration on `log` with this model's own scores and attaches it.
    pub fn calibrate(&mut self, log: &EventLog) -> Result<()> {
        let set = self.fit_calibration(log)?;
        self.set_calibration(&set);
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Fitted map, unless fitting fails or it would reverse the ranking.
fn usable_platt(scores: &[f64], labels: &[bool]) -> Option<PlattModel> {
    fit_platt(scores, labels).ok().filter(PlattModel::is_increasing)
}

fn fit_bucket(encoder: EncoderSpec, prefixes: &[LabeledPrefix<'_>], params: &ModelParams) -> Result<BucketModel> {
    let matrix = encoder.encode(prefixes)?;
    let model = forest::train(&matrix, params)?;
    Ok(BucketModel {
        encoder,
        model,
        calibration: None,
    })
}
