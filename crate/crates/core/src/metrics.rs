//! Accuracy and stability metrics.
//!
//! * [`auc`]: ROC AUC as the probability that a random positive outscores a
//!   random negative (ties count one half).
//! * [`temporal_stability`]: one minus the mean absolute difference between
//!   successive scores, averaged within each case first and then over cases.
//! * [`mspd`]: inter-run instability, the mean squared pairwise difference
//!   between runs' predictions on the same points.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Prediction scores of one case over successive prefix lengths
/// (`scores[t - 1]` is the score after `t` events).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreSeries {
    pub case_id: String,
    pub outcome: bool,
    pub scores: Vec<f64>,
}

impl ScoreSeries {
    pub fn new(case_id: &str, outcome: bool, scores: Vec<f64>) -> Self {
        ScoreSeries {
            case_id: case_id.to_owned(),
            outcome,
            scores,
        }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Area under the ROC curve via tie-aware rank counting. The result equals
/// `(wins + ties / 2) / (P * N)` over all positive/negative pairs, computed
/// with exact integer counts.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Metric(format!("{} scores but {} labels", scores.len(), labels.len())));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Metric("scores contain NaN".into()));
    }
    let n_pos = labels.iter().filter(|&&y| y).count() as u128;
    let n_neg = labels.len() as u128 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Metric("AUC is undefined when only one class is present".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[i].total_cmp(&scores[j]));

    // twice the number of won pairs plus the number of tied pairs
    let mut doubled: u128 = 0;
    let mut negatives_below: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0u128, 0u128);
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if labels[order[j]] {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        doubled += 2 * pos * negatives_below + pos * neg;
        negatives_below += neg;
        i = j;
    }
    Ok(doubled as f64 / (2 * n_pos * n_neg) as f64)
}

/// Mean absolute successive difference of one series; `None` for series
/// shorter than two.
pub fn mean_abs_change(scores: &[f64]) -> Option<f64> {
    if scores.len() < 2 {
        return None;
    }
    let total: f64 = scores.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    Some(total / (scores.len() - 1) as f64)
}

/// Temporal stability and the number of cases it was computed over.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub value: f64,
    pub n_cases: usize,
    /// Series of length 1, excluded from the average.
    pub n_excluded: usize,
}

pub fn temporal_stability_summary(series: &[ScoreSeries]) -> Result<StabilitySummary> {
    let per_case: Vec<f64> = series.iter().filter_map(|s| mean_abs_change(&s.scores)).collect();
    if per_case.is_empty() {
        return Err(Error::Metric("temporal stability needs at least one series of length >= 2".into()));
    }
    let mean = per_case.iter().sum::<f64>() / per_case.len() as f64;
    Ok(StabilitySummary {
        value: 1.0 - mean,
        n_cases: per_case.len(),
        n_excluded: series.len() - per_case.len(),
    })
}

pub fn temporal_stability(series: &[ScoreSeries]) -> Result<f64> {
    temporal_stability_summary(series).map(|s| s.value)
}

/// Predictions of `R >= 2` training runs on the same `N` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMatrix {
    runs: Vec<Vec<f64>>,
}

impl RunMatrix {
    pub fn new(runs: Vec<Vec<f64>>) -> Result<RunMatrix> {
        if runs.len() < 2 {
            return Err(Error::Metric(format!("MSPD needs at least 2 runs, got {}", runs.len())));
        }
        let n = runs[0].len();
        if runs.iter().any(|r| r.len() != n) {
            return Err(Error::Metric("all runs must score the same points".into()));
        }
        if runs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Metric("run predictions must be finite".into()));
        }
        Ok(RunMatrix { runs })
    }

    pub fn n_runs(&self) -> usize {
        self.runs.len()
    }

    pub fn n_points(&self) -> usize {
        self.runs[0].len()
    }

    pub fn runs(&self) -> &[Vec<f64>] {
        &self.runs
    }
}

/// `2 * mean_i Var_j(f_j(x_i))` with the unbiased variance over runs.
///
/// This equals the mean over unordered run pairs and points of
/// `(f_j(x_i) - f_k(x_i))^2`, i.e. `2 E[Var - Cov]` for two runs drawn
/// independently; it vanishes when all runs agree.
pub fn mspd(runs: &RunMatrix) -> Result<f64> {
    let r = runs.n_runs() as f64;
    let n = runs.n_points();
    if n == 0 {
        return Err(Error::Metric("MSPD needs at least one point".into()));
    }
    let mut total = 0.0;
    for i in 0..n {
        let mean = runs.runs.iter().map(|run| run[i]).sum::<f64>() / r;
        let var = runs.runs.iter().map(|run| (run[i] - mean).powi(2)).sum::<f64>() / (r - 1.0);
        total += var;
    }
    Ok(2.0 * total / n as f64)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AucWeighting {
    /// Weight each prefix length by the number of cases still ongoing.
    #[default]
    OngoingCases,
    Uniform,
}

/// Weighted mean of per-length AUCs; lengths without an AUC are skipped.
pub fn overall_auc(
    auc_by_len: &BTreeMap<usize, f64>,
    n_cases_by_len: &BTreeMap<usize, usize>,
    weighting: AucWeighting,
) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (len, value) in auc_by_len {
        let w = match weighting {
            AucWeighting::Uniform => 1.0,
            AucWeighting::OngoingCases => n_cases_by_len.get(len).copied().unwrap_or(0) as f64,
        };
        num += w * value;
        den += w;
    }
    if den == 0.0 {
        return Err(Error::Metric("no prefix length has a defined AUC".into()));
    }
    Ok(num / den)
}

/// Accuracy-by-length and stability of one set of score series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub auc_by_prefix_len: BTreeMap<usize, f64>,
    pub n_cases_by_prefix_len: BTreeMap<usize, usize>,
    pub overall_auc: f64,
    pub temporal_stability: f64,
    /// Cases contributing to the stability average.
    pub n_stability_cases: usize,
}

impl EvaluationReport {
    pub fn from_series(series: &[ScoreSeries], weighting: AucWeighting) -> Result<EvaluationReport> {
        let max_len = series.iter().map(ScoreSeries::len).max().unwrap_or(0);
        let mut auc_by_prefix_len = BTreeMap::new();
        let mut n_cases_by_prefix_len = BTreeMap::new();
        for t in 1..=max_len {
            let (scores, labels): (Vec<f64>, Vec<bool>) = series
                .iter()
                .filter(|s| s.len() >= t)
                .map(|s| (s.scores[t - 1], s.outcome))
                .unzip();
            n_cases_by_prefix_len.insert(t, scores.len());
            if let Ok(value) = auc(&scores, &labels) {
                auc_by_prefix_len.insert(t, value);
            }
        }
        let overall_auc = overall_auc(&auc_by_prefix_len, &n_cases_by_prefix_len, weighting)?;
        let stability = temporal_stability_summary(series)?;
        Ok(EvaluationReport {
            auc_by_prefix_len,
            n_cases_by_prefix_len,
            overall_auc,
            temporal_stability: stability.value,
            n_stability_cases: stability.n_cases,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_auc(scores: &[f64], labels: &[bool]) -> f64 {
        let (mut wins, mut pairs) = (0.0, 0.0);
        for (i, &yi) in labels.iter().enumerate() {
            for (j, &yj) in labels.iter().enumerate() {
                if yi && !yj {
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        wins += 1.0;
                    } else if scores[i] == scores[j] {
                        wins += 0.5;
                    }
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn auc_small_example() {
        let s = [0.1, 0.4, 0.35, 0.8];
        let y = [false, false, true, true];
        assert_eq!(auc(&s, &y).unwrap(), 0.75);
        assert_eq!(brute_auc(&s, &y), 0.75);
    }

    #[test]
    fn auc_extremes() {
        assert_eq!(auc(&[0.1, 0.2, 0.8, 0.9], &[false, false, true, true]).unwrap(), 1.0);
        assert_eq!(auc(&[0.3; 4], &[false, true, false, true]).unwrap(), 0.5);
        assert!(auc(&[0.3, 0.4], &[true, true]).is_err());
    }

    #[test]
    fn ts_hand_examples() {
        let one = ScoreSeries::new("a", true, vec![0.5, 0.5, 0.9, 0.9]);
        let two = ScoreSeries::new("b", false, vec![0.2, 0.8, 0.2]);
        assert!((temporal_stability(std::slice::from_ref(&one)).unwrap() - (1.0 - 0.4 / 3.0)).abs() < 1e-12);
        let both = temporal_stability(&[one, two]).unwrap();
        assert!((both - (1.0 - (0.4 / 3.0 + 0.6) / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn ts_excludes_single_event_cases() {
        let s = vec![
            ScoreSeries::new("a", true, vec![0.1]),
            ScoreSeries::new("b", true, vec![0.2, 0.2]),
        ];
        let summary = temporal_stability_summary(&s).unwrap();
        assert_eq!(summary.value, 1.0);
        assert_eq!(summary.n_excluded, 1);
        assert!(temporal_stability(&s[..1]).is_err());
    }

    #[test]
    fn mspd_identical_and_two_point() {
        let same = RunMatrix::new(vec![vec![0.2, 0.9, 0.4]; 3]).unwrap();
        assert!(mspd(&same).unwrap().abs() < 1e-12);
        // pairwise squared differences: (0-1)^2 and (1-0)^2, mean 1
        let flipped = RunMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((mspd(&flipped).unwrap() - 1.0).abs() < 1e-15);
        assert!(RunMatrix::new(vec![vec![0.1]]).is_err());
    }

    #[test]
    fn overall_auc_weighting() {
        let aucs = BTreeMap::from([(5, 0.8), (10, 0.6)]);
        let counts = BTreeMap::from([(5, 100), (10, 50)]);
        let weighted = overall_auc(&aucs, &counts, AucWeighting::OngoingCases).unwrap();
        assert!((weighted - 110.0 / 150.0).abs() < 1e-15);
        let uniform = overall_auc(&aucs, &counts, AucWeighting::Uniform).unwrap();
        assert!((uniform - 0.7).abs() < 1e-15);
        let single = BTreeMap::from([(3, 0.9)]);
        assert_eq!(overall_auc(&single, &counts, AucWeighting::Uniform).unwrap(), 0.9);
    }

    #[test]
    fn report_counts_ongoing_cases() {
        let series = vec![
            ScoreSeries::new("a", true, vec![0.9, 0.8, 0.9]),
            ScoreSeries::new("b", false, vec![0.1, 0.2]),
            ScoreSeries::new("c", false, vec![0.3]),
        ];
        let r = EvaluationReport::from_series(&series, AucWeighting::OngoingCases).unwrap();
        assert_eq!(r.n_cases_by_prefix_len, BTreeMap::from([(1, 3), (2, 2), (3, 1)]));
        assert_eq!(r.auc_by_prefix_len, BTreeMap::from([(1, 1.0), (2, 1.0)]));
        assert_eq!(r.overall_auc, 1.0);
        assert_eq!(r.n_stability_cases, 2);
    }
}
