use serde::{Deserialize, Serialize};

use crate::event_log::{
    apply_labeling, derive_features, fill_and_flag_missing, suggest_truncation, temporal_split, truncate_traces,
    EventLog, LabelingRule, LevelMapping, LogStats, RareLevelUnit, SplitSpec,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Length covering 90% of the minority-class training traces.
    #[default]
    Auto,
    Fixed(usize),
}

/// Preprocessing settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrepConfig {
    pub min_support: usize,
    pub rare_level_unit: RareLevelUnit,
    /// `None` when traces already carry outcomes.
    pub labeling: Option<LabelingRule>,
    pub truncation: Truncation,
    pub split: SplitSpec,
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig {
            min_support: 10,
            rare_level_unit: RareLevelUnit::Case,
            labeling: None,
            truncation: Truncation::Auto,
            split: SplitSpec::default(),
        }
    }
}

/// Train and test logs ready for encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedData {
    pub train: EventLog,
    pub test: EventLog,
    pub trunc_length: usize,
    pub mapping: LevelMapping,
    /// Statistics of the labeled log before splitting.
    pub stats: LogStats,
}

/// Labels, enriches, splits, collapses rare levels, fills missing values and
/// truncates. Everything fitted (levels, truncation) uses training data only.
pub fn prepare(log: &EventLog, config: &PrepConfig) -> Result<PreparedData> {
    let labeled = match &config.labeling {
        Some(rule) => apply_labeling(log, rule)?,
        None if log.is_labeled() => log.clone(),
        None => return Err(Error::Input("log is unlabeled and no labeling rule was given".into())),
    };
    let enriched = derive_features(&labeled);
    let (train, test) = temporal_split(&enriched, &config.split)?;
    let mapping = LevelMapping::fit(&train, config.min_support, config.rare_level_unit)?;
    let (train, test) = if config.min_support == 0 {
        (train, test)
    } else {
        (mapping.apply(&train), mapping.apply(&test))
    };
    let (train, test) = (fill_and_flag_missing(&train), fill_and_flag_missing(&test));
    let trunc_length = match config.truncation {
        Truncation::Auto => suggest_truncation(&train)?,
        Truncation::Fixed(0) => return Err(Error::Param("truncation length must be positive".into())),
        Truncation::Fixed(n) => n,
    };
    let stats = LogStats::compute(&labeled, trunc_length);
    Ok(PreparedData {
        train: truncate_traces(&train, trunc_length)?,
        test: truncate_traces(&test, trunc_length)?,
        trunc_length,
        mapping,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{signal_log, SignalLogSpec};

    #[test]
    fn prepare_splits_and_truncates() {
        let log = signal_log(&SignalLogSpec {
            n_cases: 200,
            ..SignalLogSpec::default()
        });
        let prep = prepare(
            &log,
            &PrepConfig {
                truncation: Truncation::Fixed(10),
                ..PrepConfig::default()
            },
        )
        .unwrap();
        assert_eq!(prep.trunc_length, 10);
        assert_eq!(prep.stats.n_traces, 200);
        assert!(prep.train.max_trace_len() <= 10 && prep.test.max_trace_len() <= 10);
        assert_eq!(prep.test.traces.len(), 40);
        let train_end = prep.train.traces.iter().filter_map(|t| t.end()).max().unwrap();
        let test_start = prep.test.traces.iter().filter_map(|t| t.start()).min().unwrap();
        assert!(train_end < test_start);
    }

    #[test]
    fn unlabeled_without_rule_fails() {
        let mut log = signal_log(&SignalLogSpec {
            n_cases: 20,
            ..SignalLogSpec::default()
        });
        for t in &mut log.traces {
            t.outcome = None;
        }
        assert!(matches!(prepare(&log, &PrepConfig::default()), Err(Error::Input(_))));
    }
}
