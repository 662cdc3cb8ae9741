use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stabilis::event_log::{LabelingRule, LogSchema, RareLevelUnit, SplitSpec};
use stabilis::experiment::{Approach, PrepConfig, SearchScope, StrategyKind, Truncation, DEFAULT_SEARCH_ITERATIONS};
use stabilis::metrics::AucWeighting;
use stabilis::smoothing::DEFAULT_ALPHA_GRID;

/// Everything a run needs; loaded from JSON, then overridden by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub log: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub schema: LogSchema,
    pub labeling: Option<LabelingRule>,
    pub truncation: Truncation,
    pub approaches: Vec<Approach>,
    pub strategy: StrategyKind,
    pub alpha_grid: Vec<f64>,
    pub seed: u64,
    pub rare_level_unit: RareLevelUnit,
    pub min_support: usize,
    pub train_fraction: f64,
    pub iterations: usize,
    pub search_scope: SearchScope,
    pub weighting: AucWeighting,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            log: None,
            output_dir: PathBuf::from("stabilis-out"),
            schema: LogSchema::new("case_id", "activity", "timestamp"),
            labeling: None,
            truncation: Truncation::Auto,
            approaches: Approach::ALL.to_vec(),
            strategy: StrategyKind::Auc1Run,
            alpha_grid: DEFAULT_ALPHA_GRID.to_vec(),
            seed: 0,
            rare_level_unit: RareLevelUnit::Case,
            min_support: 10,
            train_fraction: SplitSpec::default().train_fraction,
            iterations: DEFAULT_SEARCH_ITERATIONS,
            search_scope: SearchScope::Shared,
            weighting: AucWeighting::OngoingCases,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let mut config: RunConfig =
            serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        // relative paths are resolved against the config file's directory
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(log) = &config.log {
            if log.is_relative() {
                config.log = Some(base.join(log));
            }
        }
        if config.output_dir.is_relative() {
            config.output_dir = base.join(&config.output_dir);
        }
        Ok(config)
    }

    pub fn prep_config(&self) -> PrepConfig {
        PrepConfig {
            min_support: self.min_support,
            rare_level_unit: self.rare_level_unit,
            labeling: self.labeling.clone(),
            truncation: self.truncation,
            split: SplitSpec {
                train_fraction: self.train_fraction,
            },
        }
    }

    pub fn prep_dir(&self) -> PathBuf {
        self.output_dir.join("prep")
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.output_dir.join("reports")
    }

    pub fn models_dir(&self) -> PathBuf {
        self.output_dir.join("models")
    }
}

/// A comma-separated list of smoothing weights given on the command line.
#[derive(Clone, Debug)]
pub struct AlphaGrid(pub Vec<f64>);

/// Parses `0.1,0.25,0.5`.
pub fn parse_alpha_grid(text: &str) -> Result<AlphaGrid, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let a: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
            if (0.0..=1.0).contains(&a) {
                Ok(a)
            } else {
                Err(format!("alpha {a} is outside [0, 1]"))
            }
        })
        .collect::<Result<_, _>>()
        .map(AlphaGrid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_keeps_defaults() {
        let config: RunConfig = serde_json::from_str(r#"{"seed": 4, "approaches": ["XGB_agg"], "truncation": {"fixed": 12}}"#).unwrap();
        assert_eq!(config.seed, 4);
        assert_eq!(config.approaches, [Approach::XgbAgg]);
        assert_eq!(config.truncation, Truncation::Fixed(12));
        assert_eq!(config.alpha_grid.len(), 5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sead": 4}"#).is_err());
    }

    #[test]
    fn alpha_grid_parsing() {
        assert_eq!(parse_alpha_grid("0.1, 0.9").unwrap().0, [0.1, 0.9]);
        assert!(parse_alpha_grid("0.1,2").is_err());
        assert!(parse_alpha_grid("x").is_err());
    }
}
