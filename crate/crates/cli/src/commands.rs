use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use stabilis::event_log::{read_csv_log, read_preprocessed_csv, write_preprocessed_csv, EventLog, LogSchema, LogStats};
use stabilis::experiment::{evaluate_on_test, prepare, run_search, Approach, PipelineOptions, SearchOptions, SearchOutcome, TestEvaluation};

use crate::config::RunConfig;

const MANIFEST_VERSION: u32 = 1;

/// Written next to the preprocessed logs so `run` can reload them.
#[derive(Debug, Serialize, Deserialize)]
pub struct PrepMeta {
    pub schema: LogSchema,
    pub trunc_length: usize,
    pub stats: LogStats,
}

fn create(path: &Path) -> anyhow::Result<File> {
    File::create(path).with_context(|| format!("cannot create {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

fn read_raw_log(config: &RunConfig) -> anyhow::Result<EventLog> {
    let Some(path) = &config.log else { bail!("no input log given (set `log` in the config or pass --log)") };
    Ok(read_csv_log(path, &config.schema)?)
}

pub fn suggest_truncation(config: &RunConfig) -> anyhow::Result<usize> {
    let log = read_raw_log(config)?;
    let mut prep_config = config.prep_config();
    prep_config.truncation = stabilis::experiment::Truncation::Auto;
    Ok(prepare(&log, &prep_config)?.trunc_length)
}

pub fn prep(config: &RunConfig) -> anyhow::Result<LogStats> {
    let log = read_raw_log(config)?;
    let prepared = prepare(&log, &config.prep_config())?;
    let dir = config.prep_dir();
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;

    let schema = LogSchema {
        event_attributes: prepared.train.attributes.event.clone(),
        case_attributes: prepared.train.attributes.case.clone(),
        ..config.schema.clone()
    };
    write_preprocessed_csv(&prepared.train, &schema, create(&dir.join("train.csv"))?)?;
    write_preprocessed_csv(&prepared.test, &schema, create(&dir.join("test.csv"))?)?;
    let mut stats = csv::Writer::from_writer(create(&dir.join("stats.csv"))?);
    stats.serialize(&prepared.stats)?;
    stats.flush()?;
    write_json(
        &dir.join("schema.json"),
        &PrepMeta {
            schema,
            trunc_length: prepared.trunc_length,
            stats: prepared.stats.clone(),
        },
    )?;
    log::info!(
        "prepared {} train and {} test cases (truncation {})",
        prepared.train.traces.len(),
        prepared.test.traces.len(),
        prepared.trunc_length
    );
    Ok(prepared.stats)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ApproachEntry {
    pub approach: Approach,
    pub status: Status,
    pub error: Option<String>,
    pub model: Option<PathBuf>,
    pub search: Option<SearchOutcome>,
    pub skipped_test_cases: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub config: RunConfig,
    pub trunc_length: usize,
    pub approaches: Vec<ApproachEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PrefixRow {
    pub approach: String,
    /// 0 is the unsmoothed report (smoothing with weight 0 is the identity).
    pub alpha: f64,
    pub prefix_len: usize,
    pub auc: f64,
    pub n_cases: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SummaryRow {
    pub approach: String,
    pub alpha: f64,
    pub overall_auc: f64,
    pub temporal_stability: f64,
    pub n_stability_cases: usize,
}

fn load_prepared(config: &RunConfig) -> anyhow::Result<(PrepMeta, EventLog, EventLog)> {
    let dir = config.prep_dir();
    let meta_path = dir.join("schema.json");
    let meta: PrepMeta = serde_json::from_reader(BufReader::new(
        File::open(&meta_path).with_context(|| format!("{} not found; run `stabilis prep` first", meta_path.display()))?,
    ))?;
    let read = |name: &str| -> anyhow::Result<EventLog> {
        let path = dir.join(name);
        let file = File::open(&path).with_context(|| format!("cannot open {}", path.display()))?;
        read_preprocessed_csv(BufReader::new(file), &meta.schema).with_context(|| path.display().to_string())
    };
    let (train, test) = (read("train.csv")?, read("test.csv")?);
    Ok((meta, train, test))
}

fn report_rows(approach: Approach, eval: &TestEvaluation) -> (Vec<PrefixRow>, Vec<SummaryRow>) {
    let mut prefix = Vec::new();
    let mut summary = Vec::new();
    for slice in &eval.slices {
        let alpha = slice.alpha.unwrap_or(0.0);
        let report = &slice.report;
        for (&len, &auc) in &report.auc_by_prefix_len {
            prefix.push(PrefixRow {
                approach: approach.name().into(),
                alpha,
                prefix_len: len,
                auc,
                n_cases: report.n_cases_by_prefix_len.get(&len).copied().unwrap_or(0),
            });
        }
        summary.push(SummaryRow {
            approach: approach.name().into(),
            alpha,
            overall_auc: report.overall_auc,
            temporal_stability: report.temporal_stability,
            n_stability_cases: report.n_stability_cases,
        });
    }
    (prefix, summary)
}

/// Searches, trains, calibrates and evaluates every configured approach.
/// Returns the number of failed approaches.
pub fn run(config: &RunConfig) -> anyhow::Result<usize> {
    let (meta, train, test) = load_prepared(config)?;
    let models_dir = config.models_dir();
    let reports_dir = config.reports_dir();
    for dir in [&models_dir, &reports_dir] {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let mut pipeline = PipelineOptions::new(meta.trunc_length);
    pipeline.weighting = config.weighting;

    let mut entries = Vec::new();
    let mut prefix_rows = Vec::new();
    let mut summary_rows = Vec::new();
    for &approach in &config.approaches {
        let mut options = SearchOptions::new(approach, config.strategy, pipeline.clone(), config.seed);
        options.iterations = config.iterations;
        options.scope = config.search_scope;
        log::info!("{approach}: searching {} configurations", options.iterations);
        let result = run_search(&train, &options).and_then(|(outcome, model)| {
            let eval = evaluate_on_test(&model, &test, &config.alpha_grid)?;
            Ok((outcome, model, eval))
        });
        match result {
            Ok((outcome, model, eval)) => {
                let model_path = models_dir.join(format!("{}.json", approach.name()));
                fs::write(&model_path, model.to_json()?)
                    .with_context(|| format!("cannot write {}", model_path.display()))?;
                let (p, s) = report_rows(approach, &eval);
                prefix_rows.extend(p);
                summary_rows.extend(s);
                entries.push(ApproachEntry {
                    approach,
                    status: Status::Ok,
                    error: None,
                    model: Some(model_path),
                    search: Some(outcome),
                    skipped_test_cases: Some(eval.skipped),
                });
            }
            Err(e) => {
                log::error!("{approach} failed: {e}");
                entries.push(ApproachEntry {
                    approach,
                    status: Status::Failed,
                    error: Some(e.to_string()),
                    model: None,
                    search: None,
                    skipped_test_cases: None,
                });
            }
        }
    }

    let mut by_prefix = csv::Writer::from_writer(create(&reports_dir.join("by_prefix.csv"))?);
    for row in &prefix_rows {
        by_prefix.serialize(row)?;
    }
    by_prefix.flush()?;
    let mut summary = csv::Writer::from_writer(create(&reports_dir.join("summary.csv"))?);
    for row in &summary_rows {
        summary.serialize(row)?;
    }
    summary.flush()?;

    let failed = entries.iter().filter(|e| matches!(e.status, Status::Failed)).count();
    write_json(
        &config.output_dir.join("manifest.json"),
        &Manifest {
            version: MANIFEST_VERSION,
            config: config.clone(),
            trunc_length: meta.trunc_length,
            approaches: entries,
        },
    )?;
    Ok(failed)
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let rows = reader.deserialize().collect::<Result<Vec<T>, _>>()?;
    Ok(rows)
}

#[derive(Serialize)]
struct AucVsPrefix<'a> {
    approach: &'a str,
    alpha: f64,
    prefix_len: usize,
    auc: f64,
}

#[derive(Serialize)]
struct MetricVsAlpha<'a> {
    approach: &'a str,
    alpha: f64,
    value: f64,
}

#[derive(Serialize)]
struct Scatter<'a> {
    approach: &'a str,
    alpha: f64,
    overall_auc: f64,
    temporal_stability: f64,
}

/// Writes the four long-format figure tables; returns their paths.
pub fn report(output_dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let reports = output_dir.join("reports");
    let prefix: Vec<PrefixRow> = read_rows(&reports.join("by_prefix.csv"))?;
    let summary: Vec<SummaryRow> = read_rows(&reports.join("summary.csv"))?;
    if summary.is_empty() {
        bail!("{} holds no report rows", reports.display());
    }
    let dir = output_dir.join("figures");
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;

    let mut written = Vec::new();
    let mut emit = |name: &str, rows: &mut dyn FnMut(&mut csv::Writer<File>) -> csv::Result<()>| -> anyhow::Result<()> {
        let path = dir.join(name);
        let mut w = csv::Writer::from_writer(create(&path)?);
        rows(&mut w)?;
        w.flush()?;
        written.push(path);
        Ok(())
    };
    emit("auc_vs_prefix.csv", &mut |w| {
        prefix.iter().try_for_each(|r| {
            w.serialize(AucVsPrefix {
                approach: &r.approach,
                alpha: r.alpha,
                prefix_len: r.prefix_len,
                auc: r.auc,
            })
        })
    })?;
    emit("ts_vs_alpha.csv", &mut |w| {
        summary.iter().try_for_each(|r| {
            w.serialize(MetricVsAlpha {
                approach: &r.approach,
                alpha: r.alpha,
                value: r.temporal_stability,
            })
        })
    })?;
    emit("auc_vs_alpha.csv", &mut |w| {
        summary.iter().try_for_each(|r| {
            w.serialize(MetricVsAlpha {
                approach: &r.approach,
                alpha: r.alpha,
                value: r.overall_auc,
            })
        })
    })?;
    // one point per (approach, alpha)
    let mut points: BTreeMap<(String, u64), &SummaryRow> = BTreeMap::new();
    for r in &summary {
        points.entry((r.approach.clone(), r.alpha.to_bits())).or_insert(r);
    }
    emit("ts_vs_auc.csv", &mut |w| {
        points.values().try_for_each(|r| {
            w.serialize(Scatter {
                approach: &r.approach,
                alpha: r.alpha,
                overall_auc: r.overall_auc,
                temporal_stability: r.temporal_stability,
            })
        })
    })?;
    Ok(written)
}
