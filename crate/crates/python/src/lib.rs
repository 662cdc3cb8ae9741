//! Python bindings: metrics, smoothing, calibration, tree ensembles and
//! event-log summaries.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use stabilis::calibration;
use stabilis::encoding::FeatureMatrix;
use stabilis::event_log::{self, LabelCondition, LabelingRule, LogSchema};
use stabilis::experiment::TrainedApproach;
use stabilis::forest::{self, EnsembleModel, GBTParams, RFParams};
use stabilis::metrics::{self, AucWeighting, RunMatrix, ScoreSeries};

fn err(e: stabilis::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn weighting(name: &str) -> PyResult<AucWeighting> {
    match name {
        "ongoing_cases" => Ok(AucWeighting::OngoingCases),
        "uniform" => Ok(AucWeighting::Uniform),
        other => Err(PyValueError::new_err(format!("unknown weighting `{other}`"))),
    }
}

fn matrix(rows: &[Vec<f64>], labels: Vec<bool>) -> PyResult<FeatureMatrix> {
    let width = rows.first().map_or(0, Vec::len);
    let columns = (0..width).map(|j| format!("x{j}")).collect();
    FeatureMatrix::from_rows(columns, rows, labels).map_err(err)
}

/// Rank AUC of `scores` against boolean `labels`.
#[pyfunction]
fn auc(scores: Vec<f64>, labels: Vec<bool>) -> PyResult<f64> {
    metrics::auc(&scores, &labels).map_err(err)
}

/// Temporal stability of `(case_id, outcome, scores)` triples.
#[pyfunction]
fn temporal_stability(series: Vec<(String, bool, Vec<f64>)>) -> PyResult<f64> {
    let series: Vec<ScoreSeries> = series.into_iter().map(|(id, y, s)| ScoreSeries::new(&id, y, s)).collect();
    metrics::temporal_stability(&series).map_err(err)
}

/// Inter-run mean squared prediction difference; one inner list per run.
#[pyfunction]
fn mspd(runs: Vec<Vec<f64>>) -> PyResult<f64> {
    metrics::mspd(&RunMatrix::new(runs).map_err(err)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (auc_by_len, n_cases_by_len, weighting = "ongoing_cases"))]
fn overall_auc(
    auc_by_len: BTreeMap<usize, f64>,
    n_cases_by_len: BTreeMap<usize, usize>,
    weighting: &str,
) -> PyResult<f64> {
    metrics::overall_auc(&auc_by_len, &n_cases_by_len, self::weighting(weighting)?).map_err(err)
}

/// Single exponential smoothing of one score series.
#[pyfunction]
fn smooth(scores: Vec<f64>, alpha: f64) -> PyResult<Vec<f64>> {
    stabilis::smoothing::smooth_scores(&scores, alpha).map_err(err)
}

#[pyclass(name = "PlattModel", from_py_object)]
#[derive(Clone)]
struct PyPlatt(calibration::PlattModel);

#[pymethods]
impl PyPlatt {
    #[new]
    fn new(a: f64, b: f64) -> Self {
        PyPlatt(calibration::PlattModel { a, b })
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.b
    }

    fn is_increasing(&self) -> bool {
        self.0.is_increasing()
    }

    fn apply(&self, scores: Vec<f64>) -> Vec<f64> {
        self.0.apply(&scores)
    }

    fn __repr__(&self) -> String {
        format!("PlattModel(a={}, b={})", self.0.a, self.0.b)
    }
}

#[pyfunction]
fn fit_platt(scores: Vec<f64>, labels: Vec<bool>) -> PyResult<PyPlatt> {
    calibration::fit_platt(&scores, &labels).map(PyPlatt).map_err(err)
}

/// A trained random forest or boosted ensemble.
#[pyclass(name = "Ensemble")]
struct PyEnsemble(EnsembleModel);

#[pymethods]
impl PyEnsemble {
    fn predict(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        let labels = vec![false; rows.len()];
        self.0.predict(&matrix(&rows, labels)?).map_err(err)
    }

    #[getter]
    fn n_trees(&self) -> usize {
        self.0.trees.len()
    }

    fn is_rf(&self) -> bool {
        self.0.is_rf()
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        EnsembleModel::from_json(text).map(PyEnsemble).map_err(err)
    }
}

#[pyfunction]
#[pyo3(signature = (rows, labels, n_estimators = 100, max_features = 0.5, seed = 0))]
fn train_rf(rows: Vec<Vec<f64>>, labels: Vec<bool>, n_estimators: usize, max_features: f64, seed: u64) -> PyResult<PyEnsemble> {
    let params = RFParams {
        n_estimators,
        max_features,
        seed,
    };
    forest::train_rf(&matrix(&rows, labels)?, &params).map(PyEnsemble).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (
    rows, labels, n_estimators = 200, learning_rate = 0.05, subsample = 0.8,
    max_depth = 4, colsample_bytree = 0.8, min_child_weight = 1.0, seed = 0
))]
#[allow(clippy::too_many_arguments)]
fn train_gbt(
    rows: Vec<Vec<f64>>,
    labels: Vec<bool>,
    n_estimators: usize,
    learning_rate: f64,
    subsample: f64,
    max_depth: usize,
    colsample_bytree: f64,
    min_child_weight: f64,
    seed: u64,
) -> PyResult<PyEnsemble> {
    let params = GBTParams {
        n_estimators,
        learning_rate,
        subsample,
        max_depth,
        colsample_bytree,
        min_child_weight,
        seed,
    };
    forest::train_gbt(&matrix(&rows, labels)?, &params).map(PyEnsemble).map_err(err)
}

/// A raw CSV event log.
#[pyclass(name = "EventLog")]
struct PyEventLog(event_log::EventLog);

#[pymethods]
impl PyEventLog {
    #[staticmethod]
    #[pyo3(signature = (path, case_id = "case_id", activity = "activity", timestamp = "timestamp"))]
    fn read_csv(path: &str, case_id: &str, activity: &str, timestamp: &str) -> PyResult<Self> {
        let schema = LogSchema::new(case_id, activity, timestamp);
        event_log::read_csv_log(path, &schema).map(PyEventLog).map_err(err)
    }

    #[getter]
    fn n_traces(&self) -> usize {
        self.0.traces.len()
    }

    #[getter]
    fn n_events(&self) -> usize {
        self.0.n_events()
    }

    fn case_ids(&self) -> Vec<String> {
        self.0.case_ids().into_iter().map(String::from).collect()
    }

    /// Adds the derived time features.
    fn derive_features(&self) -> Self {
        PyEventLog(event_log::derive_features(&self.0))
    }

    /// Labels each case from a 0/1 or true/false case column.
    fn label_from_column(&self, attribute: &str) -> PyResult<Self> {
        let rule = LabelingRule::new(LabelCondition::ExternalColumn {
            attribute: attribute.into(),
        });
        event_log::apply_labeling(&self.0, &rule).map(PyEventLog).map_err(err)
    }

    fn suggest_truncation(&self) -> PyResult<usize> {
        event_log::suggest_truncation(&self.0).map_err(err)
    }

    /// Summary statistics; the log must be labeled.
    fn stats(&self, trunc_length: usize) -> PyResult<BTreeMap<String, f64>> {
        if !self.0.is_labeled() {
            return Err(PyValueError::new_err("log is not labeled"));
        }
        let s = event_log::LogStats::compute(&self.0, trunc_length);
        Ok(BTreeMap::from([
            ("n_traces".to_string(), s.n_traces as f64),
            ("pos_class_ratio".to_string(), s.pos_class_ratio),
            ("median_length".to_string(), s.median_length),
            ("max_length".to_string(), s.max_length as f64),
            ("trunc_length".to_string(), s.trunc_length as f64),
            ("n_events".to_string(), s.n_events as f64),
        ]))
    }
}

/// A model written by `stabilis run`.
#[pyclass(name = "TrainedApproach")]
struct PyTrainedApproach(TrainedApproach);

#[pymethods]
impl PyTrainedApproach {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        TrainedApproach::from_json(text).map(PyTrainedApproach).map_err(err)
    }

    #[getter]
    fn approach(&self) -> String {
        self.0.approach.name().to_string()
    }

    fn bucket_lengths(&self) -> Vec<usize> {
        self.0.bucket_lengths().into_iter().collect()
    }

    /// Per-case score series `(case_id, outcome, scores)` for a labeled log.
    #[pyo3(signature = (log, calibrated = true))]
    fn score_series(&self, log: &PyEventLog, calibrated: bool) -> PyResult<Vec<(String, bool, Vec<f64>)>> {
        let (series, _) = self.0.score_series(&log.0, calibrated).map_err(err)?;
        Ok(series.into_iter().map(|s| (s.case_id, s.outcome, s.scores)).collect())
    }
}

#[pymodule]
#[pyo3(name = "stabilis")]
fn stabilis_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(auc, m)?)?;
    m.add_function(wrap_pyfunction!(temporal_stability, m)?)?;
    m.add_function(wrap_pyfunction!(mspd, m)?)?;
    m.add_function(wrap_pyfunction!(overall_auc, m)?)?;
    m.add_function(wrap_pyfunction!(smooth, m)?)?;
    m.add_function(wrap_pyfunction!(fit_platt, m)?)?;
    m.add_function(wrap_pyfunction!(train_rf, m)?)?;
    m.add_function(wrap_pyfunction!(train_gbt, m)?)?;
    m.add_class::<PyPlatt>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_class::<PyEventLog>()?;
    m.add_class::<PyTrainedApproach>()?;
    Ok(())
}
