//! Outcome-oriented predictive process monitoring with temporal-stability
//! evaluation.
//!
//! The pipeline runs from raw event logs to evaluation reports:
//!
//! 1. [`event_log`]: CSV ingestion, derived time features, rare-level
//!    collapsing, missing-value handling, labeling, truncation and the
//!    temporal train/test split.
//! 2. [`encoding`]: prefix extraction plus aggregation and index-based
//!    encodings, with optional per-prefix-length bucketing.
//! 3. [`forest`]: random forest and gradient-boosted tree classifiers.
//! 4. [`calibration`]: Platt scaling.
//! 5. [`smoothing`]: single exponential smoothing of score series.
//! 6. [`metrics`]: AUC, temporal stability and inter-run MSPD.
//! 7. [`experiment`]: approach assembly, random search and test evaluation.

pub mod calibration;
pub mod encoding;
pub mod error;
pub mod event_log;
pub mod experiment;
pub mod forest;
pub mod metrics;
pub mod seed;
pub mod smoothing;
pub mod synth;

pub use error::{Error, Result};
