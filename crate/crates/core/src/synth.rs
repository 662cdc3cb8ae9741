//! Synthetic event logs with known structure, used by tests, the
//! acceptance suite and the CLI demo.

use std::io::Write;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::event_log::{AttrKind, Event, EventLog, LogAttributes, LogSchema, Trace, Value};
use crate::seed::rng_for;
use crate::Result;

/// Name of the case attribute holding the generated label (`true`/`false`).
pub const LABEL_ATTRIBUTE: &str = "outcome_flag";
const ACTIVITIES: [&str; 6] = ["Register", "Check", "Review", "Approve", "Notify", "Archive"];
const RESOURCES: [&str; 8] = ["r1", "r2", "r3", "r4", "r5", "r6", "r7", "r8"];
const CHANNELS: [&str; 3] = ["web", "phone", "desk"];

/// A log whose outcome becomes visible at a fixed event position.
///
/// Event `signal_event` carries the categorical attribute `signal`, equal to
/// `high` for positive cases and `low` for negative ones (flipped with
/// probability `signal_noise`). Before that event only partial evidence exists:
/// the numeric `amount` is shifted by `early_shift` standard deviations
/// according to the class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalLogSpec {
    pub n_cases: usize,
    pub signal_event: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub positive_rate: f64,
    pub signal_noise: f64,
    pub early_shift: f64,
    pub seed: u64,
}

impl Default for SignalLogSpec {
    fn default() -> Self {
        SignalLogSpec {
            n_cases: 2000,
            signal_event: 5,
            min_len: 8,
            max_len: 15,
            positive_rate: 0.5,
            signal_noise: 0.12,
            early_shift: 1.2,
            seed: 7,
        }
    }
}

fn base_time() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2023, 1, 2).unwrap().and_hms_opt(8, 0, 0).unwrap()
}

/// Schema of the in-memory logs produced here (labels live in
/// `Trace::outcome`).
pub fn schema() -> LogSchema {
    LogSchema::new("case_id", "activity", "timestamp")
        .with_event_attr("resource", AttrKind::Categorical)
        .with_event_attr("amount", AttrKind::Numeric)
        .with_event_attr("signal", AttrKind::Categorical)
        .with_case_attr("channel", AttrKind::Categorical)
}

/// Schema of CSV files written by [`write_raw_csv`]: [`schema`] plus the
/// [`LABEL_ATTRIBUTE`] case column.
pub fn raw_schema() -> LogSchema {
    schema().with_case_attr(LABEL_ATTRIBUTE, AttrKind::Categorical)
}

fn case_trace(
    case: usize,
    start: NaiveDateTime,
    len: usize,
    outcome: bool,
    spec: &SignalLogSpec,
    rng: &mut impl Rng,
    row: &mut usize,
) -> Trace {
    let amount = Normal::new(if outcome { spec.early_shift } else { 0.0 }, 1.0).expect("valid normal");
    let mut ts = start;
    let mut events = Vec::with_capacity(len);
    for i in 0..len {
        let activity = if i == 0 {
            ACTIVITIES[0]
        } else {
            ACTIVITIES[rng.gen_range(1..ACTIVITIES.len())]
        };
        let mut e = Event::new(activity, ts, *row)
            .with_attr("resource", Value::Categorical(RESOURCES.choose(rng).unwrap().to_string()))
            .with_attr("amount", Value::Numeric((100.0 + 20.0 * amount.sample(rng)).round()));
        if i + 1 == spec.signal_event {
            let flipped = rng.gen_bool(spec.signal_noise);
            let level = if outcome != flipped { "high" } else { "low" };
            e = e.with_attr("signal", Value::Categorical(level.into()));
        } else {
            e = e.with_attr("signal", Value::Absent);
        }
        events.push(e);
        *row += 1;
        ts += Duration::minutes(rng.gen_range(5..240));
    }
    let mut trace = Trace::new(&format!("case_{case:05}"), events);
    trace
        .case_attrs
        .insert("channel".into(), Value::Categorical(CHANNELS.choose(rng).unwrap().to_string()));
    trace.outcome = Some(outcome);
    trace
}

/// Generates a labeled signal-at-event log; cases start every ~45 minutes.
pub fn signal_log(spec: &SignalLogSpec) -> EventLog {
    assert!(spec.min_len >= 1 && spec.min_len <= spec.max_len, "invalid length range");
    let mut rng = rng_for(spec.seed, 0);
    let mut row = 0;
    let mut start = base_time();
    let traces = (0..spec.n_cases)
        .map(|case| {
            start += Duration::minutes(rng.gen_range(15..75));
            let len = rng.gen_range(spec.min_len..=spec.max_len);
            let outcome = rng.gen_bool(spec.positive_rate);
            case_trace(case, start, len, outcome, spec, &mut rng, &mut row)
        })
        .collect();
    EventLog::new(LogAttributes::from(&schema()), traces)
}

/// A small log with 220 traces and 2275 events in total, shaped like a
/// manufacturing log (median length 9, long tail up to 78, roughly balanced
/// classes).
pub fn production_like(seed: u64) -> EventLog {
    const N_TRACES: usize = 220;
    const N_EVENTS: usize = 2275;
    let mut rng = rng_for(seed, 1);
    let mut lengths: Vec<usize> = (0..N_TRACES)
        .map(|_| {
            if rng.gen_bool(0.05) {
                rng.gen_range(20..=78)
            } else {
                rng.gen_range(2..=14)
            }
        })
        .collect();
    lengths[0] = 78;
    // nudge lengths (never below 1 or above 78) until the total matches
    let mut total: usize = lengths.iter().sum();
    while total != N_EVENTS {
        let i = rng.gen_range(1..N_TRACES);
        if total < N_EVENTS && lengths[i] < 78 {
            lengths[i] += 1;
            total += 1;
        } else if total > N_EVENTS && lengths[i] > 1 {
            lengths[i] -= 1;
            total -= 1;
        }
    }
    let spec = SignalLogSpec {
        signal_event: 3,
        ..SignalLogSpec::default()
    };
    let mut row = 0;
    let mut start = base_time();
    let traces = lengths
        .iter()
        .enumerate()
        .map(|(case, &len)| {
            start += Duration::minutes(rng.gen_range(60..600));
            let outcome = rng.gen_bool(0.53);
            case_trace(case, start, len, outcome, &spec, &mut rng, &mut row)
        })
        .collect();
    EventLog::new(LogAttributes::from(&schema()), traces)
}

/// Writes a log as a raw CSV (one row per event, case attributes repeated).
/// A [`LABEL_ATTRIBUTE`] column in `schema` is filled from the outcomes.
pub fn write_raw_csv<W: Write>(log: &EventLog, schema: &LogSchema, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    let mut header = vec![schema.case_id.clone(), schema.activity.clone(), schema.timestamp.clone()];
    header.extend(schema.event_attributes.keys().cloned());
    header.extend(schema.case_attributes.keys().cloned());
    out.write_record(&header)?;
    let cell = |v: Option<&Value>| match v {
        Some(Value::Categorical(s)) => s.clone(),
        Some(Value::Numeric(x)) => x.to_string(),
        _ => String::new(),
    };
    for trace in &log.traces {
        for e in &trace.events {
            let mut record = vec![
                trace.case_id.clone(),
                e.activity.clone(),
                e.timestamp.format("%Y-%m-%dT%H:%M:%S").to_string(),
            ];
            record.extend(schema.event_attributes.keys().map(|k| cell(e.payload.get(k))));
            record.extend(schema.case_attributes.keys().map(|k| {
                if k == LABEL_ATTRIBUTE {
                    trace.outcome.map(|o| o.to_string()).unwrap_or_default()
                } else {
                    cell(trace.case_attrs.get(k))
                }
            }));
            out.write_record(&record)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn production_like_has_expected_counts() {
        let log = production_like(3);
        assert_eq!(log.traces.len(), 220);
        assert_eq!(log.n_events(), 2275);
        assert_eq!(log.max_trace_len(), 78);
    }

    #[test]
    fn signal_log_is_deterministic() {
        let spec = SignalLogSpec {
            n_cases: 50,
            signal_noise: 0.0,
            ..SignalLogSpec::default()
        };
        assert_eq!(signal_log(&spec), signal_log(&spec));
        let log = signal_log(&spec);
        assert!(log.traces.iter().all(|t| (8..=15).contains(&t.len())));
        for t in &log.traces {
            let level = t.events[4].payload["signal"].as_str().unwrap();
            assert_eq!(level == "high", t.outcome.unwrap());
        }
    }
}
