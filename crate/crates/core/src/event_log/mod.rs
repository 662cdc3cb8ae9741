//! Event logs: ingestion, per-event feature derivation, categorical
//! cleanup, labeling, truncation and the temporal train/test split.

mod io;
mod labeling;

pub use io::{read_csv_log, read_csv_log_from_reader, read_preprocessed_csv, write_preprocessed_csv};
pub use labeling::{apply_labeling, LabelCondition, LabelingRule};

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Level substituted for rare (or unseen) categorical values.
pub const OTHER_LEVEL: &str = "__other__";
/// Level used when a categorical attribute has never been observed in a trace.
pub const MISSING_LEVEL: &str = "__missing__";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Categorical(String),
    Numeric(f64),
    Absent,
}

impl Value {
    pub fn is_absent(&self) -> bool {
        matches!(self, Value::Absent)
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Categorical(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Numeric(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttrKind {
    Categorical,
    Numeric,
}

/// Column roles of a raw CSV log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogSchema {
    pub case_id: String,
    pub activity: String,
    pub timestamp: String,
    #[serde(default)]
    pub event_attributes: BTreeMap<String, AttrKind>,
    #[serde(default)]
    pub case_attributes: BTreeMap<String, AttrKind>,
}

impl LogSchema {
    pub fn new(case_id: &str, activity: &str, timestamp: &str) -> Self {
        LogSchema {
            case_id: case_id.to_owned(),
            activity: activity.to_owned(),
            timestamp: timestamp.to_owned(),
            event_attributes: BTreeMap::new(),
            case_attributes: BTreeMap::new(),
        }
    }

    pub fn with_event_attr(mut self, name: &str, kind: AttrKind) -> Self {
        self.event_attributes.insert(name.to_owned(), kind);
        self
    }

    pub fn with_case_attr(mut self, name: &str, kind: AttrKind) -> Self {
        self.case_attributes.insert(name.to_owned(), kind);
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        let names = [&self.case_id, &self.activity, &self.timestamp]
            .into_iter()
            .chain(self.event_attributes.keys())
            .chain(self.case_attributes.keys());
        for name in names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("column `{name}` is assigned more than one role")));
            }
            if name.starts_with("__") || name.starts_with("present__") {
                return Err(Error::Schema(format!("column name `{name}` uses a reserved prefix")));
            }
        }
        Ok(())
    }
}

/// Attribute kinds known for a log, split by scope.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LogAttributes {
    pub event: BTreeMap<String, AttrKind>,
    pub case: BTreeMap<String, AttrKind>,
}

impl From<&LogSchema> for LogAttributes {
    fn from(schema: &LogSchema) -> Self {
        LogAttributes {
            event: schema.event_attributes.clone(),
            case: schema.case_attributes.clone(),
        }
    }
}

/// Timestamp-derived and inter-case features of one event.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedFeatures {
    pub hour: u32,
    /// Monday = 0.
    pub weekday: u32,
    pub month: u32,
    /// Seconds since the first event of the case.
    pub elapsed: f64,
    /// Seconds since the previous event of the case (0 for the first).
    pub delta: f64,
    /// 1-based position in the trace.
    pub event_nr: usize,
    pub open_cases: usize,
}

impl DerivedFeatures {
    pub const COLUMNS: [&'static str; 7] = [
        "__hour",
        "__weekday",
        "__month",
        "__elapsed",
        "__delta",
        "__event_nr",
        "__open_cases",
    ];

    pub fn to_array(&self) -> [f64; 7] {
        [
            self.hour as f64,
            self.weekday as f64,
            self.month as f64,
            self.elapsed,
            self.delta,
            self.event_nr as f64,
            self.open_cases as f64,
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub activity: String,
    pub timestamp: NaiveDateTime,
    /// Zero-based data row in the source file; breaks timestamp ties.
    pub row: usize,
    pub payload: BTreeMap<String, Value>,
    /// Presence indicators, filled by [`fill_and_flag_missing`].
    pub present: BTreeMap<String, bool>,
    pub derived: Option<DerivedFeatures>,
}

impl Event {
    pub fn new(activity: &str, timestamp: NaiveDateTime, row: usize) -> Self {
        Event {
            activity: activity.to_owned(),
            timestamp,
            row,
            payload: BTreeMap::new(),
            present: BTreeMap::new(),
            derived: None,
        }
    }

    pub fn with_attr(mut self, name: &str, value: Value) -> Self {
        self.payload.insert(name.to_owned(), value);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub case_id: String,
    pub events: Vec<Event>,
    pub case_attrs: BTreeMap<String, Value>,
    pub outcome: Option<bool>,
}

impl Trace {
    pub fn new(case_id: &str, events: Vec<Event>) -> Self {
        let mut trace = Trace {
            case_id: case_id.to_owned(),
            events,
            case_attrs: BTreeMap::new(),
            outcome: None,
        };
        trace.sort_events();
        trace
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn start(&self) -> Option<NaiveDateTime> {
        self.events.first().map(|e| e.timestamp)
    }

    pub fn end(&self) -> Option<NaiveDateTime> {
        self.events.last().map(|e| e.timestamp)
    }

    pub(crate) fn sort_events(&mut self) {
        self.events.sort_by_key(|a| (a.timestamp, a.row));
    }

    fn start_key(&self) -> Option<(NaiveDateTime, usize)> {
        self.events.first().map(|e| (e.timestamp, e.row))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EventLog {
    pub attributes: LogAttributes,
    pub traces: Vec<Trace>,
}

impl EventLog {
    pub fn new(attributes: LogAttributes, traces: Vec<Trace>) -> Self {
        EventLog { attributes, traces }
    }

    pub fn n_events(&self) -> usize {
        self.traces.iter().map(Trace::len).sum()
    }

    pub fn is_labeled(&self) -> bool {
        self.traces.iter().all(|t| t.outcome.is_some())
    }

    pub fn max_trace_len(&self) -> usize {
        self.traces.iter().map(Trace::len).max().unwrap_or(0)
    }

    /// Case ids ordered by case start.
    pub fn case_ids(&self) -> Vec<&str> {
        self.traces.iter().map(|t| t.case_id.as_str()).collect()
    }

    pub fn subset(&self, case_ids: &BTreeSet<&str>) -> EventLog {
        EventLog {
            attributes: self.attributes.clone(),
            traces: self
                .traces
                .iter()
                .filter(|t| case_ids.contains(t.case_id.as_str()))
                .cloned()
                .collect(),
        }
    }
}

fn seconds_between(later: NaiveDateTime, earlier: NaiveDateTime) -> f64 {
    let d = later - earlier;
    match d.num_microseconds() {
        Some(us) => us as f64 / 1e6,
        None => d.num_milliseconds() as f64 / 1e3,
    }
}

/// Attaches [`DerivedFeatures`] to every event. Open cases are counted
/// log-wide: a case is open at time `x` when its first timestamp is `<= x`
/// and its last timestamp is `>= x`.
pub fn derive_features(log: &EventLog) -> EventLog {
    let mut starts: Vec<NaiveDateTime> = log.traces.iter().filter_map(Trace::start).collect();
    let mut ends: Vec<NaiveDateTime> = log.traces.iter().filter_map(Trace::end).collect();
    starts.sort_unstable();
    ends.sort_unstable();
    let open_at = |x: NaiveDateTime| {
        let started = starts.partition_point(|s| *s <= x);
        let ended = ends.partition_point(|e| *e < x);
        started - ended
    };

    let mut out = log.clone();
    for trace in &mut out.traces {
        let Some(first) = trace.start() else { continue };
        let mut previous = first;
        for (i, event) in trace.events.iter_mut().enumerate() {
            let ts = event.timestamp;
            event.derived = Some(DerivedFeatures {
                hour: ts.hour(),
                weekday: ts.weekday().num_days_from_monday(),
                month: ts.month(),
                elapsed: seconds_between(ts, first),
                delta: seconds_between(ts, previous),
                event_nr: i + 1,
                open_cases: open_at(ts),
            });
            previous = ts;
        }
    }
    out
}

/// How support of a categorical level is counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RareLevelUnit {
    /// Number of distinct cases in which the level occurs.
    #[default]
    Case,
    /// Number of events carrying the level.
    Event,
}

impl std::str::FromStr for RareLevelUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "case" => Ok(RareLevelUnit::Case),
            "event" => Ok(RareLevelUnit::Event),
            other => Err(Error::Param(format!("unknown rare-level unit `{other}` (expected case or event)"))),
        }
    }
}

/// Categorical levels kept after rare-level collapsing. Fitted on training
/// data and re-applied unchanged to test data.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelMapping {
    pub activity: BTreeSet<String>,
    pub event: BTreeMap<String, BTreeSet<String>>,
    pub case: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Default)]
struct LevelCounter {
    counts: BTreeMap<String, usize>,
    seen_in_case: BTreeSet<String>,
}

impl LevelCounter {
    fn observe(&mut self, level: &str, unit: RareLevelUnit) {
        let count = match unit {
            RareLevelUnit::Event => true,
            RareLevelUnit::Case => self.seen_in_case.insert(level.to_owned()),
        };
        if count {
            *self.counts.entry(level.to_owned()).or_default() += 1;
        }
    }

    fn end_case(&mut self) {
        self.seen_in_case.clear();
    }

    fn kept(&self, min_support: usize) -> BTreeSet<String> {
        self.counts
            .iter()
            .filter(|(_, &n)| n > min_support)
            .map(|(level, _)| level.clone())
            .collect()
    }
}

fn check_reserved(level: &str, attribute: &str) -> Result<()> {
    if level == OTHER_LEVEL {
        return Err(Error::Input(format!(
            "attribute `{attribute}` already contains the reserved level `{OTHER_LEVEL}`"
        )));
    }
    Ok(())
}

impl LevelMapping {
    /// Keeps the levels with support strictly greater than `min_support`.
    pub fn fit(log: &EventLog, min_support: usize, unit: RareLevelUnit) -> Result<LevelMapping> {
        let mut activity = LevelCounter::default();
        let mut event: BTreeMap<&str, LevelCounter> = BTreeMap::new();
        let mut case: BTreeMap<&str, LevelCounter> = BTreeMap::new();
        for (name, kind) in &log.attributes.event {
            if *kind == AttrKind::Categorical {
                event.insert(name, LevelCounter::default());
            }
        }
        for (name, kind) in &log.attributes.case {
            if *kind == AttrKind::Categorical {
                case.insert(name, LevelCounter::default());
            }
        }

        for trace in &log.traces {
            for e in &trace.events {
                check_reserved(&e.activity, "activity")?;
                activity.observe(&e.activity, unit);
                for (name, counter) in event.iter_mut() {
                    if let Some(Value::Categorical(level)) = e.payload.get(*name) {
                        check_reserved(level, name)?;
                        counter.observe(level, unit);
                    }
                }
            }
            for (name, counter) in case.iter_mut() {
                if let Some(Value::Categorical(level)) = trace.case_attrs.get(*name) {
                    check_reserved(level, name)?;
                    // case-level values count once per case regardless of unit
                    counter.observe(level, RareLevelUnit::Case);
                }
                counter.end_case();
            }
            activity.end_case();
            event.values_mut().for_each(LevelCounter::end_case);
        }

        Ok(LevelMapping {
            activity: activity.kept(min_support),
            event: event.iter().map(|(k, c)| (k.to_string(), c.kept(min_support))).collect(),
            case: case.iter().map(|(k, c)| (k.to_string(), c.kept(min_support))).collect(),
        })
    }

    /// Replaces every level outside the mapping by [`OTHER_LEVEL`].
    pub fn apply(&self, log: &EventLog) -> EventLog {
        fn remap(level: &mut String, kept: &BTreeSet<String>) {
            if !kept.contains(level.as_str()) && level != MISSING_LEVEL {
                *level = OTHER_LEVEL.to_owned();
            }
        }
        let mut out = log.clone();
        for trace in &mut out.traces {
            for e in &mut trace.events {
                remap(&mut e.activity, &self.activity);
                for (name, kept) in &self.event {
                    if let Some(Value::Categorical(level)) = e.payload.get_mut(name) {
                        remap(level, kept);
                    }
                }
            }
            for (name, kept) in &self.case {
                if let Some(Value::Categorical(level)) = trace.case_attrs.get_mut(name) {
                    remap(level, kept);
                }
            }
        }
        out
    }
}

/// Replaces categorical levels occurring in `min_support` or fewer units by
/// [`OTHER_LEVEL`]. Returns the collapsed log and the reusable mapping.
pub fn collapse_rare_levels(
    log: &EventLog,
    min_support: usize,
    unit: RareLevelUnit,
) -> Result<(EventLog, LevelMapping)> {
    let mapping = LevelMapping::fit(log, min_support, unit)?;
    if min_support == 0 {
        return Ok((log.clone(), mapping));
    }
    Ok((mapping.apply(log), mapping))
}

/// Forward-fills absent event attributes from the closest preceding event of
/// the same trace and records `present` indicators. Attributes never seen in
/// the trace so far become 0 (numeric) or [`MISSING_LEVEL`] (categorical).
/// Absent case attributes get the same defaults without indicators.
pub fn fill_and_flag_missing(log: &EventLog) -> EventLog {
    let default_for = |kind: AttrKind| match kind {
        AttrKind::Numeric => Value::Numeric(0.0),
        AttrKind::Categorical => Value::Categorical(MISSING_LEVEL.to_owned()),
    };
    let mut out = log.clone();
    for trace in &mut out.traces {
        for (name, kind) in &log.attributes.event {
            let mut last: Option<Value> = None;
            for e in &mut trace.events {
                match e.payload.get(name) {
                    Some(v) if !v.is_absent() => {
                        last = Some(v.clone());
                        e.present.insert(name.clone(), true);
                    }
                    _ => {
                        let filled = last.clone().unwrap_or_else(|| default_for(*kind));
                        e.payload.insert(name.clone(), filled);
                        e.present.insert(name.clone(), false);
                    }
                }
            }
        }
        for (name, kind) in &log.attributes.case {
            let slot = trace.case_attrs.entry(name.clone()).or_insert(Value::Absent);
            if slot.is_absent() {
                *slot = default_for(*kind);
            }
        }
    }
    out
}

/// Keeps at most the first `max_len` events of every trace.
pub fn truncate_traces(log: &EventLog, max_len: usize) -> Result<EventLog> {
    if max_len == 0 {
        return Err(Error::Param("truncation length must be at least 1".into()));
    }
    let mut out = log.clone();
    for trace in &mut out.traces {
        trace.events.truncate(max_len);
    }
    Ok(out)
}

/// Length by which 90% of the minority-class traces have completed: the
/// length of the `ceil(0.9 n)`-th shortest minority trace.
pub fn suggest_truncation(log: &EventLog) -> Result<usize> {
    if !log.is_labeled() {
        return Err(Error::Input("suggest_truncation requires a labeled log".into()));
    }
    let positives = log.traces.iter().filter(|t| t.outcome == Some(true)).count();
    let negatives = log.traces.len() - positives;
    let minority = if positives == 0 {
        false
    } else if negatives == 0 {
        true
    } else {
        positives <= negatives
    };
    let mut lengths: Vec<usize> = log
        .traces
        .iter()
        .filter(|t| t.outcome == Some(minority))
        .map(Trace::len)
        .collect();
    if lengths.is_empty() {
        return Err(Error::EmptyLog);
    }
    lengths.sort_unstable();
    let rank = (0.9 * lengths.len() as f64).ceil() as usize;
    Ok(lengths[rank.clamp(1, lengths.len()) - 1])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { train_fraction: 0.8 }
    }
}

/// Orders cases by start time, sends the first `ceil(f n)` to training and
/// the rest to test, then drops training events at or after the earliest
/// test-case start. Training traces emptied by this are removed.
pub fn temporal_split(log: &EventLog, spec: &SplitSpec) -> Result<(EventLog, EventLog)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::Param(format!(
            "train fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    if log.traces.iter().any(Trace::is_empty) {
        return Err(Error::Split("every trace needs at least one event".into()));
    }
    let n = log.traces.len();
    if n < 2 {
        return Err(Error::Split(format!("need at least 2 cases, got {n}")));
    }
    let mut ordered: Vec<&Trace> = log.traces.iter().collect();
    ordered.sort_by_key(|a| a.start_key());
    let n_train = ((spec.train_fraction * n as f64).ceil() as usize).clamp(1, n - 1);
    let (train_part, test_part) = ordered.split_at(n_train);
    let test_start = test_part
        .iter()
        .filter_map(|t| t.start())
        .min()
        .expect("test part is nonempty");

    let mut discarded = 0usize;
    let train: Vec<Trace> = train_part
        .iter()
        .filter_map(|t| {
            let mut t = (*t).clone();
            let before = t.len();
            t.events.retain(|e| e.timestamp < test_start);
            discarded += before - t.len();
            (!t.is_empty()).then_some(t)
        })
        .collect();
    if discarded > 0 {
        log::info!("temporal split discarded {discarded} training events overlapping the test period");
    }
    let test: Vec<Trace> = test_part.iter().map(|t| (*t).clone()).collect();
    Ok((
        EventLog::new(log.attributes.clone(), train),
        EventLog::new(log.attributes.clone(), test),
    ))
}

/// Summary statistics of a labeled log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogStats {
    pub n_traces: usize,
    pub pos_class_ratio: f64,
    pub median_length: f64,
    pub max_length: usize,
    pub trunc_length: usize,
    pub n_events: usize,
}

impl LogStats {
    pub fn compute(log: &EventLog, trunc_length: usize) -> LogStats {
        let mut lengths: Vec<usize> = log.traces.iter().map(Trace::len).collect();
        lengths.sort_unstable();
        let median_length = match lengths.len() {
            0 => 0.0,
            n if n % 2 == 1 => lengths[n / 2] as f64,
            n => (lengths[n / 2 - 1] + lengths[n / 2]) as f64 / 2.0,
        };
        let positives = log.traces.iter().filter(|t| t.outcome == Some(true)).count();
        LogStats {
            n_traces: log.traces.len(),
            pos_class_ratio: if log.traces.is_empty() {
                0.0
            } else {
                positives as f64 / log.traces.len() as f64
            },
            median_length,
            max_length: lengths.last().copied().unwrap_or(0),
            trunc_length,
            n_events: log.n_events(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn ts(h: u32, m: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2024, 3, 4).unwrap().and_hms_opt(h, m, 0).unwrap()
    }

    fn trace(id: &str, times: &[(u32, u32)]) -> Trace {
        let events = times
            .iter()
            .enumerate()
            .map(|(i, &(h, m))| Event::new("A", ts(h, m), i))
            .collect();
        Trace::new(id, events)
    }

    fn log_of(traces: Vec<Trace>) -> EventLog {
        EventLog::new(LogAttributes::default(), traces)
    }

    #[test]
    fn single_case_has_one_open_case() {
        let log = derive_features(&log_of(vec![trace("a", &[(10, 0), (10, 5), (11, 0)])]));
        for e in &log.traces[0].events {
            assert_eq!(e.derived.unwrap().open_cases, 1);
        }
    }

    #[test]
    fn overlapping_cases_count_two() {
        let log = derive_features(&log_of(vec![
            trace("a", &[(10, 0), (12, 0)]),
            trace("b", &[(10, 0), (12, 0)]),
        ]));
        for t in &log.traces {
            for e in &t.events {
                assert_eq!(e.derived.unwrap().open_cases, 2);
            }
        }
    }

    #[test]
    fn delta_and_elapsed_in_seconds() {
        let log = derive_features(&log_of(vec![trace("a", &[(10, 0), (10, 5), (10, 7)])]));
        let d: Vec<_> = log.traces[0].events.iter().map(|e| e.derived.unwrap()).collect();
        assert_eq!(d[0].delta, 0.0);
        assert_eq!(d[1].delta, 300.0);
        assert_eq!(d[2].elapsed, 420.0);
        assert_eq!(d[2].event_nr, 3);
        assert_eq!(d[0].hour, 10);
        // 2024-03-04 is a Monday
        assert_eq!(d[0].weekday, 0);
        assert_eq!(d[0].month, 3);
    }

    #[test]
    fn derive_features_is_idempotent() {
        let log = log_of(vec![trace("a", &[(9, 0), (10, 0)]), trace("b", &[(9, 30), (11, 0)])]);
        let once = derive_features(&log);
        assert_eq!(derive_features(&once), once);
    }

    fn categorical_log(levels: &[(&str, usize)]) -> EventLog {
        let mut traces = Vec::new();
        let mut case = 0;
        for (level, n_cases) in levels {
            for _ in 0..*n_cases {
                let e = Event::new("A", ts(1, 0), 0).with_attr("res", Value::Categorical(level.to_string()));
                traces.push(Trace::new(&format!("c{case}"), vec![e.clone(), e]));
                case += 1;
            }
        }
        let mut attrs = LogAttributes::default();
        attrs.event.insert("res".into(), AttrKind::Categorical);
        EventLog::new(attrs, traces)
    }

    fn levels_of(log: &EventLog) -> BTreeSet<String> {
        log.traces
            .iter()
            .flat_map(|t| t.events.iter())
            .filter_map(|e| e.payload["res"].as_str().map(str::to_owned))
            .collect()
    }

    #[test]
    fn rare_level_boundary() {
        let log = categorical_log(&[("ten", 10), ("eleven", 11)]);
        let (collapsed, mapping) = collapse_rare_levels(&log, 10, RareLevelUnit::Case).unwrap();
        let levels = levels_of(&collapsed);
        assert!(levels.contains(OTHER_LEVEL));
        assert!(levels.contains("eleven"));
        assert!(!levels.contains("ten"));
        assert!(mapping.event["res"].contains("eleven"));
    }

    #[test]
    fn rare_level_event_unit_counts_events() {
        // 6 cases x 2 events = 12 events > 10
        let log = categorical_log(&[("six", 6)]);
        let (by_case, _) = collapse_rare_levels(&log, 10, RareLevelUnit::Case).unwrap();
        let (by_event, _) = collapse_rare_levels(&log, 10, RareLevelUnit::Event).unwrap();
        assert_eq!(levels_of(&by_case), BTreeSet::from([OTHER_LEVEL.to_string()]));
        assert_eq!(levels_of(&by_event), BTreeSet::from(["six".to_string()]));
    }

    #[test]
    fn zero_support_is_identity() {
        let log = categorical_log(&[("a", 1), ("b", 2)]);
        let (collapsed, _) = collapse_rare_levels(&log, 0, RareLevelUnit::Case).unwrap();
        assert_eq!(collapsed, log);
    }

    #[test]
    fn reserved_level_in_raw_data_is_rejected() {
        let log = categorical_log(&[(OTHER_LEVEL, 1)]);
        assert!(matches!(
            collapse_rare_levels(&log, 10, RareLevelUnit::Case),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn mapping_maps_unseen_test_levels_to_other() {
        let train = categorical_log(&[("a", 12)]);
        let test = categorical_log(&[("zzz", 1), ("a", 1)]);
        let (_, mapping) = collapse_rare_levels(&train, 10, RareLevelUnit::Case).unwrap();
        let levels = levels_of(&mapping.apply(&test));
        assert_eq!(levels, BTreeSet::from(["a".to_string(), OTHER_LEVEL.to_string()]));
    }

    fn payload_log(values: Vec<Option<Value>>, attr: &str, kind: AttrKind) -> EventLog {
        let events = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let e = Event::new("A", ts(1, i as u32), i);
                match v {
                    Some(v) => e.with_attr(attr, v),
                    None => e,
                }
            })
            .collect();
        let mut attrs = LogAttributes::default();
        attrs.event.insert(attr.into(), kind);
        EventLog::new(attrs, vec![Trace::new("c", events)])
    }

    #[test]
    fn fill_carries_previous_value_forward() {
        let log = payload_log(
            vec![Some(Value::Categorical("bob".into())), Some(Value::Absent), None],
            "resource",
            AttrKind::Categorical,
        );
        let filled = fill_and_flag_missing(&log);
        let events = &filled.traces[0].events;
        for e in events {
            assert_eq!(e.payload["resource"], Value::Categorical("bob".into()));
        }
        assert!(events[0].present["resource"]);
        assert!(!events[1].present["resource"]);
        assert!(!events[2].present["resource"]);
    }

    #[test]
    fn fill_is_noop_when_always_present() {
        let log = payload_log(
            vec![Some(Value::Numeric(1.0)), Some(Value::Numeric(2.0))],
            "x",
            AttrKind::Numeric,
        );
        let filled = fill_and_flag_missing(&log);
        for (a, b) in filled.traces[0].events.iter().zip(&log.traces[0].events) {
            assert_eq!(a.payload, b.payload);
            assert!(a.present["x"]);
        }
    }

    #[test]
    fn never_present_numeric_defaults_to_zero() {
        let log = payload_log(vec![None, None], "x", AttrKind::Numeric);
        let filled = fill_and_flag_missing(&log);
        for e in &filled.traces[0].events {
            assert_eq!(e.payload["x"], Value::Numeric(0.0));
            assert!(!e.present["x"]);
        }
    }

    #[test]
    fn truncation() {
        let times: Vec<(u32, u32)> = (0..175).map(|i| (i / 60, i % 60)).collect();
        let log = log_of(vec![trace("long", &times), trace("short", &[(1, 0)])]);
        let cut = truncate_traces(&log, 40).unwrap();
        assert_eq!(cut.traces[0].len(), 40);
        assert_eq!(cut.traces[1].len(), 1);
        assert_eq!(truncate_traces(&log, 175).unwrap(), log);
        assert!(truncate_traces(&log, 0).is_err());
    }

    #[test]
    fn suggest_truncation_uses_minority_class() {
        let mut traces = Vec::new();
        let minority = [3, 3, 3, 3, 3, 3, 3, 3, 3, 50];
        for (i, len) in minority.iter().enumerate() {
            let times: Vec<(u32, u32)> = (0..*len).map(|j| (0, j as u32)).collect();
            let mut t = trace(&format!("m{i}"), &times);
            t.outcome = Some(true);
            traces.push(t);
        }
        for i in 0..20 {
            let mut t = trace(&format!("n{i}"), &[(0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6)]);
            t.outcome = Some(false);
            traces.push(t);
        }
        // sorted minority lengths; ceil(0.9 * 10) = 9th shortest = 3
        assert_eq!(suggest_truncation(&log_of(traces)).unwrap(), 3);
    }

    #[test]
    fn split_counts_and_disjointness() {
        let traces: Vec<Trace> = (0..10).map(|i| trace(&format!("c{i}"), &[(i, 0), (i, 30)])).collect();
        let (train, test) = temporal_split(&log_of(traces), &SplitSpec::default()).unwrap();
        assert_eq!(train.traces.len(), 8);
        assert_eq!(test.traces.len(), 2);
        let train_ids: BTreeSet<_> = train.case_ids().into_iter().collect();
        assert!(test.case_ids().iter().all(|id| !train_ids.contains(id)));
        assert_eq!(train.n_events(), 16);
    }

    #[test]
    fn split_discards_overlapping_training_events() {
        let mut traces: Vec<Trace> = (0..4).map(|i| trace(&format!("c{i}"), &[(i, 0)])).collect();
        // train case with 5 events, 3 after the test period starts at 05:00
        traces.push(trace("long", &[(4, 0), (4, 30), (5, 0), (6, 0), (7, 0)]));
        traces.push(trace("test", &[(5, 0), (5, 1)]));
        let (train, test) = temporal_split(&log_of(traces), &SplitSpec { train_fraction: 0.8 }).unwrap();
        assert_eq!(test.case_ids(), vec!["test"]);
        let long = train.traces.iter().find(|t| t.case_id == "long").unwrap();
        assert_eq!(long.len(), 2);
    }

    #[test]
    fn split_needs_two_cases() {
        let log = log_of(vec![trace("a", &[(1, 0)])]);
        assert!(matches!(temporal_split(&log, &SplitSpec::default()), Err(Error::Split(_))));
    }
}
