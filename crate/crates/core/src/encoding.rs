//! Prefix extraction and sequence encodings.
//!
//! Every prefix of a labeled trace becomes one instance. Two encodings turn
//! a prefix into a fixed-width numeric row:
//!
//! * aggregation: level frequencies for categorical event attributes,
//!   mean/max/min/sum/std for numeric ones, the derived features of the last
//!   event and the case attributes;
//! * index: one block per event position (one-hot activity and categorical
//!   payload, numeric payload, presence indicators, derived features),
//!   zero-padded up to `max_len`, followed by the case attributes.
//!
//! Categorical levels are frozen when the encoder is fitted; anything unseen
//! at encode time lands in the [`OTHER_LEVEL`] column.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::event_log::{AttrKind, DerivedFeatures, Event, EventLog, LogAttributes, Trace, Value, OTHER_LEVEL};
use crate::{Error, Result};

/// The first `len` events of a labeled trace.
#[derive(Clone, Copy, Debug)]
pub struct LabeledPrefix<'a> {
    pub trace: &'a Trace,
    pub len: usize,
}

impl<'a> LabeledPrefix<'a> {
    pub fn events(&self) -> &'a [Event] {
        &self.trace.events[..self.len]
    }

    pub fn case_id(&self) -> &'a str {
        &self.trace.case_id
    }

    pub fn outcome(&self) -> bool {
        self.trace.outcome.unwrap_or(false)
    }

    /// The same case cut to its first `len` events.
    pub fn shortened(&self, len: usize) -> LabeledPrefix<'a> {
        LabeledPrefix {
            trace: self.trace,
            len: len.min(self.len),
        }
    }
}

/// All prefixes of lengths `min_len..=min(L, max_len)` of every trace.
pub fn extract_prefixes(log: &EventLog, min_len: usize, max_len: usize) -> Result<Vec<LabeledPrefix<'_>>> {
    if min_len == 0 || min_len > max_len {
        return Err(Error::Param(format!(
            "prefix lengths need 1 <= min_len <= max_len, got {min_len}..{max_len}"
        )));
    }
    if let Some(t) = log.traces.iter().find(|t| t.outcome.is_none()) {
        return Err(Error::Input(format!("trace `{}` is unlabeled", t.case_id)));
    }
    Ok(log
        .traces
        .iter()
        .flat_map(|trace| (min_len..=trace.len().min(max_len)).map(move |len| LabeledPrefix { trace, len }))
        .collect())
}

/// Partition of prefixes by length. Empty buckets are absent.
pub fn bucket_by_length<'a>(prefixes: &[LabeledPrefix<'a>]) -> BTreeMap<usize, Vec<LabeledPrefix<'a>>> {
    let mut buckets: BTreeMap<usize, Vec<LabeledPrefix<'a>>> = BTreeMap::new();
    for p in prefixes {
        buckets.entry(p.len).or_default().push(*p);
    }
    buckets
}

/// Bucket serving a prefix of length `len`: the largest trained length
/// `<= len`, or the smallest one when every bucket is longer.
pub fn route_bucket(lengths: &BTreeSet<usize>, len: usize) -> Option<usize> {
    lengths.range(..=len).next_back().or_else(|| lengths.first()).copied()
}

/// Dense row-major matrix with a named column schema.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub columns: Vec<String>,
    pub values: Vec<f64>,
    pub labels: Vec<bool>,
    /// (case id, prefix length) per row.
    pub index: Vec<(String, usize)>,
}

impl FeatureMatrix {
    /// Builds a matrix from plain rows; the index is filled with row numbers.
    pub fn from_rows(columns: Vec<String>, rows: &[Vec<f64>], labels: Vec<bool>) -> Result<FeatureMatrix> {
        if rows.len() != labels.len() {
            return Err(Error::Input(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        let mut values = Vec::with_capacity(rows.len() * columns.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::Input(format!("row {i} has {} values, expected {}", row.len(), columns.len())));
            }
            values.extend_from_slice(row);
        }
        let matrix = FeatureMatrix {
            columns,
            values,
            index: (0..rows.len()).map(|i| (i.to_string(), 1)).collect(),
            labels,
        };
        matrix.check_finite()?;
        Ok(matrix)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.n_cols();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }

    fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(p) => Err(Error::Encode(format!(
                "non-finite value in row {}, column `{}`",
                p / self.n_cols().max(1),
                self.columns[p % self.n_cols().max(1)]
            ))),
        }
    }

    /// Debug export: header is `case_id,prefix_len,label` plus the schema.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec!["case_id".to_owned(), "prefix_len".to_owned(), "label".to_owned()];
        header.extend(self.columns.iter().cloned());
        out.write_record(&header)?;
        for (i, row) in self.rows().enumerate() {
            let mut record = vec![
                self.index[i].0.clone(),
                self.index[i].1.to_string(),
                u8::from(self.labels[i]).to_string(),
            ];
            record.extend(row.iter().map(f64::to_string));
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingKind {
    Aggregation,
    IndexPadded,
    /// Index encoding without padding, one encoder per prefix length.
    IndexBucketed,
}

/// Categorical levels and numeric attribute names frozen at fit time.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub activity: Vec<String>,
    pub event_categorical: BTreeMap<String, Vec<String>>,
    pub event_numeric: Vec<String>,
    pub case_categorical: BTreeMap<String, Vec<String>>,
    pub case_numeric: Vec<String>,
    /// Every event attribute, for presence indicators.
    pub event_attributes: Vec<String>,
}

fn with_other(levels: BTreeSet<String>) -> Vec<String> {
    let mut levels = levels;
    levels.insert(OTHER_LEVEL.to_owned());
    levels.into_iter().collect()
}

impl Vocabulary {
    pub fn fit(attributes: &LogAttributes, prefixes: &[LabeledPrefix<'_>]) -> Result<Vocabulary> {
        if prefixes.is_empty() {
            return Err(Error::Encode("cannot fit an encoder on zero prefixes".into()));
        }
        let mut activity = BTreeSet::new();
        let mut event_levels: BTreeMap<&str, BTreeSet<String>> = attributes
            .event
            .iter()
            .filter(|(_, k)| **k == AttrKind::Categorical)
            .map(|(n, _)| (n.as_str(), BTreeSet::new()))
            .collect();
        let mut case_levels: BTreeMap<&str, BTreeSet<String>> = attributes
            .case
            .iter()
            .filter(|(_, k)| **k == AttrKind::Categorical)
            .map(|(n, _)| (n.as_str(), BTreeSet::new()))
            .collect();

        let mut seen_traces = BTreeSet::new();
        for prefix in prefixes {
            for event in prefix.events() {
                activity.insert(event.activity.clone());
                for (name, levels) in event_levels.iter_mut() {
                    if let Some(Value::Categorical(level)) = event.payload.get(*name) {
                        levels.insert(level.clone());
                    }
                }
            }
            if seen_traces.insert(prefix.case_id()) {
                for (name, levels) in case_levels.iter_mut() {
                    if let Some(Value::Categorical(level)) = prefix.trace.case_attrs.get(*name) {
                        levels.insert(level.clone());
                    }
                }
            }
        }

        let numeric = |attrs: &BTreeMap<String, AttrKind>| {
            attrs
                .iter()
                .filter(|(_, k)| **k == AttrKind::Numeric)
                .map(|(n, _)| n.clone())
                .collect::<Vec<_>>()
        };
        Ok(Vocabulary {
            activity: with_other(activity),
            event_categorical: event_levels.into_iter().map(|(k, v)| (k.to_owned(), with_other(v))).collect(),
            event_numeric: numeric(&attributes.event),
            case_categorical: case_levels.into_iter().map(|(k, v)| (k.to_owned(), with_other(v))).collect(),
            case_numeric: numeric(&attributes.case),
            event_attributes: attributes.event.keys().cloned().collect(),
        })
    }

    fn level_slot(levels: &[String], value: Option<&Value>) -> Option<usize> {
        let level = value?.as_str()?;
        let other = levels.binary_search_by(|l| l.as_str().cmp(OTHER_LEVEL)).ok();
        levels.binary_search_by(|l| l.as_str().cmp(level)).ok().or(other)
    }

    fn event_block_columns(&self, prefix: &str) -> Vec<String> {
        let mut cols: Vec<String> = self.activity.iter().map(|l| format!("{prefix}act={l}")).collect();
        for (name, levels) in &self.event_categorical {
            cols.extend(levels.iter().map(|l| format!("{prefix}{name}={l}")));
        }
        cols.extend(self.event_numeric.iter().map(|n| format!("{prefix}{n}")));
        cols.extend(self.event_attributes.iter().map(|n| format!("{prefix}present__{n}")));
        cols.extend(DerivedFeatures::COLUMNS.iter().map(|c| format!("{prefix}{c}")));
        cols
    }

    fn event_block_width(&self) -> usize {
        self.activity.len()
            + self.event_categorical.values().map(Vec::len).sum::<usize>()
            + self.event_numeric.len()
            + self.event_attributes.len()
            + DerivedFeatures::COLUMNS.len()
    }

    fn write_event_block(&self, event: &Event, out: &mut [f64]) {
        let mut offset = 0;
        if let Some(slot) = Self::level_slot(&self.activity, Some(&Value::Categorical(event.activity.clone()))) {
            out[offset + slot] = 1.0;
        }
        offset += self.activity.len();
        for (name, levels) in &self.event_categorical {
            if let Some(slot) = Self::level_slot(levels, event.payload.get(name)) {
                out[offset + slot] = 1.0;
            }
            offset += levels.len();
        }
        for name in &self.event_numeric {
            out[offset] = event.payload.get(name).and_then(Value::as_f64).unwrap_or(0.0);
            offset += 1;
        }
        for name in &self.event_attributes {
            out[offset] = f64::from(u8::from(present(event, name)));
            offset += 1;
        }
        if let Some(d) = &event.derived {
            out[offset..offset + 7].copy_from_slice(&d.to_array());
        }
    }

    fn case_columns(&self) -> Vec<String> {
        let mut cols = Vec::new();
        for (name, levels) in &self.case_categorical {
            cols.extend(levels.iter().map(|l| format!("case:{name}={l}")));
        }
        cols.extend(self.case_numeric.iter().map(|n| format!("case:{n}")));
        cols
    }

    fn write_case_block(&self, trace: &Trace, out: &mut [f64]) {
        let mut offset = 0;
        for (name, levels) in &self.case_categorical {
            if let Some(slot) = Self::level_slot(levels, trace.case_attrs.get(name)) {
                out[offset + slot] = 1.0;
            }
            offset += levels.len();
        }
        for name in &self.case_numeric {
            out[offset] = trace.case_attrs.get(name).and_then(Value::as_f64).unwrap_or(0.0);
            offset += 1;
        }
    }
}

fn present(event: &Event, name: &str) -> bool {
    event
        .present
        .get(name)
        .copied()
        .unwrap_or_else(|| event.payload.get(name).is_some_and(|v| !v.is_absent()))
}

const NUMERIC_AGGREGATES: [&str; 5] = ["mean", "max", "min", "sum", "std"];

/// A fitted encoder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub kind: EncodingKind,
    pub vocabulary: Vocabulary,
    /// Number of event blocks (index encodings only).
    pub max_len: Option<usize>,
    columns: Vec<String>,
}

impl EncoderSpec {
    pub fn fit_aggregation(attributes: &LogAttributes, prefixes: &[LabeledPrefix<'_>]) -> Result<EncoderSpec> {
        let vocabulary = Vocabulary::fit(attributes, prefixes)?;
        Ok(Self::aggregation(vocabulary))
    }

    pub fn fit_index(attributes: &LogAttributes, prefixes: &[LabeledPrefix<'_>], max_len: usize) -> Result<EncoderSpec> {
        let vocabulary = Vocabulary::fit(attributes, prefixes)?;
        Self::index(vocabulary, max_len, EncodingKind::IndexPadded)
    }

    pub fn aggregation(vocabulary: Vocabulary) -> EncoderSpec {
        let mut columns: Vec<String> = vocabulary.activity.iter().map(|l| format!("agg:act={l}")).collect();
        for (name, levels) in &vocabulary.event_categorical {
            columns.extend(levels.iter().map(|l| format!("agg:{name}={l}")));
        }
        for name in &vocabulary.event_numeric {
            columns.extend(NUMERIC_AGGREGATES.iter().map(|a| format!("agg:{name}:{a}")));
        }
        columns.extend(vocabulary.event_attributes.iter().map(|n| format!("agg:present__{n}")));
        columns.extend(DerivedFeatures::COLUMNS.iter().map(|c| format!("last:{c}")));
        columns.extend(vocabulary.case_columns());
        EncoderSpec {
            kind: EncodingKind::Aggregation,
            vocabulary,
            max_len: None,
            columns,
        }
    }

    pub fn index(vocabulary: Vocabulary, max_len: usize, kind: EncodingKind) -> Result<EncoderSpec> {
        if kind == EncodingKind::Aggregation {
            return Err(Error::Param("index encoder requested with aggregation kind".into()));
        }
        if max_len == 0 {
            return Err(Error::Param("index encoding needs max_len >= 1".into()));
        }
        let mut columns = Vec::new();
        for i in 1..=max_len {
            columns.extend(vocabulary.event_block_columns(&format!("e{i}:")));
        }
        columns.extend(vocabulary.case_columns());
        Ok(EncoderSpec {
            kind,
            vocabulary,
            max_len: Some(max_len),
            columns,
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn encode(&self, prefixes: &[LabeledPrefix<'_>]) -> Result<FeatureMatrix> {
        let width = self.width();
        let mut values = vec![0.0; prefixes.len() * width];
        for (prefix, row) in prefixes.iter().zip(values.chunks_mut(width.max(1))) {
            match self.kind {
                EncodingKind::Aggregation => self.write_aggregation(prefix, row),
                EncodingKind::IndexPadded | EncodingKind::IndexBucketed => self.write_index(prefix, row)?,
            }
        }
        let matrix = FeatureMatrix {
            columns: self.columns.clone(),
            values,
            labels: prefixes.iter().map(LabeledPrefix::outcome).collect(),
            index: prefixes.iter().map(|p| (p.case_id().to_owned(), p.len)).collect(),
        };
        matrix.check_finite()?;
        Ok(matrix)
    }

    fn write_index(&self, prefix: &LabeledPrefix<'_>, row: &mut [f64]) -> Result<()> {
        let max_len = self.max_len.expect("index encoder has max_len");
        if prefix.len > max_len {
            return Err(Error::Encode(format!(
                "prefix of case `{}` has length {} but the encoder holds {max_len} events",
                prefix.case_id(),
                prefix.len
            )));
        }
        let block = self.vocabulary.event_block_width();
        for (i, event) in prefix.events().iter().enumerate() {
            self.vocabulary.write_event_block(event, &mut row[i * block..(i + 1) * block]);
        }
        self.vocabulary.write_case_block(prefix.trace, &mut row[max_len * block..]);
        Ok(())
    }

    fn write_aggregation(&self, prefix: &LabeledPrefix<'_>, row: &mut [f64]) {
        let vocab = &self.vocabulary;
        let events = prefix.events();
        let mut offset = 0;
        for event in events {
            let value = Value::Categorical(event.activity.clone());
            if let Some(slot) = Vocabulary::level_slot(&vocab.activity, Some(&value)) {
                row[offset + slot] += 1.0;
            }
        }
        offset += vocab.activity.len();
        for (name, levels) in &vocab.event_categorical {
            for event in events {
                if let Some(slot) = Vocabulary::level_slot(levels, event.payload.get(name)) {
                    row[offset + slot] += 1.0;
                }
            }
            offset += levels.len();
        }
        for name in &vocab.event_numeric {
            let xs: Vec<f64> = events
                .iter()
                .map(|e| e.payload.get(name).and_then(Value::as_f64).unwrap_or(0.0))
                .collect();
            row[offset..offset + 5].copy_from_slice(&numeric_summary(&xs));
            offset += 5;
        }
        for name in &vocab.event_attributes {
            row[offset] = events.iter().filter(|e| present(e, name)).count() as f64;
            offset += 1;
        }
        if let Some(d) = events.last().and_then(|e| e.derived.as_ref()) {
            row[offset..offset + 7].copy_from_slice(&d.to_array());
        }
        offset += 7;
        vocab.write_case_block(prefix.trace, &mut row[offset..]);
    }
}

/// mean, max, min, sum and population standard deviation.
pub fn numeric_summary(xs: &[f64]) -> [f64; 5] {
    if xs.is_empty() {
        return [0.0; 5];
    }
    let n = xs.len() as f64;
    let sum: f64 = xs.iter().sum();
    let mean = sum / n;
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    [mean, max, min, sum, var.sqrt()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_log::{derive_features, fill_and_flag_missing, Event};
    use chrono::NaiveDate;

    fn make_log(traces: &[(&str, &[(&str, f64)], bool)]) -> EventLog {
        let mut attrs = LogAttributes::default();
        attrs.event.insert("amount".into(), AttrKind::Numeric);
        attrs.case.insert("region".into(), AttrKind::Categorical);
        let base = NaiveDate::from_ymd_opt(2021, 6, 1).unwrap().and_hms_opt(9, 0, 0).unwrap();
        let traces = traces
            .iter()
            .enumerate()
            .map(|(c, (id, events, outcome))| {
                let events = events
                    .iter()
                    .enumerate()
                    .map(|(i, (act, amount))| {
                        let ts = base + chrono::Duration::minutes((c * 100 + i) as i64);
                        Event::new(act, ts, i).with_attr("amount", Value::Numeric(*amount))
                    })
                    .collect();
                let mut t = Trace::new(id, events);
                t.case_attrs.insert("region".into(), Value::Categorical(format!("r{}", c % 2)));
                t.outcome = Some(*outcome);
                t
            })
            .collect();
        fill_and_flag_missing(&derive_features(&EventLog::new(attrs, traces)))
    }

    fn col(m: &FeatureMatrix, row: usize, name: &str) -> f64 {
        let j = m.columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
        m.row(row)[j]
    }

    #[test]
    fn prefix_counts() {
        let long: Vec<(&str, f64)> = vec![("A", 1.0); 175];
        let log = make_log(&[("a", &[("A", 1.0), ("B", 1.0), ("A", 1.0)], true), ("b", &long, false)]);
        let prefixes = extract_prefixes(&log, 1, 40).unwrap();
        assert_eq!(prefixes.iter().filter(|p| p.case_id() == "a").count(), 3);
        assert_eq!(prefixes.iter().filter(|p| p.case_id() == "b").count(), 40);

        let short = make_log(&[("a", &[("A", 1.0)], true)]);
        assert!(extract_prefixes(&short, 2, 40).unwrap().is_empty());
        assert!(extract_prefixes(&short, 3, 2).is_err());
    }

    #[test]
    fn aggregation_counts_and_stats() {
        let log = make_log(&[("a", &[("A", 2.0), ("B", 4.0), ("A", 0.0)], true)]);
        let prefixes = extract_prefixes(&log, 1, 10).unwrap();
        let enc = EncoderSpec::fit_aggregation(&log.attributes, &prefixes).unwrap();
        let m = enc.encode(&prefixes).unwrap();
        // full prefix [A, B, A]
        assert_eq!(col(&m, 2, "agg:act=A"), 2.0);
        assert_eq!(col(&m, 2, "agg:act=B"), 1.0);
        // prefix of length 2: amounts [2, 4]
        assert_eq!(col(&m, 1, "agg:amount:mean"), 3.0);
        assert_eq!(col(&m, 1, "agg:amount:max"), 4.0);
        assert_eq!(col(&m, 1, "agg:amount:min"), 2.0);
        assert_eq!(col(&m, 1, "agg:amount:sum"), 6.0);
        assert_eq!(col(&m, 1, "agg:amount:std"), 1.0);
        assert_eq!(col(&m, 0, "agg:amount:std"), 0.0);
        assert_eq!(col(&m, 2, "last:__event_nr"), 3.0);
    }

    #[test]
    fn unseen_level_maps_to_other() {
        let train = make_log(&[("a", &[("A", 1.0)], true)]);
        let test = make_log(&[("z", &[("Q", 1.0), ("A", 1.0)], false)]);
        let enc = EncoderSpec::fit_aggregation(&train.attributes, &extract_prefixes(&train, 1, 5).unwrap()).unwrap();
        let m = enc.encode(&extract_prefixes(&test, 1, 5).unwrap()).unwrap();
        assert_eq!(col(&m, 1, &format!("agg:act={OTHER_LEVEL}")), 1.0);
        assert_eq!(col(&m, 1, "agg:act=A"), 1.0);
    }

    #[test]
    fn index_padding_and_width() {
        let log = make_log(&[("a", &[("A", 1.0), ("B", 2.0), ("C", 3.0), ("A", 4.0), ("B", 5.0)], true)]);
        let prefixes = extract_prefixes(&log, 1, 5).unwrap();
        let enc = EncoderSpec::fit_index(&log.attributes, &prefixes, 5).unwrap();
        let m = enc.encode(&prefixes).unwrap();
        let block = enc.vocabulary.event_block_width();
        let case_width = enc.vocabulary.case_columns().len();
        assert_eq!(m.n_cols(), 5 * block + case_width);
        // prefix of length 2: blocks 3..5 are zero
        assert!(m.row(1)[2 * block..5 * block].iter().all(|v| *v == 0.0));
        // full-length prefix has no zero blocks
        for b in 0..5 {
            assert!(m.row(4)[b * block..(b + 1) * block].iter().any(|v| *v != 0.0));
        }
        // prefix consistency
        assert_eq!(&m.row(1)[..2 * block], &m.row(2)[..2 * block]);

        let too_short = EncoderSpec::fit_index(&log.attributes, &prefixes, 3).unwrap();
        assert!(matches!(too_short.encode(&prefixes), Err(Error::Encode(_))));
    }

    #[test]
    fn buckets_and_routing() {
        let log = make_log(&[("a", &[("A", 1.0), ("B", 1.0)], true), ("b", &[("A", 1.0)], false)]);
        let prefixes = extract_prefixes(&log, 1, 5).unwrap();
        let buckets = bucket_by_length(&prefixes);
        assert_eq!(buckets[&1].len(), 2);
        assert_eq!(buckets[&2].len(), 1);
        assert_eq!(buckets.len(), 2);

        let lengths: BTreeSet<usize> = (1..=13).collect();
        assert_eq!(route_bucket(&lengths, 20), Some(13));
        assert_eq!(route_bucket(&lengths, 7), Some(7));
        let sparse: BTreeSet<usize> = [3, 5].into();
        assert_eq!(route_bucket(&sparse, 1), Some(3));
        assert_eq!(route_bucket(&sparse, 4), Some(3));
        assert_eq!(route_bucket(&BTreeSet::new(), 4), None);
    }

    #[test]
    fn summary_of_two_values() {
        assert_eq!(numeric_summary(&[2.0, 4.0]), [3.0, 4.0, 2.0, 6.0, 1.0]);
    }
}
