use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use super::{AttrKind, DerivedFeatures, Event, EventLog, LogAttributes, LogSchema, Trace, Value};
use crate::{Error, Result};

const LABEL_COLUMN: &str = "__label";
const TIMESTAMP_OUT: &str = "%Y-%m-%dT%H:%M:%S%.f";

pub(crate) fn parse_timestamp(raw: &str) -> Option<NaiveDateTime> {
    let raw = raw.trim();
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"] {
        if let Ok(ts) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(ts);
        }
    }
    if let Ok(ts) = DateTime::parse_from_rfc3339(raw) {
        return Some(ts.naive_utc());
    }
    if let Ok(ts) = DateTime::parse_from_str(raw, "%Y-%m-%d %H:%M:%S%.f%:z") {
        return Some(ts.naive_utc());
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
}

pub(crate) fn format_timestamp(ts: NaiveDateTime) -> String {
    ts.format(TIMESTAMP_OUT).to_string()
}

fn parse_value(raw: &str, kind: AttrKind) -> Value {
    let raw = raw.trim();
    if raw.is_empty() {
        return Value::Absent;
    }
    match kind {
        AttrKind::Categorical => Value::Categorical(raw.to_owned()),
        AttrKind::Numeric => match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Value::Numeric(v),
            _ => Value::Absent,
        },
    }
}

fn format_value(value: &Value) -> String {
    match value {
        Value::Categorical(s) => s.clone(),
        Value::Numeric(v) => v.to_string(),
        Value::Absent => String::new(),
    }
}

struct Columns {
    case_id: usize,
    activity: usize,
    timestamp: usize,
    event: Vec<(String, AttrKind, usize)>,
    case: Vec<(String, AttrKind, usize)>,
    label: Option<usize>,
    derived: Option<[usize; 7]>,
    present: Vec<(String, usize)>,
}

impl Columns {
    fn resolve(headers: &csv::StringRecord, schema: &LogSchema, preprocessed: bool) -> Result<Columns> {
        let find = |name: &str| headers.iter().position(|h| h.trim() == name);
        let require = |name: &str| {
            find(name).ok_or_else(|| Error::Schema(format!("missing mandatory column `{name}`")))
        };
        let attr_columns = |attrs: &BTreeMap<String, AttrKind>| -> Result<Vec<(String, AttrKind, usize)>> {
            attrs
                .iter()
                .map(|(name, kind)| Ok((name.clone(), *kind, require(name)?)))
                .collect()
        };
        let mut columns = Columns {
            case_id: require(&schema.case_id)?,
            activity: require(&schema.activity)?,
            timestamp: require(&schema.timestamp)?,
            event: attr_columns(&schema.event_attributes)?,
            case: attr_columns(&schema.case_attributes)?,
            label: None,
            derived: None,
            present: Vec::new(),
        };
        if preprocessed {
            columns.label = find(LABEL_COLUMN);
            let derived: Option<Vec<usize>> = DerivedFeatures::COLUMNS.iter().map(|c| find(c)).collect();
            columns.derived = derived.map(|d| d.try_into().expect("seven derived columns"));
            columns.present = schema
                .event_attributes
                .keys()
                .filter_map(|name| find(&format!("present__{name}")).map(|i| (name.clone(), i)))
                .collect();
        }
        Ok(columns)
    }
}

fn parse_number<T: std::str::FromStr>(record: &csv::StringRecord, index: usize, row: usize) -> Result<T> {
    let raw = record.get(index).unwrap_or("").trim();
    raw.parse().map_err(|_| Error::Row {
        row,
        message: format!("cannot parse `{raw}` as a number"),
    })
}

fn read_log<R: Read>(reader: R, schema: &LogSchema, preprocessed: bool) -> Result<EventLog> {
    schema.validate()?;
    let mut csv_reader = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::EmptyLog);
    }
    let columns = Columns::resolve(&headers, schema, preprocessed)?;

    let mut order: Vec<String> = Vec::new();
    let mut traces: BTreeMap<String, Trace> = BTreeMap::new();
    for (row, record) in csv_reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let case_id = field(columns.case_id).trim().to_owned();
        if case_id.is_empty() {
            return Err(Error::Row {
                row,
                message: "empty case id".into(),
            });
        }
        let raw_ts = field(columns.timestamp);
        let timestamp = parse_timestamp(raw_ts).ok_or_else(|| Error::Row {
            row,
            message: format!("unparseable timestamp `{raw_ts}`"),
        })?;
        let mut event = Event::new(field(columns.activity).trim(), timestamp, row);
        for (name, kind, i) in &columns.event {
            event.payload.insert(name.clone(), parse_value(field(*i), *kind));
        }
        for (name, i) in &columns.present {
            event.present.insert(name.clone(), field(*i).trim() == "1");
        }
        if let Some(d) = columns.derived {
            event.derived = Some(DerivedFeatures {
                hour: parse_number(&record, d[0], row)?,
                weekday: parse_number(&record, d[1], row)?,
                month: parse_number(&record, d[2], row)?,
                elapsed: parse_number(&record, d[3], row)?,
                delta: parse_number(&record, d[4], row)?,
                event_nr: parse_number(&record, d[5], row)?,
                open_cases: parse_number(&record, d[6], row)?,
            });
        }

        let trace = traces.entry(case_id.clone()).or_insert_with(|| {
            order.push(case_id.clone());
            Trace::new(&case_id, Vec::new())
        });
        for (name, kind, i) in &columns.case {
            let value = parse_value(field(*i), *kind);
            let slot = trace.case_attrs.entry(name.clone()).or_insert(Value::Absent);
            if slot.is_absent() {
                *slot = value;
            }
        }
        if let Some(i) = columns.label {
            match field(i).trim() {
                "1" => trace.outcome = Some(true),
                "0" => trace.outcome = Some(false),
                "" => {}
                other => {
                    return Err(Error::Row {
                        row,
                        message: format!("label must be 0 or 1, got `{other}`"),
                    })
                }
            }
        }
        trace.events.push(event);
    }
    if order.is_empty() {
        return Err(Error::EmptyLog);
    }

    let traces = order
        .into_iter()
        .map(|id| {
            let mut trace = traces.remove(&id).expect("case recorded in order");
            trace.sort_events();
            trace
        })
        .collect();
    Ok(EventLog::new(LogAttributes::from(schema), traces))
}

/// Reads a raw event log: one event per row, grouped by case id in order of
/// first appearance, events sorted by (timestamp, row).
pub fn read_csv_log_from_reader<R: Read>(reader: R, schema: &LogSchema) -> Result<EventLog> {
    read_log(reader, schema, false)
}

pub fn read_csv_log(path: impl AsRef<Path>, schema: &LogSchema) -> Result<EventLog> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    read_csv_log_from_reader(file, schema).map_err(|e| e.in_file(path))
}

/// Reads a log written by [`write_preprocessed_csv`] with the same schema.
pub fn read_preprocessed_csv<R: Read>(reader: R, schema: &LogSchema) -> Result<EventLog> {
    read_log(reader, schema, true)
}

/// Writes one row per event with the schema's columns followed by the
/// label, derived-feature and presence-indicator columns. Numeric values use
/// the shortest round-tripping representation.
pub fn write_preprocessed_csv<W: Write>(log: &EventLog, schema: &LogSchema, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = vec![schema.case_id.clone(), schema.activity.clone(), schema.timestamp.clone()];
    header.extend(log.attributes.event.keys().cloned());
    header.extend(log.attributes.case.keys().cloned());
    header.push(LABEL_COLUMN.to_owned());
    header.extend(DerivedFeatures::COLUMNS.iter().map(|c| c.to_string()));
    header.extend(log.attributes.event.keys().map(|k| format!("present__{k}")));
    out.write_record(&header)?;

    for trace in &log.traces {
        for event in &trace.events {
            let mut record: Vec<String> = vec![
                trace.case_id.clone(),
                event.activity.clone(),
                format_timestamp(event.timestamp),
            ];
            for name in log.attributes.event.keys() {
                record.push(event.payload.get(name).map(format_value).unwrap_or_default());
            }
            for name in log.attributes.case.keys() {
                record.push(trace.case_attrs.get(name).map(format_value).unwrap_or_default());
            }
            record.push(match trace.outcome {
                Some(true) => "1".into(),
                Some(false) => "0".into(),
                None => String::new(),
            });
            match &event.derived {
                Some(d) => {
                    record.extend([
                        d.hour.to_string(),
                        d.weekday.to_string(),
                        d.month.to_string(),
                        d.elapsed.to_string(),
                        d.delta.to_string(),
                        d.event_nr.to_string(),
                        d.open_cases.to_string(),
                    ]);
                }
                None => record.extend(std::iter::repeat_n(String::new(), DerivedFeatures::COLUMNS.len())),
            }
            for name in log.attributes.event.keys() {
                let present = event
                    .present
                    .get(name)
                    .copied()
                    .unwrap_or_else(|| event.payload.get(name).is_some_and(|v| !v.is_absent()));
                record.push(if present { "1" } else { "0" }.to_owned());
            }
            out.write_record(&record)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_log::{derive_features, fill_and_flag_missing};

    fn schema() -> LogSchema {
        LogSchema::new("case", "activity", "ts")
    }

    #[test]
    fn groups_three_rows_into_one_trace() {
        let csv = "case,activity,ts\nc1,A,2020-01-01T10:00:00\nc1,B,2020-01-01T10:01:00\nc1,C,2020-01-01T10:02:00\n";
        let log = read_csv_log_from_reader(csv.as_bytes(), &schema()).unwrap();
        assert_eq!(log.traces.len(), 1);
        let acts: Vec<_> = log.traces[0].events.iter().map(|e| e.activity.as_str()).collect();
        assert_eq!(acts, ["A", "B", "C"]);
    }

    #[test]
    fn shuffled_rows_are_sorted_by_time() {
        let csv = "case,activity,ts\nc1,C,2020-01-01 10:02:00\nc1,A,2020-01-01 10:00:00\nc1,B,2020-01-01 10:01:00.5\n";
        let log = read_csv_log_from_reader(csv.as_bytes(), &schema()).unwrap();
        let acts: Vec<_> = log.traces[0].events.iter().map(|e| e.activity.as_str()).collect();
        assert_eq!(acts, ["A", "B", "C"]);
    }

    #[test]
    fn timestamp_ties_keep_file_order() {
        let csv = "case,activity,ts\nc1,X,2020-01-01T10:00:00\nc1,Y,2020-01-01T10:00:00\n";
        let log = read_csv_log_from_reader(csv.as_bytes(), &schema()).unwrap();
        let acts: Vec<_> = log.traces[0].events.iter().map(|e| e.activity.as_str()).collect();
        assert_eq!(acts, ["X", "Y"]);
    }

    #[test]
    fn numeric_parse_failure_is_absent() {
        let csv = "case,activity,ts,amount\nc1,A,2020-01-01T10:00:00,n/a\nc1,A,2020-01-01T10:00:01,2.5\n";
        let schema = schema().with_event_attr("amount", AttrKind::Numeric);
        let log = read_csv_log_from_reader(csv.as_bytes(), &schema).unwrap();
        assert_eq!(log.traces[0].events[0].payload["amount"], Value::Absent);
        assert_eq!(log.traces[0].events[1].payload["amount"], Value::Numeric(2.5));
    }

    #[test]
    fn missing_column_names_it() {
        let csv = "case,activity\nc1,A\n";
        let err = read_csv_log_from_reader(csv.as_bytes(), &schema()).unwrap_err();
        assert!(err.to_string().contains("`ts`"), "{err}");
    }

    #[test]
    fn bad_timestamp_reports_row() {
        let csv = "case,activity,ts\nc1,A,2020-01-01T10:00:00\nc1,B,yesterday\n";
        match read_csv_log_from_reader(csv.as_bytes(), &schema()) {
            Err(Error::Row { row, .. }) => assert_eq!(row, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_empty_log() {
        assert!(matches!(read_csv_log_from_reader("".as_bytes(), &schema()), Err(Error::EmptyLog)));
        assert!(matches!(
            read_csv_log_from_reader("case,activity,ts\n".as_bytes(), &schema()),
            Err(Error::EmptyLog)
        ));
    }

    #[test]
    fn preprocessed_round_trip() {
        let csv = "case,activity,ts,amount,res,kind\n\
                   c1,A,2020-01-01T10:00:00.25,1.5,bob,x\n\
                   c1,B,2020-01-01T10:03:00,,,x\n\
                   c2,A,2020-01-02T08:00:00,0.1,eve,y\n";
        let schema = schema()
            .with_event_attr("amount", AttrKind::Numeric)
            .with_event_attr("res", AttrKind::Categorical)
            .with_case_attr("kind", AttrKind::Categorical);
        let mut log = read_csv_log_from_reader(csv.as_bytes(), &schema).unwrap();
        log.traces[0].outcome = Some(true);
        log.traces[1].outcome = Some(false);
        let log = fill_and_flag_missing(&derive_features(&log));
        let mut buf = Vec::new();
        write_preprocessed_csv(&log, &schema, &mut buf).unwrap();
        let back = read_preprocessed_csv(buf.as_slice(), &schema).unwrap();
        assert_eq!(back, log);
        let mut again = Vec::new();
        write_preprocessed_csv(&back, &schema, &mut again).unwrap();
        assert_eq!(buf, again);
    }
}
