use serde::{Deserialize, Serialize};

use super::{EventLog, Trace, Value};
use crate::{Error, Result};

/// Condition that marks a case as positive (before `negate`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LabelCondition {
    /// An event (or the case) carries `attribute == value`.
    AttributeEquals { attribute: String, value: String },
    /// An event (or the case) carries a numeric `attribute > threshold`.
    AttributeAbove { attribute: String, threshold: f64 },
    /// An event (or the case) carries a non-absent `attribute`.
    AttributeExists { attribute: String },
    /// Some event has the given activity.
    EventOccurs { activity: String },
    /// A case attribute already holds the label: nonzero numbers and the
    /// strings `1`, `true`, `yes`, `positive`, `deviant` are positive. The
    /// column is removed from the labeled log so it never becomes a feature.
    ExternalColumn { attribute: String },
}

/// Declarative outcome definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelingRule {
    #[serde(flatten)]
    pub condition: LabelCondition,
    /// Positive when the condition does NOT hold.
    #[serde(default)]
    pub negate: bool,
    /// Truncate each trace immediately before its first event satisfying the
    /// condition.
    #[serde(default)]
    pub cut: bool,
}

impl LabelingRule {
    pub fn new(condition: LabelCondition) -> Self {
        LabelingRule {
            condition,
            negate: false,
            cut: false,
        }
    }

    pub fn negated(mut self) -> Self {
        self.negate = true;
        self
    }

    pub fn with_cut(mut self) -> Self {
        self.cut = true;
        self
    }
}

enum Scope {
    Event,
    Case,
}

fn scope_of(log: &EventLog, attribute: &str) -> Result<Scope> {
    if log.attributes.event.contains_key(attribute) {
        Ok(Scope::Event)
    } else if log.attributes.case.contains_key(attribute) {
        Ok(Scope::Case)
    } else {
        Err(Error::Rule(format!("unknown attribute `{attribute}`")))
    }
}

fn truthy(value: &Value) -> bool {
    match value {
        Value::Numeric(v) => *v != 0.0,
        Value::Categorical(s) => matches!(
            s.trim().to_ascii_lowercase().as_str(),
            "1" | "true" | "yes" | "positive" | "deviant"
        ),
        Value::Absent => false,
    }
}

fn value_matches(condition: &LabelCondition, value: Option<&Value>) -> bool {
    let Some(value) = value else { return false };
    match condition {
        LabelCondition::AttributeEquals { value: expected, .. } => match value {
            Value::Categorical(s) => s == expected,
            Value::Numeric(v) => expected.parse::<f64>().is_ok_and(|e| e == *v),
            Value::Absent => false,
        },
        LabelCondition::AttributeAbove { threshold, .. } => value.as_f64().is_some_and(|v| v > *threshold),
        LabelCondition::AttributeExists { .. } => !value.is_absent(),
        LabelCondition::ExternalColumn { .. } => truthy(value),
        LabelCondition::EventOccurs { .. } => false,
    }
}

/// Index of the first label-defining event, or `Some(None)` for a case-level
/// match, or `None` when the condition does not hold.
fn first_match(condition: &LabelCondition, scope: Option<&Scope>, trace: &Trace) -> Option<Option<usize>> {
    match (condition, scope) {
        (LabelCondition::EventOccurs { activity }, _) => {
            trace.events.iter().position(|e| &e.activity == activity).map(Some)
        }
        (LabelCondition::ExternalColumn { attribute }, _) => {
            value_matches(condition, trace.case_attrs.get(attribute)).then_some(None)
        }
        (c, Some(Scope::Case)) => value_matches(c, trace.case_attrs.get(attribute_of(c))).then_some(None),
        (c, _) => trace
            .events
            .iter()
            .position(|e| value_matches(c, e.payload.get(attribute_of(c))))
            .map(Some),
    }
}

fn attribute_of(condition: &LabelCondition) -> &str {
    match condition {
        LabelCondition::AttributeEquals { attribute, .. }
        | LabelCondition::AttributeAbove { attribute, .. }
        | LabelCondition::AttributeExists { attribute }
        | LabelCondition::ExternalColumn { attribute } => attribute,
        LabelCondition::EventOccurs { activity } => activity,
    }
}

/// Labels every trace and optionally cuts it before the label-defining
/// event. Traces left empty by the cut are dropped.
pub fn apply_labeling(log: &EventLog, rule: &LabelingRule) -> Result<EventLog> {
    let scope = match &rule.condition {
        LabelCondition::EventOccurs { .. } => None,
        LabelCondition::ExternalColumn { attribute } => {
            if !log.attributes.case.contains_key(attribute) {
                return Err(Error::Rule(format!(
                    "external label column `{attribute}` must be a case attribute"
                )));
            }
            Some(Scope::Case)
        }
        c => Some(scope_of(log, attribute_of(c))?),
    };

    let mut out = EventLog::new(log.attributes.clone(), Vec::with_capacity(log.traces.len()));
    let mut dropped = 0usize;
    for trace in &log.traces {
        let mut labeled = trace.clone();
        let hit = first_match(&rule.condition, scope.as_ref(), trace);
        labeled.outcome = Some(hit.is_some() != rule.negate);
        if rule.cut {
            if let Some(Some(index)) = hit {
                labeled.events.truncate(index);
            }
        }
        if labeled.is_empty() {
            dropped += 1;
        } else {
            out.traces.push(labeled);
        }
    }
    if dropped > 0 {
        log::info!("labeling cut left {dropped} traces empty; they were dropped");
    }
    if let LabelCondition::ExternalColumn { attribute } = &rule.condition {
        out.attributes.case.remove(attribute);
        for trace in &mut out.traces {
            trace.case_attrs.remove(attribute);
        }
    }
    Ok(out)
}
