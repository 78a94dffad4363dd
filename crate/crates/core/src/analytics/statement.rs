//! Interaction statements and their validation against a record.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{EventType, MicroSimRecord, RecordId};

/// One learner interaction, xAPI-shaped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalyticsStatement {
    pub actor: String,
    pub verb: EventType,
    pub object_sim_id: RecordId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_ref: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prev_value: Option<f64>,
    /// UTC milliseconds since the epoch.
    pub timestamp: u64,
    pub session_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StatementCode {
    UnknownVerb,
    UnknownControl,
    ValueOutOfRange,
    MissingRequiredField,
    Malformed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementFinding {
    pub code: StatementCode,
    pub path: String,
    pub message: String,
}

impl StatementFinding {
    fn new(code: StatementCode, path: &str, message: impl Into<String>) -> Self {
        Self {
            code,
            path: path.to_string(),
            message: message.into(),
        }
    }
}

/// Checks a statement document against the record it reports on.
///
/// All problems are collected; the typed statement is returned only when
/// there are none.
pub fn validate_statement(document: &str, record: &MicroSimRecord) -> Result<AnalyticsStatement, Vec<StatementFinding>> {
    use StatementCode::*;
    let value: Value = serde_json::from_str(document)
        .map_err(|e| vec![StatementFinding::new(Malformed, "", format!("not JSON: {e}"))])?;
    let Some(obj) = value.as_object() else {
        return Err(vec![StatementFinding::new(Malformed, "", "statement must be a JSON object")]);
    };
    let mut findings = Vec::new();

    let text = |field: &str, findings: &mut Vec<StatementFinding>| -> Option<String> {
        match obj.get(field) {
            None | Some(Value::Null) => {
                findings.push(StatementFinding::new(MissingRequiredField, "", format!("`{field}` is required")));
                None
            }
            Some(Value::String(s)) if !s.trim().is_empty() => Some(s.clone()),
            Some(_) => {
                findings.push(StatementFinding::new(Malformed, &format!("/{field}"), format!("`{field}` must be a non-empty string")));
                None
            }
        }
    };
    let actor = text("actor", &mut findings);
    let session_id = text("sessionId", &mut findings);
    let verb_text = text("verb", &mut findings);
    let sim_text = text("objectSimId", &mut findings);

    let verb = verb_text.and_then(|v| match EventType::parse_ci(&v) {
        Some(verb) if verb.as_str() == v => Some(verb),
        _ => {
            findings.push(StatementFinding::new(
                UnknownVerb,
                "/verb",
                format!("`{v}` is not one of {}", EventType::expected()),
            ));
            None
        }
    });
    let object_sim_id = sim_text.and_then(|s| match RecordId::parse(&s) {
        Ok(id) => Some(id),
        Err(e) => {
            findings.push(StatementFinding::new(Malformed, "/objectSimId", e.to_string()));
            None
        }
    });

    let timestamp = match obj.get("timestamp") {
        None | Some(Value::Null) => {
            findings.push(StatementFinding::new(MissingRequiredField, "", "`timestamp` is required"));
            None
        }
        Some(v) => match v.as_u64().filter(|t| *t > 0) {
            Some(t) => Some(t),
            None => {
                findings.push(StatementFinding::new(Malformed, "/timestamp", "`timestamp` must be a positive integer (UTC milliseconds)"));
                None
            }
        },
    };

    let number = |field: &str, findings: &mut Vec<StatementFinding>| -> Option<f64> {
        match obj.get(field) {
            None | Some(Value::Null) => None,
            Some(v) => match v.as_f64() {
                Some(n) => Some(n),
                None => {
                    findings.push(StatementFinding::new(Malformed, &format!("/{field}"), format!("`{field}` must be a number")));
                    None
                }
            },
        }
    };
    let result_value = number("resultValue", &mut findings);
    let prev_value = number("prevValue", &mut findings);

    let control_ref = match obj.get("controlRef") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => {
            findings.push(StatementFinding::new(Malformed, "/controlRef", "`controlRef` must be a string"));
            None
        }
    };
    if verb == Some(EventType::Interaction) && !obj.contains_key("controlRef") {
        findings.push(StatementFinding::new(MissingRequiredField, "", "`controlRef` is required for interaction statements"));
    }
    if let Some(name) = &control_ref {
        match record.control(name) {
            None => findings.push(StatementFinding::new(
                UnknownControl,
                "/controlRef",
                format!("record declares no control named `{name}`"),
            )),
            Some(control) => {
                if let Some((min, max)) = control.slider_range() {
                    for (field, v) in [("resultValue", result_value), ("prevValue", prev_value)] {
                        if let Some(v) = v.filter(|v| *v < min || *v > max) {
                            findings.push(StatementFinding::new(
                                ValueOutOfRange,
                                &format!("/{field}"),
                                format!("{v} is outside slider `{name}` range [{min}, {max}]"),
                            ));
                        }
                    }
                }
            }
        }
    }

    if !findings.is_empty() {
        return Err(findings);
    }
    Ok(AnalyticsStatement {
        actor: actor.unwrap_or_default(),
        verb: verb.expect("verb checked"),
        object_sim_id: object_sim_id.expect("id checked"),
        control_ref,
        result_value,
        prev_value,
        timestamp: timestamp.expect("timestamp checked"),
        session_id: session_id.unwrap_or_default(),
    })
}
