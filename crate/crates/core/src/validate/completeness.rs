//! Documentation-completeness scoring against the recommended-field checklist.
//!
//! The checklist is data (`checklist.json`): a list of sections, each with
//! JSON-pointer-like field paths. A `*` segment matches every element of an
//! array and the field counts as populated when any element has it.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::MicroSimRecord;

const DEFAULT_CHECKLIST: &str = include_str!("checklist.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChecklistSection {
    pub name: String,
    pub fields: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checklist {
    pub sections: Vec<ChecklistSection>,
}

impl Default for Checklist {
    fn default() -> Self {
        serde_json::from_str(DEFAULT_CHECKLIST).expect("bundled checklist parses")
    }
}

impl Checklist {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Fraction of populated fields per section, in checklist order.
    pub fn section_scores(&self, record: &MicroSimRecord) -> Vec<(String, f64)> {
        let doc = serde_json::to_value(record).expect("record serializes");
        self.sections
            .iter()
            .map(|section| {
                let score = if section.fields.is_empty() {
                    0.0
                } else {
                    let populated = section
                        .fields
                        .iter()
                        .filter(|path| is_populated_at(&doc, path))
                        .count();
                    populated as f64 / section.fields.len() as f64
                };
                (section.name.clone(), score)
            })
            .collect()
    }

    /// Mean of the section scores; 0 for an empty checklist.
    pub fn score(&self, record: &MicroSimRecord) -> f64 {
        let scores = self.section_scores(record);
        if scores.is_empty() {
            return 0.0;
        }
        scores.iter().map(|(_, s)| s).sum::<f64>() / scores.len() as f64
    }
}

fn is_populated(value: &Value) -> bool {
    match value {
        Value::Null => false,
        Value::String(s) => !s.trim().is_empty(),
        Value::Array(items) => !items.is_empty(),
        Value::Object(map) => !map.is_empty(),
        Value::Bool(_) | Value::Number(_) => true,
    }
}

fn is_populated_at(doc: &Value, path: &str) -> bool {
    let segments: Vec<&str> = path.split('/').skip(1).collect();
    walk(doc, &segments)
}

fn walk(node: &Value, segments: &[&str]) -> bool {
    let Some((head, rest)) = segments.split_first() else {
        return is_populated(node);
    };
    match (*head, node) {
        ("*", Value::Array(items)) => items.iter().any(|item| walk(item, rest)),
        (key, Value::Object(map)) => map.get(key).is_some_and(|child| walk(child, rest)),
        (index, Value::Array(items)) => index
            .parse::<usize>()
            .ok()
            .and_then(|i| items.get(i))
            .is_some_and(|child| walk(child, rest)),
        _ => false,
    }
}

/// Completeness under the bundled checklist.
pub fn completeness_score(record: &MicroSimRecord) -> f64 {
    Checklist::default().score(record)
}
