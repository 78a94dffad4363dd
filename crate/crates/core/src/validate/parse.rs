use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::model::MicroSimRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParseErrorKind {
    MalformedDocument,
    WrongRootType,
}

/// A document that could not be read as a record.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{message} (byte {offset})")]
pub struct ParseFailure {
    pub kind: ParseErrorKind,
    /// Byte offset into the input where reading stopped.
    pub offset: usize,
    pub message: String,
}

/// Reads a UTF-8 JSON document into a typed record.
///
/// Unknown members are kept in the `extensions` bag of their section.
/// Values of the wrong JSON type (a string where a number belongs, say) are
/// malformed documents; values outside an enumeration are not, they surface
/// later as validation findings.
pub fn parse_record(bytes: &[u8]) -> Result<MicroSimRecord, ParseFailure> {
    let text = std::str::from_utf8(bytes).map_err(|e| ParseFailure {
        kind: ParseErrorKind::MalformedDocument,
        offset: e.valid_up_to(),
        message: "invalid UTF-8".into(),
    })?;
    let value: Value = serde_json::from_str(text).map_err(|e| malformed(text, &e))?;
    if !value.is_object() {
        let start = text.len() - text.trim_start().len();
        return Err(ParseFailure {
            kind: ParseErrorKind::WrongRootType,
            offset: start,
            message: format!("document root must be an object, found {}", json_type(&value)),
        });
    }
    serde_json::from_str(text).map_err(|e| malformed(text, &e))
}

fn malformed(text: &str, err: &serde_json::Error) -> ParseFailure {
    ParseFailure {
        kind: ParseErrorKind::MalformedDocument,
        offset: byte_offset(text, err.line(), err.column()),
        message: err.to_string(),
    }
}

// serde_json reports 1-based lines and byte columns.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

fn json_type(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}
