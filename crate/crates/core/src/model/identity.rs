//! Record identity: title slug plus a digest of the canonical record bytes.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::MicroSimRecord;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdentityError {
    #[error("record has no title to derive an id from")]
    EmptyTitle,
    #[error("`{0}` is not a valid record id")]
    InvalidId(String),
}

/// A derived record id such as `bouncing-ball-3f9a0c12`.
///
/// Ids are lowercase ASCII letters, digits and single hyphens, so they are
/// safe to use as file stems and URL path segments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RecordId(String);

impl RecordId {
    pub fn parse(text: &str) -> Result<Self, IdentityError> {
        let ok = !text.is_empty()
            && text.len() <= 200
            && !text.starts_with('-')
            && !text.ends_with('-')
            && !text.contains("--")
            && text
                .bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-');
        if ok {
            Ok(Self(text.to_string()))
        } else {
            Err(IdentityError::InvalidId(text.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for RecordId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Lowercases and collapses every run of non-alphanumeric characters into a
/// single hyphen, trimming hyphens at both ends.
pub fn slugify(title: &str) -> String {
    let mut slug = String::with_capacity(title.len());
    let mut pending_hyphen = false;
    for ch in title.chars() {
        if ch.is_ascii_alphanumeric() {
            if pending_hyphen && !slug.is_empty() {
                slug.push('-');
            }
            pending_hyphen = false;
            slug.push(ch.to_ascii_lowercase());
        } else {
            pending_hyphen = true;
        }
    }
    slug
}

/// Compact JSON with object keys sorted bytewise and integral floats written
/// as integers, so equal documents always produce equal bytes.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_canonical(value, &mut out);
    out
}

fn write_canonical(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&canonical_number(n)),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("key serializes"));
                out.push(':');
                write_canonical(&map[key], out);
            }
            out.push('}');
        }
    }
}

fn canonical_number(n: &Number) -> String {
    if n.is_f64() {
        let f = n.as_f64().expect("f64 number");
        if f.fract() == 0.0 && f.abs() < 9.0e15 {
            return format!("{}", f as i64);
        }
    }
    n.to_string()
}

/// The bytes a record id is digested from: the canonical JSON of the record
/// with `dublinCore.identifier` removed, since that field holds the id itself.
pub fn canonical_bytes(record: &MicroSimRecord) -> Vec<u8> {
    let mut value = serde_json::to_value(record).expect("record serializes");
    if let Some(Value::Object(dc)) = value.get_mut("dublinCore") {
        dc.remove("identifier");
    }
    canonical_json(&value).into_bytes()
}

/// `slug(title) + "-" + first 8 hex digits of SHA-256(canonical bytes)`.
///
/// A title without any ASCII alphanumerics uses the slug `microsim`.
pub fn derive_record_id(record: &MicroSimRecord) -> Result<RecordId, IdentityError> {
    let title = record.title().map(str::trim).unwrap_or_default();
    if title.is_empty() {
        return Err(IdentityError::EmptyTitle);
    }
    let mut slug = slugify(title);
    if slug.is_empty() {
        slug.push_str("microsim");
    }
    let digest = Sha256::digest(canonical_bytes(record));
    let hex: String = digest[..4].iter().map(|b| format!("{b:02x}")).collect();
    Ok(RecordId(format!("{slug}-{hex}")))
}
