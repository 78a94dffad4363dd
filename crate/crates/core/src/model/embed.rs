//! Single-line iframe embed snippets.

use std::fmt;

use thiserror::Error;

use super::MicroSimRecord;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbedError {
    #[error("record declares neither technical.canvasHeight nor drawHeight + controlHeight")]
    MissingHeight,
    #[error("record has no title")]
    MissingTitle,
    #[error("title contains control character U+{0:04X}")]
    UnescapableTitle(u32),
    #[error("`{0}` is not an absolute or root-relative URL")]
    InvalidSource(String),
    #[error("width must be a positive pixel count or 100%")]
    InvalidWidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmbedWidth {
    #[default]
    Full,
    Pixels(u32),
}

impl EmbedWidth {
    /// Accepts `100%` or a positive integer (optionally suffixed `px`).
    pub fn parse(text: &str) -> Result<Self, EmbedError> {
        let text = text.trim();
        if text == "100%" {
            return Ok(EmbedWidth::Full);
        }
        let digits = text.strip_suffix("px").unwrap_or(text);
        match digits.parse::<u32>() {
            Ok(px) if px > 0 => Ok(EmbedWidth::Pixels(px)),
            _ => Err(EmbedError::InvalidWidth),
        }
    }
}

impl fmt::Display for EmbedWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbedWidth::Full => f.write_str("100%"),
            EmbedWidth::Pixels(px) => write!(f, "{px}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EmbedOptions {
    pub width: EmbedWidth,
    /// Adds `allow-same-origin` to the sandbox, needed for analytics postbacks.
    pub allow_same_origin: bool,
}

/// Escapes `& < > " '` for use in HTML text and double-quoted attributes.
pub fn escape_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(ch),
        }
    }
    out
}

fn check_source(src: &str) -> Result<(), EmbedError> {
    let bad = || EmbedError::InvalidSource(src.to_string());
    if src.chars().any(|c| c.is_whitespace() || c.is_control() || matches!(c, '"' | '<' | '>')) {
        return Err(bad());
    }
    if src.starts_with('/') && !src.starts_with("//") {
        return Ok(());
    }
    let (scheme, rest) = src.split_once("://").ok_or_else(bad)?;
    let scheme_ok = scheme
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic())
        && scheme
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    if !scheme_ok || rest.is_empty() || rest.starts_with('/') {
        return Err(bad());
    }
    Ok(())
}

/// Renders the one-line iframe for `record` served from `src`.
///
/// Attribute order is fixed: `src width height sandbox loading title`.
pub fn generate_embed(
    record: &MicroSimRecord,
    src: &str,
    options: EmbedOptions,
) -> Result<String, EmbedError> {
    check_source(src)?;
    let height = record
        .technical
        .as_ref()
        .and_then(|t| t.effective_canvas_height())
        .ok_or(EmbedError::MissingHeight)?;
    let title = record.title().ok_or(EmbedError::MissingTitle)?;
    if let Some(c) = title.chars().find(|c| c.is_control()) {
        return Err(EmbedError::UnescapableTitle(c as u32));
    }
    let sandbox = if options.allow_same_origin {
        "allow-scripts allow-same-origin"
    } else {
        "allow-scripts"
    };
    Ok(format!(
        r#"<iframe src="{}" width="{}" height="{}" sandbox="{}" loading="lazy" title="{}"></iframe>"#,
        escape_html(src),
        options.width,
        height,
        sandbox,
        escape_html(title),
    ))
}
