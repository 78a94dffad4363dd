//! Transport-neutral request handlers shared by the HTTP service and the CLI.
//!
//! Every body is complete JSON (or HTML for embeds) followed by one newline,
//! so a CLI command prints exactly what the matching endpoint returns.

use serde::Serialize;
use serde_json::{json, Value};

use super::store::{check_relative, split_envelope, IngestOutcome, Registry, RegistryError};
use crate::analytics::{session_summaries, summarize_sim, validate_statement, AnalyticsError, SessionSummary, SimSummary};
use crate::catalog::FacetQuery;
use crate::model::{generate_embed, EmbedError, EmbedOptions, EmbedWidth, MicroSimRecord, RecordId};

pub const JSON: &str = "application/json";
pub const HTML: &str = "text/html; charset=utf-8";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiResponse {
    pub status: u16,
    pub content_type: &'static str,
    pub body: Vec<u8>,
}

impl ApiResponse {
    pub fn json<T: Serialize + ?Sized>(status: u16, value: &T) -> Self {
        let mut body = serde_json::to_vec_pretty(value).expect("response serializes");
        body.push(b'\n');
        Self {
            status,
            content_type: JSON,
            body,
        }
    }

    pub fn error(status: u16, code: &str, message: impl Into<String>) -> Self {
        Self::json(status, &json!({"error": code, "message": message.into()}))
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::error(400, "bad-request", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::error(404, "not-found", message)
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        log::error!("{e}");
        Self::error(500, "storage-io", e.to_string())
    }

    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }

    pub fn text(&self) -> &str {
        std::str::from_utf8(&self.body).unwrap_or("")
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct AnalyticsReport<'a> {
    summary: &'a SimSummary,
    sessions: Vec<&'a SessionSummary>,
}

/// Query parameters as `(key, value)` pairs.
fn params(query: &str) -> Vec<(String, String)> {
    form_urlencoded::parse(query.trim_start_matches('?').as_bytes())
        .into_owned()
        .collect()
}

fn flag(value: &str) -> Option<bool> {
    match value {
        "" | "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

impl Registry {
    fn lookup(&self, id: &str) -> Result<(RecordId, MicroSimRecord), ApiResponse> {
        let id = RecordId::parse(id).map_err(|e| ApiResponse::bad_request(e.to_string()))?;
        match self.record(&id) {
            Some(record) => Ok((id, record)),
            None => Err(ApiResponse::not_found(format!("no record with id `{id}`"))),
        }
    }

    /// `POST /records`
    pub fn api_ingest(&self, body: &[u8]) -> ApiResponse {
        let (record, sources) = split_envelope(body);
        match self.ingest(&record, sources.as_ref()) {
            Ok(outcome) => ingest_response(&outcome),
            Err(RegistryError::SourcePath(path)) => ApiResponse::bad_request(format!("invalid source path `{path}`")),
            Err(e) => ApiResponse::internal(e),
        }
    }

    /// `GET /records/{id}`
    pub fn api_record(&self, id: &str) -> ApiResponse {
        match self.lookup(id) {
            Ok((_, record)) => ApiResponse::json(200, &record),
            Err(response) => response,
        }
    }

    /// `GET /records/{id}/embed?width=&sameOrigin=`
    pub fn api_embed(&self, id: &str, query: &str) -> ApiResponse {
        let (id, record) = match self.lookup(id) {
            Ok(found) => found,
            Err(response) => return response,
        };
        let mut options = EmbedOptions::default();
        for (key, value) in params(query) {
            match key.as_str() {
                "width" => match EmbedWidth::parse(&value) {
                    Ok(width) => options.width = width,
                    Err(e) => return ApiResponse::bad_request(e.to_string()),
                },
                "sameOrigin" => match flag(&value) {
                    Some(b) => options.allow_same_origin = b,
                    None => return ApiResponse::bad_request(format!("sameOrigin must be true or false, got `{value}`")),
                },
                other => return ApiResponse::bad_request(format!("unknown parameter `{other}`")),
            }
        }
        match generate_embed(&record, &format!("/sims/{id}/main.html"), options) {
            Ok(snippet) => ApiResponse {
                status: 200,
                content_type: HTML,
                body: format!("{snippet}\n").into_bytes(),
            },
            Err(e @ EmbedError::InvalidWidth) => ApiResponse::bad_request(e.to_string()),
            Err(e) => ApiResponse::error(422, "unprocessable", e.to_string()),
        }
    }

    /// `GET /records/{id}/lint`
    pub fn api_lint(&self, id: &str) -> ApiResponse {
        let (id, _) = match self.lookup(id) {
            Ok(found) => found,
            Err(response) => return response,
        };
        match self.lint_record(&id) {
            Ok(Some(report)) => ApiResponse::json(200, &report),
            Ok(None) => ApiResponse::not_found(format!("no sources stored for `{id}`")),
            Err(e) => ApiResponse::internal(e),
        }
    }

    /// `GET /search?...`
    pub fn api_search(&self, query: &str) -> ApiResponse {
        let query = match FacetQuery::from_query_string(query.trim_start_matches('?')) {
            Ok(q) => q,
            Err(e) => return ApiResponse::bad_request(e.to_string()),
        };
        match self.index().search(&query) {
            Ok(result) => ApiResponse::json(200, &result),
            Err(e) => ApiResponse::bad_request(e.to_string()),
        }
    }

    /// `GET /facets`
    pub fn api_facets(&self) -> ApiResponse {
        ApiResponse::json(200, &self.index().list_facets())
    }

    /// `POST /events`
    pub fn api_event(&self, body: &[u8]) -> ApiResponse {
        let Ok(text) = std::str::from_utf8(body) else {
            return ApiResponse::bad_request("statement is not UTF-8");
        };
        let sim = serde_json::from_str::<Value>(text)
            .ok()
            .and_then(|v| v.get("objectSimId")?.as_str().map(str::to_string))
            .and_then(|s| RecordId::parse(&s).ok());
        let record = match &sim {
            Some(id) => match self.record(id) {
                Some(record) => record,
                None => return ApiResponse::not_found(format!("no record with id `{id}`")),
            },
            // Let the validator describe what is wrong with the document.
            None => MicroSimRecord::default(),
        };
        let statement = match validate_statement(text, &record) {
            Ok(s) => s,
            Err(findings) => return ApiResponse::json(422, &json!({"findings": findings})),
        };
        match self.events().append(&statement) {
            Ok(seq) => ApiResponse::json(201, &json!({"seq": seq, "simId": statement.object_sim_id})),
            Err(e) => ApiResponse::internal(e),
        }
    }

    /// `GET /records/{id}/analytics/summary`
    pub fn api_analytics(&self, id: &str) -> ApiResponse {
        let (id, record) = match self.lookup(id) {
            Ok(found) => found,
            Err(response) => return response,
        };
        let summary = match summarize_sim(self.events(), &id, &record.ui) {
            Ok(s) => s,
            Err(AnalyticsError::UnknownSim(_)) => return ApiResponse::not_found(format!("no statements recorded for `{id}`")),
            Err(e) => return ApiResponse::internal(e),
        };
        let statements = match self.events().read(&id) {
            Ok(s) => s,
            Err(e) => return ApiResponse::internal(e),
        };
        match session_summaries(&statements, &record.ui) {
            Ok(sessions) => ApiResponse::json(
                200,
                &AnalyticsReport {
                    summary: &summary,
                    sessions: sessions.values().collect(),
                },
            ),
            Err(e) => ApiResponse::internal(e),
        }
    }

    /// `GET /healthz`
    pub fn api_health(&self) -> ApiResponse {
        let index = self.index();
        ApiResponse::json(
            200,
            &json!({"status": "ok", "records": index.len(), "generation": index.generation()}),
        )
    }

    /// `GET /sims/{id}/{path}`: files from the record's stored sources.
    pub fn api_static(&self, id: &str, path: &str) -> ApiResponse {
        let Ok(id) = RecordId::parse(id) else {
            return ApiResponse::bad_request(format!("invalid record id `{id}`"));
        };
        if check_relative(path).is_err() {
            return ApiResponse::bad_request(format!("invalid path `{path}`"));
        }
        let file = self.layout().sources_dir(&id).join(path);
        match std::fs::read(&file) {
            Ok(body) => ApiResponse {
                status: 200,
                content_type: content_type(path),
                body,
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => ApiResponse::not_found(format!("no file `{path}` for `{id}`")),
            Err(e) => ApiResponse::internal(e),
        }
    }
}

pub fn ingest_response(outcome: &IngestOutcome) -> ApiResponse {
    ApiResponse::json(outcome.status.http_status(), outcome)
}

fn content_type(path: &str) -> &'static str {
    let ext = path.rsplit('.').next().unwrap_or("").to_ascii_lowercase();
    match ext.as_str() {
        "html" | "htm" => HTML,
        "js" | "mjs" => "text/javascript; charset=utf-8",
        "css" => "text/css; charset=utf-8",
        "json" => JSON,
        "svg" => "image/svg+xml",
        "png" => "image/png",
        "jpg" | "jpeg" => "image/jpeg",
        "gif" => "image/gif",
        "txt" | "md" => "text/plain; charset=utf-8",
        _ => "application/octet-stream",
    }
}
