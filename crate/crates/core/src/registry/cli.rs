//! Command-line front end.
//!
//! Commands that have an HTTP counterpart print that endpoint's body
//! unchanged.

use std::collections::BTreeMap;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use super::api::{ingest_response, ApiResponse};
use super::store::{io_error, IngestStatus, Registry, RegistryError, RegistryOptions, SourceFiles};
use crate::lint::{lint_bundle, LintConfig, LintError};
use crate::model::Vocabulary;
use crate::validate::{parse_record, Validator};

#[derive(Debug, Parser)]
#[command(name = "microsim", version, about = "MicroSim metadata registry")]
struct Cli {
    /// Registry root directory.
    #[arg(long, global = true, env = "MICROSIM_ROOT", default_value = ".")]
    root: PathBuf,
    /// Lint configuration (defaults to `<root>/lint.json` when present).
    #[arg(long, global = true, env = "MICROSIM_LINT_CONFIG")]
    lint_config: Option<PathBuf>,
    /// Subject vocabulary (defaults to `<root>/vocab.json` when present).
    #[arg(long, global = true, env = "MICROSIM_VOCAB")]
    vocab: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a metadata record.
    Validate { file: PathBuf },
    /// Lint a simulation source directory.
    Lint { dir: PathBuf },
    /// Ingest every `*.json` record in a directory into the registry.
    ///
    /// A sibling directory named after the file stem is attached as sources.
    Index { dir: PathBuf },
    /// Search the catalog with a URL query string.
    Search {
        #[arg(default_value = "")]
        query: String,
    },
    /// Print the iframe snippet for a record.
    Embed {
        id: String,
        #[arg(long)]
        width: Option<String>,
        #[arg(long)]
        same_origin: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "MICROSIM_HOST", default_value = "127.0.0.1")]
        host: String,
        #[arg(long, env = "MICROSIM_PORT", default_value_t = 8080)]
        port: u16,
    },
    /// Engagement summary for a record.
    Stats { id: String },
}

/// Everything one invocation writes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

impl CliOutput {
    fn out(code: i32, stdout: impl Into<Vec<u8>>) -> Self {
        Self {
            code,
            stdout: stdout.into(),
            stderr: Vec::new(),
        }
    }

    fn fail(code: i32, message: impl std::fmt::Display) -> Self {
        Self {
            code,
            stdout: Vec::new(),
            stderr: format!("error: {message}\n").into_bytes(),
        }
    }

    fn api(response: ApiResponse) -> Self {
        Self::out(exit_code(response.status), response.body)
    }
}

/// 0 success, 1 rejected or findings, 2 malformed input, missing or io.
pub fn exit_code(status: u16) -> i32 {
    match status {
        200..=299 => 0,
        409 | 422 => 1,
        _ => 2,
    }
}

fn json_line<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut body = serde_json::to_vec_pretty(value).expect("output serializes");
    body.push(b'\n');
    body
}

/// Runs one command, capturing its output.
pub fn execute<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliOutput::out(0, text),
                _ => CliOutput {
                    code: 2,
                    stdout: Vec::new(),
                    stderr: text.into_bytes(),
                },
            };
        }
    };
    let options = RegistryOptions {
        lint_config: cli.lint_config.clone(),
        vocab: cli.vocab.clone(),
    };
    match cli.command {
        Command::Validate { file } => validate(&file, cli.vocab.as_deref()),
        Command::Lint { dir } => lint(&dir, cli.lint_config.as_deref()),
        Command::Index { dir } => with_registry(&cli.root, options, |reg| index(reg, &dir)),
        Command::Search { query } => with_registry(&cli.root, options, |reg| Ok(CliOutput::api(reg.api_search(&query)))),
        Command::Embed { id, width, same_origin } => with_registry(&cli.root, options, |reg| {
            let mut query = form_urlencoded::Serializer::new(String::new());
            if let Some(w) = &width {
                query.append_pair("width", w);
            }
            if same_origin {
                query.append_pair("sameOrigin", "true");
            }
            Ok(CliOutput::api(reg.api_embed(&id, &query.finish())))
        }),
        Command::Stats { id } => with_registry(&cli.root, options, |reg| Ok(CliOutput::api(reg.api_analytics(&id)))),
        Command::Serve { host, port } => {
            let addr: SocketAddr = match format!("{host}:{port}").parse() {
                Ok(a) => a,
                Err(e) => return CliOutput::fail(2, format!("bad address {host}:{port}: {e}")),
            };
            with_registry(&cli.root, options, |reg| serve(reg, addr))
        }
    }
}

/// Runs one command against the process's stdout and stderr.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let output = execute(args);
    let _ = std::io::stdout().write_all(&output.stdout);
    let _ = std::io::stderr().write_all(&output.stderr);
    output.code
}

fn with_registry(
    root: &Path,
    options: RegistryOptions,
    f: impl FnOnce(Registry) -> Result<CliOutput, RegistryError>,
) -> CliOutput {
    match Registry::load(root, options).and_then(f) {
        Ok(output) => output,
        Err(e) => CliOutput::fail(2, e),
    }
}

fn validate(file: &Path, vocab: Option<&Path>) -> CliOutput {
    let bytes = match std::fs::read(file) {
        Ok(b) => b,
        Err(e) => return CliOutput::fail(2, format!("{}: {e}", file.display())),
    };
    let validator = match vocab {
        None => Validator::default(),
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|t| Vocabulary::from_json(&t).map_err(|e| e.to_string()))
            .and_then(|v| Vocabulary::seed_subjects().extend(&v).map_err(|e| e.to_string()))
        {
            Ok(vocabulary) => Validator {
                vocabulary,
                ..Validator::default()
            },
            Err(e) => return CliOutput::fail(2, format!("{}: {e}", path.display())),
        },
    };
    match parse_record(&bytes) {
        Ok(record) => {
            let report = validator.validate(&record);
            CliOutput::out(if report.valid { 0 } else { 1 }, json_line(&report))
        }
        Err(failure) => CliOutput {
            code: 2,
            stdout: json_line(&failure),
            stderr: format!("error: {}: {failure}\n", file.display()).into_bytes(),
        },
    }
}

fn lint(dir: &Path, config: Option<&Path>) -> CliOutput {
    let config = match config {
        None => LintConfig::default(),
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| LintError::Io {
                path: path.to_path_buf(),
                source: e,
            })
            .and_then(|t| LintConfig::from_json(&t))
        {
            Ok(c) => c,
            Err(e) => return CliOutput::fail(2, e),
        },
    };
    match lint_bundle(dir, &config) {
        Ok(report) => CliOutput::out(if report.pass { 0 } else { 1 }, json_line(&report)),
        Err(e) => CliOutput::fail(2, e),
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct IndexEntry {
    file: String,
    status: IngestStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<String>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct IndexSummary {
    ingested: Vec<IndexEntry>,
    records: usize,
    generation: u64,
}

fn index(reg: Registry, dir: &Path) -> Result<CliOutput, RegistryError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io_error(dir))?
        .map(|e| e.map(|e| e.path()).map_err(io_error(dir)))
        .collect::<Result<_, _>>()?;
    files.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"));
    files.sort();
    let mut ingested = Vec::new();
    let mut code = 0;
    let mut reports = Vec::new();
    for file in files {
        let body = std::fs::read(&file).map_err(io_error(&file))?;
        let sources = match file.file_stem().map(|s| dir.join(s)).filter(|d| d.is_dir()) {
            Some(src) => Some(read_sources(&src)?),
            None => None,
        };
        let outcome = reg.ingest(&body, sources.as_ref())?;
        if !matches!(outcome.status, IngestStatus::Accepted | IngestStatus::Unchanged) {
            code = 1;
            reports.push(ingest_response(&outcome));
        }
        ingested.push(IndexEntry {
            file: file.file_name().unwrap_or_default().to_string_lossy().into_owned(),
            status: outcome.status,
            id: outcome.id.map(|id| id.to_string()),
        });
    }
    let index = reg.index();
    let mut output = CliOutput::out(
        code,
        json_line(&IndexSummary {
            ingested,
            records: index.len(),
            generation: index.generation(),
        }),
    );
    for report in reports {
        output.stderr.extend_from_slice(&report.body);
    }
    Ok(output)
}

fn read_sources(dir: &Path) -> Result<SourceFiles, RegistryError> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(current) = stack.pop() {
        for entry in std::fs::read_dir(&current).map_err(io_error(&current))? {
            let path = entry.map_err(io_error(&current))?.path();
            let hidden = path.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.'));
            if hidden {
                continue;
            }
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let rel = path.strip_prefix(dir).unwrap_or(&path);
            let name = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            match std::fs::read_to_string(&path) {
                Ok(text) => {
                    out.insert(name, text);
                }
                Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
                    log::warn!("skipping non-UTF-8 source {}", path.display());
                }
                Err(e) => return Err(io_error(&path)(e)),
            }
        }
    }
    Ok(out)
}

fn serve(reg: Registry, addr: SocketAddr) -> Result<CliOutput, RegistryError> {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(io_error(Path::new("tokio runtime")))?;
    runtime
        .block_on(super::http::serve(Arc::new(reg), addr))
        .map_err(io_error(Path::new("http listener")))?;
    Ok(CliOutput::default())
}
