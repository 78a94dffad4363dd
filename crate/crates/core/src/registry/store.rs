//! The file-backed registry: records, sources, events and the live index.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Component, Path, PathBuf};
use std::sync::{Mutex, RwLock, RwLockReadGuard};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::analytics::{EventStore, StoreError};
use crate::catalog::{record_id, CatalogError, CatalogIndex, IndexUpdate};
use crate::lint::{lint_source, LintConfig, LintError, LintReport, SourceBundle, SourceFile};
use crate::model::{IdentityError, MicroSimRecord, RecordId, VocabError, Vocabulary};
use crate::validate::{parse_record, ParseFailure, ValidationReport, Validator};

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("registry root {0} does not exist or is not a directory")]
    UnreadableRoot(PathBuf),
    #[error("vocabulary {path}: {source}")]
    Vocabulary { path: PathBuf, source: VocabError },
    #[error(transparent)]
    Lint(#[from] LintError),
    #[error(transparent)]
    Events(#[from] StoreError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error("invalid source path `{0}`")]
    SourcePath(String),
}

pub(crate) fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> RegistryError + '_ {
    move |source| RegistryError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Where everything lives under the registry root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoreLayout {
    pub root: PathBuf,
}

impl StoreLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn records_dir(&self) -> PathBuf {
        self.root.join("records")
    }

    pub fn record_path(&self, id: &RecordId) -> PathBuf {
        self.records_dir().join(format!("{id}.json"))
    }

    pub fn sources_root(&self) -> PathBuf {
        self.root.join("sources")
    }

    pub fn sources_dir(&self, id: &RecordId) -> PathBuf {
        self.sources_root().join(id.as_str())
    }

    pub fn events_dir(&self) -> PathBuf {
        self.root.join("events")
    }

    pub fn vocab_path(&self) -> PathBuf {
        self.root.join("vocab.json")
    }

    pub fn lint_config_path(&self) -> PathBuf {
        self.root.join("lint.json")
    }

    pub fn quarantine_dir(&self) -> PathBuf {
        self.root.join("quarantine")
    }
}

/// Overrides for files that normally live under the root.
#[derive(Debug, Clone, Default)]
pub struct RegistryOptions {
    pub lint_config: Option<PathBuf>,
    pub vocab: Option<PathBuf>,
}

/// Source files attached to an ingest, keyed by relative path.
pub type SourceFiles = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IngestStatus {
    Accepted,
    Unchanged,
    Invalid,
    Unprocessable,
    Conflict,
}

impl IngestStatus {
    pub fn http_status(self) -> u16 {
        match self {
            IngestStatus::Accepted => 201,
            IngestStatus::Unchanged => 200,
            IngestStatus::Invalid | IngestStatus::Unprocessable => 422,
            IngestStatus::Conflict => 409,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IngestOutcome {
    pub status: IngestStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<RecordId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lint: Option<LintReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parse_error: Option<ParseFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl IngestOutcome {
    fn bare(status: IngestStatus) -> Self {
        Self {
            status,
            id: None,
            validation: None,
            lint: None,
            parse_error: None,
            message: None,
        }
    }
}

/// A loaded registry. Reads run concurrently; ingests are serialized.
#[derive(Debug)]
pub struct Registry {
    layout: StoreLayout,
    validator: Validator,
    lint_config: LintConfig,
    index: RwLock<CatalogIndex>,
    writer: Mutex<()>,
    events: EventStore,
    quarantined: Vec<PathBuf>,
}

/// Opens the registry at `root`, re-validating every stored record.
pub fn load_store(root: impl AsRef<Path>) -> Result<Registry, RegistryError> {
    Registry::load(root, RegistryOptions::default())
}

impl Registry {
    pub fn load(root: impl AsRef<Path>, options: RegistryOptions) -> Result<Self, RegistryError> {
        let layout = StoreLayout::new(root.as_ref());
        if !layout.root.is_dir() {
            return Err(RegistryError::UnreadableRoot(layout.root.clone()));
        }
        for dir in [layout.records_dir(), layout.sources_root(), layout.events_dir()] {
            std::fs::create_dir_all(&dir).map_err(io_error(&dir))?;
        }

        let vocab_path = options.vocab.unwrap_or_else(|| layout.vocab_path());
        let vocabulary = match std::fs::read_to_string(&vocab_path) {
            Ok(text) => Vocabulary::from_json(&text)
                .and_then(|v| Vocabulary::seed_subjects().extend(&v))
                .map_err(|source| RegistryError::Vocabulary {
                    path: vocab_path.clone(),
                    source,
                })?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vocabulary::seed_subjects(),
            Err(e) => return Err(io_error(&vocab_path)(e)),
        };
        let lint_path = options.lint_config.unwrap_or_else(|| layout.lint_config_path());
        let lint_config = match std::fs::read_to_string(&lint_path) {
            Ok(text) => LintConfig::from_json(&text)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => LintConfig::default(),
            Err(e) => return Err(io_error(&lint_path)(e)),
        };
        let validator = Validator {
            vocabulary: vocabulary.clone(),
            ..Validator::default()
        };

        let mut records = Vec::new();
        let mut quarantined = Vec::new();
        let records_dir = layout.records_dir();
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&records_dir)
            .map_err(io_error(&records_dir))?
            .map(|e| e.map(|e| e.path()).map_err(io_error(&records_dir)))
            .collect::<Result<_, _>>()?;
        paths.sort();
        for path in paths {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if name.starts_with('.') || !name.ends_with(".json") || !path.is_file() {
                continue;
            }
            match check_stored(&path, &validator) {
                Ok(record) => records.push(record),
                Err(reason) => {
                    let moved = quarantine(&layout, &path)?;
                    log::warn!("quarantined {} -> {}: {reason}", path.display(), moved.display());
                    quarantined.push(moved);
                }
            }
        }
        let index = CatalogIndex::build(records, vocabulary)?;
        let events = EventStore::open(layout.events_dir())?;
        Ok(Self {
            layout,
            validator,
            lint_config,
            index: RwLock::new(index),
            writer: Mutex::new(()),
            events,
            quarantined,
        })
    }

    pub fn layout(&self) -> &StoreLayout {
        &self.layout
    }

    pub fn lint_config(&self) -> &LintConfig {
        &self.lint_config
    }

    pub fn validator(&self) -> &Validator {
        &self.validator
    }

    pub fn events(&self) -> &EventStore {
        &self.events
    }

    /// Files moved aside while loading.
    pub fn quarantined(&self) -> &[PathBuf] {
        &self.quarantined
    }

    /// A consistent view of the index; writers wait until it is dropped.
    pub fn index(&self) -> RwLockReadGuard<'_, CatalogIndex> {
        self.index.read().expect("index lock")
    }

    pub fn record(&self, id: &RecordId) -> Option<MicroSimRecord> {
        self.index().get(id).cloned()
    }

    /// Stored source files of `id`, if any were attached.
    pub fn sources(&self, id: &RecordId) -> Result<Option<SourceFiles>, RegistryError> {
        let dir = self.layout.sources_dir(id);
        if !dir.is_dir() {
            return Ok(None);
        }
        let mut files = SourceFiles::new();
        read_tree(&dir, &dir, &mut files)?;
        Ok(Some(files))
    }

    /// Lints the stored sources of `id` against its record.
    pub fn lint_record(&self, id: &RecordId) -> Result<Option<LintReport>, RegistryError> {
        let Some(record) = self.record(id) else {
            return Ok(None);
        };
        let Some(files) = self.sources(id)? else {
            return Ok(None);
        };
        Ok(Some(lint_source(&bundle(&files, record), &self.lint_config)?))
    }

    /// Parses, validates, lints and (when valid) persists a record.
    pub fn ingest(&self, body: &[u8], sources: Option<&SourceFiles>) -> Result<IngestOutcome, RegistryError> {
        let mut record = match parse_record(body) {
            Ok(r) => r,
            Err(failure) => {
                return Ok(IngestOutcome {
                    parse_error: Some(failure),
                    ..IngestOutcome::bare(IngestStatus::Unprocessable)
                })
            }
        };
        if let Some(files) = sources {
            for name in files.keys() {
                check_relative(name)?;
            }
        }
        let validation = self.validator.validate(&record);
        let lint = match sources {
            Some(files) if !files.is_empty() => match lint_source(&bundle(files, record.clone()), &self.lint_config) {
                Ok(report) => Some(report),
                Err(LintError::EmptyBundle) => None,
                Err(e) => return Err(e.into()),
            },
            _ => None,
        };
        if !validation.valid {
            return Ok(IngestOutcome {
                validation: Some(validation),
                lint,
                ..IngestOutcome::bare(IngestStatus::Invalid)
            });
        }
        let id = record_id(&record)?;
        record.dublin_core.get_or_insert_with(Default::default).identifier = Some(id.to_string());

        let _writer = self.writer.lock().expect("writer lock");
        let outcome = |status, message: Option<String>| IngestOutcome {
            status,
            id: Some(id.clone()),
            validation: Some(validation.clone()),
            lint: lint.clone(),
            parse_error: None,
            message,
        };
        let stored_sources = self.sources(&id)?;
        if let Some(existing) = self.record(&id) {
            let same_sources = match sources {
                None => true,
                Some(files) => stored_sources.as_ref() == Some(files),
            };
            if existing == record && same_sources {
                return Ok(outcome(IngestStatus::Unchanged, None));
            }
            return Ok(outcome(
                IngestStatus::Conflict,
                Some(format!("record `{id}` already exists with different content")),
            ));
        }

        if let Some(files) = sources.filter(|f| !f.is_empty()) {
            self.write_sources(&id, files)?;
        }
        let path = self.layout.record_path(&id);
        write_atomic(&path, format!("{}\n", record.to_json_pretty()).as_bytes())?;
        self.index.write().expect("index lock").update(IndexUpdate::Upsert(record))?;
        Ok(outcome(IngestStatus::Accepted, None))
    }

    fn write_sources(&self, id: &RecordId, files: &SourceFiles) -> Result<(), RegistryError> {
        let root = self.layout.sources_root();
        let staging = tempfile::Builder::new()
            .prefix(".staging-")
            .tempdir_in(&root)
            .map_err(io_error(&root))?;
        for (name, text) in files {
            let path = staging.path().join(name);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(io_error(parent))?;
            }
            std::fs::write(&path, text).map_err(io_error(&path))?;
        }
        let target = self.layout.sources_dir(id);
        if target.exists() {
            std::fs::remove_dir_all(&target).map_err(io_error(&target))?;
        }
        let staged = staging.keep();
        std::fs::rename(&staged, &target).map_err(io_error(&target))?;
        Ok(())
    }
}

fn bundle(files: &SourceFiles, record: MicroSimRecord) -> SourceBundle {
    let mut bundle = SourceBundle {
        declared_meta: Some(record),
        ..SourceBundle::default()
    };
    for (name, text) in files {
        let lower = name.to_ascii_lowercase();
        if lower.ends_with(".html") || lower.ends_with(".htm") {
            bundle.html.push(SourceFile::new(name, text));
        } else if lower.ends_with(".js") {
            bundle.scripts.push(SourceFile::new(name, text));
        }
    }
    bundle
}

/// Source paths must stay inside the record's source directory.
pub(crate) fn check_relative(name: &str) -> Result<(), RegistryError> {
    let path = Path::new(name);
    let ok = !name.is_empty()
        && path.components().all(|c| matches!(c, Component::Normal(_)))
        && !path.components().any(|c| c.as_os_str().to_string_lossy().starts_with('.'));
    if ok {
        Ok(())
    } else {
        Err(RegistryError::SourcePath(name.to_string()))
    }
}

fn read_tree(root: &Path, dir: &Path, out: &mut SourceFiles) -> Result<(), RegistryError> {
    for entry in std::fs::read_dir(dir).map_err(io_error(dir))? {
        let path = entry.map_err(io_error(dir))?.path();
        if path.is_dir() {
            read_tree(root, &path, out)?;
        } else {
            let rel = path
                .strip_prefix(root)
                .unwrap_or(&path)
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            let text = std::fs::read_to_string(&path).map_err(io_error(&path))?;
            out.insert(rel, text);
        }
    }
    Ok(())
}

/// Writes via a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RegistryError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_error(dir))?;
    tmp.write_all(bytes).map_err(io_error(path))?;
    tmp.as_file().sync_all().map_err(io_error(path))?;
    tmp.persist(path).map_err(|e| io_error(path)(e.error))?;
    Ok(())
}

fn check_stored(path: &Path, validator: &Validator) -> Result<MicroSimRecord, String> {
    let bytes = std::fs::read(path).map_err(|e| e.to_string())?;
    let record = parse_record(&bytes).map_err(|e| e.to_string())?;
    let report = validator.validate(&record);
    if !report.valid {
        let codes: Vec<String> = report.errors().map(|f| format!("{} at {}", f.code.as_str(), f.path)).collect();
        return Err(format!("invalid record: {}", codes.join(", ")));
    }
    let id = record_id(&record).map_err(|e| e.to_string())?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    if stem != id.as_str() {
        return Err(format!("file name does not match record id `{id}`"));
    }
    Ok(record)
}

fn quarantine(layout: &StoreLayout, path: &Path) -> Result<PathBuf, RegistryError> {
    let dir = layout.quarantine_dir();
    std::fs::create_dir_all(&dir).map_err(io_error(&dir))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut target = dir.join(&name);
    let mut n = 1;
    while target.exists() {
        target = dir.join(format!("{name}.{n}"));
        n += 1;
    }
    std::fs::rename(path, &target).map_err(io_error(path))?;
    Ok(target)
}

/// Splits an ingest body into the record document and optional sources.
///
/// Accepts either a bare record or `{"record": {...}, "sources": {"path": "text"}}`.
pub fn split_envelope(body: &[u8]) -> (Vec<u8>, Option<SourceFiles>) {
    let Ok(Value::Object(map)) = serde_json::from_slice::<Value>(body) else {
        return (body.to_vec(), None);
    };
    let is_envelope = map.contains_key("record") && map.keys().all(|k| k == "record" || k == "sources");
    if !is_envelope {
        return (body.to_vec(), None);
    }
    let record = serde_json::to_vec(&map["record"]).expect("value serializes");
    let sources = map.get("sources").and_then(|s| serde_json::from_value::<SourceFiles>(s.clone()).ok());
    (record, sources)
}
