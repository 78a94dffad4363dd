//! File-backed registry, HTTP service and CLI.
//!
//! Layout under the root: `records/<id>.json`, `sources/<id>/`,
//! `events/<id>.ndjson`, `vocab.json`, `lint.json`, and `quarantine/` for
//! stored records that no longer load.

pub mod api;
pub mod cli;
pub mod http;
pub mod store;

pub use api::ApiResponse;
pub use cli::{execute, exit_code, run_cli, CliOutput};
pub use http::{router, serve};
pub use store::{
    load_store, split_envelope, write_atomic, IngestOutcome, IngestStatus, Registry, RegistryError, RegistryOptions,
    SourceFiles, StoreLayout,
};
