//! Registry toolchain for MicroSim educational simulations.
//!
//! * [`model`]: the layered metadata record, vocabularies, ids and embeds
//! * [`validate`]: parsing, schema validation and completeness scoring
//! * [`lint`]: static compliance checks over simulation source bundles
//! * [`catalog`]: faceted inverted index and search
//! * [`analytics`]: interaction statements, event log and summaries
//! * [`registry`]: file-backed store, HTTP service and CLI

pub mod model;
pub mod validate;
pub mod lint;
pub mod catalog;
pub mod analytics;
pub mod registry;
