//! Lints a simulation source directory and prints the report.
//!
//! cargo run --example lint_sketch -- fixtures/lint/mutants/ms004-no-describe

use std::path::PathBuf;

use microsim::lint::{lint_bundle, LintConfig};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/lint/reference"));
    match lint_bundle(&dir, &LintConfig::default()) {
        Ok(report) => {
            println!("{}", report.to_json());
            if !report.pass {
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("{}: {e}", dir.display());
            std::process::exit(2);
        }
    }
}
