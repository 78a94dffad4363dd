//! Validates a metadata record and prints the report.
//!
//! cargo run --example validate_record -- fixtures/records/bouncing-ball.json

use microsim::validate::{parse_record, validate_record};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/records/bouncing-ball.json").to_string());
    let bytes = std::fs::read(&path).expect("readable record file");
    match parse_record(&bytes) {
        Ok(record) => {
            let report = validate_record(&record);
            println!("{}", report.to_json());
        }
        Err(failure) => {
            eprintln!("{path}: {failure}");
            std::process::exit(2);
        }
    }
}
