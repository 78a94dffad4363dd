//! Builds an index over a few records and runs a faceted query.
//!
//! cargo run --example faceted_search -- "subject=math&grade=9,10"

use microsim::catalog::{build_index, FacetQuery};
use microsim::validate::parse_record;
use serde_json::{json, Value};

fn variant(base: &Value, title: &str, subjects: &[&str], grades: &[&str]) -> Value {
    let mut record = base.clone();
    record["dublinCore"]["title"] = json!(title);
    record["dublinCore"]["subject"] = json!(subjects);
    record["educational"]["subjects"] = json!(subjects);
    record["educational"]["gradeLevels"] = json!(grades);
    record["dublinCore"].as_object_mut().unwrap().remove("identifier");
    record
}

fn main() {
    let bytes = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/records/bouncing-ball.json")).unwrap();
    let ball: Value = serde_json::from_slice(&bytes).unwrap();
    let docs = [
        ball.clone(),
        variant(&ball, "Fraction Wall", &["Mathematics"], &["3", "4", "5"]),
        variant(&ball, "Titration Curve", &["Chemistry"], &["10", "11", "12"]),
        variant(&ball, "Projectile Motion", &["Physics", "Mathematics"], &["9", "10", "11"]),
    ];
    let records = docs.iter().map(|d| parse_record(d.to_string().as_bytes()).unwrap());
    let index = build_index(records).unwrap();

    let qs = std::env::args().nth(1).unwrap_or_else(|| "subject=math&grade=9,10".into());
    let query = match FacetQuery::from_query_string(&qs) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("{qs}: {e}");
            std::process::exit(2);
        }
    };
    let result = index.search(&query).unwrap();
    println!("{}", serde_json::to_string_pretty(&result).unwrap());
}
