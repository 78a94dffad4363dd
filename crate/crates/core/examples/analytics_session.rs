//! Validates a handful of statements, logs them, and summarizes the session.

use microsim::analytics::{session_summaries, validate_statement, EventStore};
use microsim::model::RecordId;
use microsim::validate::parse_record;
use serde_json::json;

fn main() {
    let bytes = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/records/bouncing-ball.json")).unwrap();
    let record = parse_record(&bytes).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let store = EventStore::open(dir.path()).unwrap();

    let t0 = 1_700_000_000_000u64;
    let docs = [
        json!({"verb": "engagement", "timestamp": t0}),
        json!({"verb": "interaction", "controlRef": "speed", "resultValue": 7, "prevValue": 3, "timestamp": t0 + 4_000}),
        json!({"verb": "interaction", "controlRef": "speed", "resultValue": 18, "prevValue": 7, "timestamp": t0 + 9_000}),
        json!({"verb": "interaction", "controlRef": "speed", "resultValue": 42, "timestamp": t0 + 9_500}),
        json!({"verb": "navigation", "timestamp": t0 + 30_000}),
    ];
    for mut doc in docs {
        doc["actor"] = json!("learner-1");
        doc["objectSimId"] = json!("bouncing-ball-1940fd3d");
        doc["sessionId"] = json!("demo");
        match validate_statement(&doc.to_string(), &record) {
            Ok(statement) => println!("seq {}", store.append(&statement).unwrap()),
            Err(findings) => println!("rejected: {}", serde_json::to_string(&findings).unwrap()),
        }
    }
    let statements = store.read(&RecordId::parse("bouncing-ball-1940fd3d").unwrap()).unwrap();
    let summaries = session_summaries(&statements, &record.ui).unwrap();
    println!("{}", serde_json::to_string_pretty(&summaries).unwrap());
}
