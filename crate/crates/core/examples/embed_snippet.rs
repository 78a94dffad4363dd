//! Prints the iframe snippet for the bouncing-ball record.
//!
//! cargo run --example embed_snippet -- 400

use microsim::model::{generate_embed, EmbedOptions, EmbedWidth};
use microsim::validate::parse_record;

fn main() {
    let bytes = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/records/bouncing-ball.json")).unwrap();
    let record = parse_record(&bytes).unwrap();
    let width = match std::env::args().nth(1).map(|w| EmbedWidth::parse(&w)) {
        None => EmbedWidth::Full,
        Some(Ok(w)) => w,
        Some(Err(e)) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let options = EmbedOptions {
        width,
        allow_same_origin: false,
    };
    println!("{}", generate_embed(&record, "/sims/bouncing-ball-1940fd3d/main.html", options).unwrap());
}
