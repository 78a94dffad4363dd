use std::path::Path;

use microsim::model::{generate_embed, EmbedOptions, EmbedWidth};
use microsim::validate::parse_record;

fn fixtures() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn golden(name: &str) -> String {
    let text = std::fs::read_to_string(fixtures().join("fixtures/embed").join(name)).unwrap();
    text.strip_suffix('\n').unwrap().to_string()
}

fn bouncing_ball() -> microsim::model::MicroSimRecord {
    parse_record(&std::fs::read(fixtures().join("fixtures/records/bouncing-ball.json")).unwrap()).unwrap()
}

#[test]
fn default_width() {
    let snippet = generate_embed(&bouncing_ball(), "/sims/bouncing-ball-1940fd3d/main.html", EmbedOptions::default()).unwrap();
    assert_eq!(snippet, golden("default-width.html"));
}

#[test]
fn fixed_width() {
    let options = EmbedOptions {
        width: EmbedWidth::parse("400").unwrap(),
        ..EmbedOptions::default()
    };
    let snippet = generate_embed(&bouncing_ball(), "https://microsims.example.org/sims/bouncing-ball/main.html", options).unwrap();
    assert_eq!(snippet, golden("fixed-width.html"));
}

#[test]
fn escaped_title() {
    let mut record = bouncing_ball();
    record.dublin_core.as_mut().unwrap().title = Some("Ball <&> Wall".into());
    let options = EmbedOptions {
        width: EmbedWidth::Pixels(640),
        allow_same_origin: true,
    };
    let snippet = generate_embed(&record, "/sims/ball-wall/main.html", options).unwrap();
    assert_eq!(snippet, golden("escaped-title.html"));
    assert!(!snippet.contains('\n'));
}
