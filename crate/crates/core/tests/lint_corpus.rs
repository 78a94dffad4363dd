use std::path::{Path, PathBuf};

use microsim::lint::{lint_bundle, lint_source, read_bundle, LintConfig, SourceBundle, SourceFile};
use microsim::validate::Severity;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/lint")
}

fn mutants() -> Vec<(String, PathBuf)> {
    let mut dirs: Vec<_> = std::fs::read_dir(fixtures().join("mutants"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    dirs.sort();
    dirs.into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_str().unwrap().to_string();
            let rule = name[..5].to_ascii_uppercase();
            (rule, p)
        })
        .collect()
}

#[test]
fn reference_matches_golden_report() {
    let report = lint_bundle(&fixtures().join("reference"), &LintConfig::default()).unwrap();
    let golden = std::fs::read_to_string(fixtures().join("reference.report.json")).unwrap();
    assert_eq!(report.to_json().trim_end(), golden.trim_end());
    assert!(report.pass);
}

#[test]
fn each_mutant_trips_exactly_its_rule() {
    let found = mutants();
    assert_eq!(found.len(), 12);
    for (expected, dir) in found {
        let report = lint_bundle(&dir, &LintConfig::default()).unwrap();
        let ids: Vec<&str> = report.findings.iter().map(|f| f.rule_id.as_str()).collect();
        assert_eq!(ids, [expected.as_str()], "{}: {:#?}", dir.display(), report.findings);
        let f = &report.findings[0];
        assert!(matches!(f.severity, Severity::Error | Severity::Warning) || expected == "MS011");
        assert_eq!(report.pass, f.severity != Severity::Error);
    }
}

#[test]
fn injected_frame_buster_is_reported_on_its_line() {
    let dir = fixtures().join("mutants/ms009-frame-buster");
    let report = lint_bundle(&dir, &LintConfig::default()).unwrap();
    let text = std::fs::read_to_string(dir.join("sketch.js")).unwrap();
    let expected_line = text.lines().position(|l| l.contains("top.location")).unwrap() + 1;
    assert_eq!(report.findings[0].filename, "sketch.js");
    assert_eq!(report.findings[0].line, expected_line);
}

#[test]
fn directory_equals_concatenated_source() {
    let dir = fixtures().join("reference");
    let bundle = read_bundle(&dir).unwrap();
    let concatenated: String = bundle.scripts.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join("\n");
    let single = SourceBundle {
        html: bundle.html.clone(),
        scripts: vec![SourceFile::new("sketch.js", concatenated)],
        declared_meta: bundle.declared_meta.clone(),
    };
    let key = |r: microsim::lint::LintReport| {
        let mut v: Vec<_> = r.findings.into_iter().map(|f| (f.rule_id, f.severity as u8, f.message)).collect();
        v.sort();
        v
    };
    for (_, mutant) in mutants() {
        let b = read_bundle(&mutant).unwrap();
        let joined = SourceBundle {
            html: b.html.clone(),
            scripts: vec![SourceFile::new("sketch.js", b.scripts.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join("\n"))],
            declared_meta: b.declared_meta.clone(),
        };
        assert_eq!(
            key(lint_source(&b, &LintConfig::default()).unwrap()),
            key(lint_source(&joined, &LintConfig::default()).unwrap())
        );
    }
    assert_eq!(
        key(lint_source(&bundle, &LintConfig::default()).unwrap()),
        key(lint_source(&single, &LintConfig::default()).unwrap())
    );
}

#[test]
fn violation_in_second_file_names_that_file() {
    let first = "let canvasWidth = 400, drawHeight = 400, controlHeight = 50;\nlet canvasHeight = drawHeight + controlHeight;\nlet margin = 25, sliderLeftMargin = 105;\n";
    let second = "function setup() {\n  createButton('Go');\n}\nwindow.parent.location.href = 'https://example.com';\n";
    let bundle = SourceBundle {
        scripts: vec![SourceFile::new("a.js", first), SourceFile::new("b.js", second)],
        ..SourceBundle::default()
    };
    let report = lint_source(&bundle, &LintConfig::default()).unwrap();
    let ms009: Vec<_> = report.findings.iter().filter(|f| f.rule_id == "MS009").collect();
    assert_eq!(ms009.len(), 1);
    assert_eq!(ms009[0].filename, "b.js");
    assert_eq!(ms009[0].line, 4);
}
