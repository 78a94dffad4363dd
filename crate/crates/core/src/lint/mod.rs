//! Static compliance checks for MicroSim source bundles.
//!
//! Analysis is lexical: scripts are tokenized and rules match token
//! patterns (declarations, call names, literal arguments).

pub mod html;
pub mod rules;
pub mod token;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::MicroSimRecord;
use crate::validate::{parse_record, ParseFailure, Severity};

pub use html::{script_elements, ScriptElement};
pub use rules::{find_rule, list_rules, LintRule, RULES, TOUCH_TARGET_FEATURE};
pub use token::{tokenize, LexProblem, LexProblemKind, Token, TokenKind, TokenStream};

use rules::{RawFinding, RuleContext, ScriptUnit};

const EXCERPT_LIMIT: usize = 120;

#[derive(Debug, Error)]
pub enum LintError {
    #[error("bundle contains no html or script file")]
    EmptyBundle,
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("declared metadata {path}: {source}")]
    Metadata { path: PathBuf, source: ParseFailure },
    #[error("lint config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub filename: String,
    pub text: String,
}

impl SourceFile {
    pub fn new(filename: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            filename: filename.into(),
            text: text.into(),
        }
    }
}

/// The files of one simulation plus, optionally, its metadata record.
#[derive(Debug, Clone, Default)]
pub struct SourceBundle {
    pub html: Vec<SourceFile>,
    pub scripts: Vec<SourceFile>,
    pub declared_meta: Option<MicroSimRecord>,
}

impl SourceBundle {
    pub fn from_script(filename: &str, text: &str) -> Self {
        Self {
            scripts: vec![SourceFile::new(filename, text)],
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleSetting {
    Error,
    Warning,
    Info,
    Off,
}

impl RuleSetting {
    fn severity(self) -> Option<Severity> {
        match self {
            RuleSetting::Error => Some(Severity::Error),
            RuleSetting::Warning => Some(Severity::Warning),
            RuleSetting::Info => Some(Severity::Info),
            RuleSetting::Off => None,
        }
    }
}

pub const DEFAULT_SCRIPT_ALLOWLIST: &[&str] = &[
    "https://cdn.jsdelivr.net/npm/p5@",
    "https://cdn.jsdelivr.net/npm/p5/",
    "https://cdn.jsdelivr.net/npm/mermaid@",
    "https://cdn.jsdelivr.net/npm/mermaid/",
    "https://cdn.jsdelivr.net/npm/chart.js@",
    "https://cdn.jsdelivr.net/npm/chart.js/",
    "https://cdn.jsdelivr.net/npm/vis-network@",
    "https://cdn.jsdelivr.net/npm/vis-network/",
    "https://cdn.jsdelivr.net/npm/vis-timeline@",
    "https://cdn.jsdelivr.net/npm/vis-timeline/",
    "https://cdnjs.cloudflare.com/ajax/libs/p5.js/",
    "https://unpkg.com/vis-network",
    "https://unpkg.com/vis-timeline",
];

/// Rule severities and allowlists; the `lint.json` file form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LintConfig {
    /// Per-rule overrides; rules not listed keep their default severity.
    #[serde(default)]
    pub rules: BTreeMap<String, RuleSetting>,
    #[serde(default = "default_script_allowlist")]
    pub script_allowlist: Vec<String>,
    #[serde(default)]
    pub analytics_allowlist: Vec<String>,
}

fn default_script_allowlist() -> Vec<String> {
    DEFAULT_SCRIPT_ALLOWLIST.iter().map(|s| s.to_string()).collect()
}

impl Default for LintConfig {
    fn default() -> Self {
        Self {
            rules: BTreeMap::new(),
            script_allowlist: default_script_allowlist(),
            analytics_allowlist: Vec::new(),
        }
    }
}

impl LintConfig {
    pub fn from_json(text: &str) -> Result<Self, LintError> {
        let config: Self = serde_json::from_str(text).map_err(|e| LintError::Config(e.to_string()))?;
        if let Some(unknown) = config.rules.keys().find(|id| find_rule(id).is_none()) {
            return Err(LintError::Config(format!("unknown rule `{unknown}`")));
        }
        Ok(config)
    }

    pub fn with_rule(mut self, id: &str, setting: RuleSetting) -> Self {
        self.rules.insert(id.to_string(), setting);
        self
    }

    /// Effective severity of a rule, `None` when switched off.
    pub fn severity(&self, rule: &LintRule) -> Option<Severity> {
        match self.rules.get(rule.id) {
            Some(setting) => setting.severity(),
            None => Some(rule.severity),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LintFinding {
    pub rule_id: String,
    pub severity: Severity,
    pub filename: String,
    pub line: usize,
    pub excerpt: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LintReport {
    /// No error-severity findings.
    pub pass: bool,
    pub rules_evaluated: Vec<String>,
    /// Enabled rules the bundle does not carry enough information to decide.
    pub not_assessed: Vec<String>,
    pub findings: Vec<LintFinding>,
}

impl LintReport {
    pub fn errors(&self) -> impl Iterator<Item = &LintFinding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn has_rule(&self, id: &str) -> bool {
        self.findings.iter().any(|f| f.rule_id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs every enabled rule over the bundle.
pub fn lint_source(bundle: &SourceBundle, config: &LintConfig) -> Result<LintReport, LintError> {
    let mut units = Vec::new();
    let mut external = Vec::new();
    let mut lex_problems = Vec::new();
    let mut texts: BTreeMap<&str, &str> = BTreeMap::new();

    for file in &bundle.html {
        texts.insert(&file.filename, &file.text);
        for element in script_elements(&file.text) {
            match element {
                ScriptElement::External { src, line } => external.push((file.filename.clone(), src, line)),
                ScriptElement::Inline { text, line } => {
                    let mut stream = tokenize(&text);
                    stream.shift_lines(line - 1);
                    lex_problems.extend(stream.problems.iter().map(|p| (file.filename.clone(), p.kind, p.line)));
                    units.push(ScriptUnit {
                        file: &file.filename,
                        tokens: stream.code().cloned().collect(),
                    });
                }
            }
        }
    }
    for file in &bundle.scripts {
        texts.insert(&file.filename, &file.text);
        let stream = tokenize(&file.text);
        lex_problems.extend(stream.problems.iter().map(|p| (file.filename.clone(), p.kind, p.line)));
        units.push(ScriptUnit {
            file: &file.filename,
            tokens: stream.code().cloned().collect(),
        });
    }
    if units.is_empty() && external.is_empty() {
        return Err(LintError::EmptyBundle);
    }

    let cx = RuleContext {
        units: &units,
        external_scripts: &external,
        lex_problems: &lex_problems,
        declared: bundle.declared_meta.as_ref(),
        script_allowlist: &config.script_allowlist,
        analytics_allowlist: &config.analytics_allowlist,
    };

    let mut rules_evaluated = Vec::new();
    let mut not_assessed = Vec::new();
    let mut findings = Vec::new();
    for rule in RULES {
        let Some(severity) = config.severity(rule) else {
            continue;
        };
        let needs_meta = matches!(rule.id, "MS012" | "MS013");
        if needs_meta && bundle.declared_meta.is_none() {
            not_assessed.push(rule.id.to_string());
            continue;
        }
        rules_evaluated.push(rule.id.to_string());
        for raw in rules::check(rule.id, &cx) {
            findings.push(finish(raw, severity, &texts));
        }
    }
    findings.sort_by(|a, b| {
        (&a.rule_id, &a.filename, a.line, &a.message).cmp(&(&b.rule_id, &b.filename, b.line, &b.message))
    });
    Ok(LintReport {
        pass: !findings.iter().any(|f| f.severity == Severity::Error),
        rules_evaluated,
        not_assessed,
        findings,
    })
}

fn finish(raw: RawFinding, severity: Severity, texts: &BTreeMap<&str, &str>) -> LintFinding {
    let line = raw.line.max(1);
    let excerpt = texts
        .get(raw.file.as_str())
        .and_then(|text| text.lines().nth(line - 1))
        .map(excerpt)
        .unwrap_or_default();
    LintFinding {
        rule_id: raw.rule.to_string(),
        severity,
        filename: raw.file,
        line,
        excerpt,
        message: raw.message,
    }
}

fn excerpt(line: &str) -> String {
    let trimmed = line.trim();
    match trimmed.char_indices().nth(EXCERPT_LIMIT) {
        Some((cut, _)) => trimmed[..cut].to_string(),
        None => trimmed.to_string(),
    }
}

pub const DECLARED_META_FILE: &str = "metadata.json";

/// Reads a bundle directory: `.html`/`.htm` pages, `.js` scripts and an
/// optional `metadata.json` record. Hidden entries are skipped; filenames
/// are relative to `dir` with `/` separators.
pub fn read_bundle(dir: &Path) -> Result<SourceBundle, LintError> {
    let mut bundle = SourceBundle::default();
    let mut files = BTreeSet::new();
    collect_files(dir, dir, &mut files)?;
    for (name, path) in files {
        let io = |source| LintError::Io {
            path: path.clone(),
            source,
        };
        let lower = name.to_ascii_lowercase();
        if name == DECLARED_META_FILE {
            let bytes = std::fs::read(&path).map_err(io)?;
            let record = parse_record(&bytes).map_err(|source| LintError::Metadata {
                path: path.clone(),
                source,
            })?;
            bundle.declared_meta = Some(record);
        } else if lower.ends_with(".html") || lower.ends_with(".htm") {
            bundle.html.push(SourceFile::new(name, std::fs::read_to_string(&path).map_err(io)?));
        } else if lower.ends_with(".js") {
            bundle.scripts.push(SourceFile::new(name, std::fs::read_to_string(&path).map_err(io)?));
        }
    }
    if bundle.html.is_empty() && bundle.scripts.is_empty() {
        return Err(LintError::EmptyBundle);
    }
    Ok(bundle)
}

fn collect_files(root: &Path, dir: &Path, out: &mut BTreeSet<(String, PathBuf)>) -> Result<(), LintError> {
    let io = |source| LintError::Io {
        path: dir.to_path_buf(),
        source,
    };
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with('.'))
        {
            continue;
        }
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else {
            let rel = path
                .strip_prefix(root)
                .unwrap_or(&path)
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            out.insert((rel, path));
        }
    }
    Ok(())
}

/// Lints every file of a bundle directory together.
pub fn lint_bundle(dir: &Path, config: &LintConfig) -> Result<LintReport, LintError> {
    lint_source(&read_bundle(dir)?, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SKETCH: &str = r#"let canvasWidth = 400;
let drawHeight = 400;
let controlHeight = 50;
let canvasHeight = drawHeight + controlHeight;
let margin = 25;
let sliderLeftMargin = 105;
let speedSlider;

function setup() {
  updateCanvasSize();
  createCanvas(canvasWidth, canvasHeight);
  speedSlider = createSlider(0, 20, 3, 1);
  describe('A ball bounces inside the drawing region.', LABEL);
}

function draw() {
  fill('aliceblue');
  stroke('silver');
  background('aliceblue');
  rect(0, drawHeight, canvasWidth, controlHeight);
  background('white');
  textAlign(CENTER, TOP);
}

function windowResized() {
  updateCanvasSize();
}

function updateCanvasSize() {
  canvasWidth = windowWidth;
}
"#;

    fn lint(src: &str) -> LintReport {
        lint_source(&SourceBundle::from_script("sketch.js", src), &LintConfig::default()).unwrap()
    }

    fn rule_ids(report: &LintReport) -> Vec<&str> {
        report.findings.iter().map(|f| f.rule_id.as_str()).collect()
    }

    #[test]
    fn compliant_sketch_is_clean() {
        let report = lint(SKETCH);
        assert!(report.pass);
        assert!(report.findings.is_empty(), "{:#?}", report.findings);
        assert_eq!(report.not_assessed, ["MS012", "MS013"]);
    }

    #[test]
    fn missing_describe() {
        let report = lint(&SKETCH.replace("  describe('A ball bounces inside the drawing region.', LABEL);\n", ""));
        assert_eq!(rule_ids(&report), ["MS004"]);
        assert!(!report.pass);
    }

    #[test]
    fn frame_buster_is_located() {
        let src = SKETCH.replace("function draw() {\n", "function draw() {\n  window.top.location = self.location;\n");
        let report = lint(&src);
        assert_eq!(rule_ids(&report), ["MS009"]);
        assert_eq!(report.findings[0].line, 17);
        assert_eq!(report.findings[0].excerpt, "window.top.location = self.location;");
    }

    #[test]
    fn slider_mismatch_against_metadata() {
        let record: MicroSimRecord = serde_json::from_str(
            r#"{"ui": [{"name": "speed", "kind": "slider", "min": 0, "max": 20, "defaultValue": 3, "step": 1}],
                "technical": {"accessibilityFeatures": ["touch-target-44"]}}"#,
        )
        .unwrap();
        let mut bundle = SourceBundle::from_script("sketch.js", &SKETCH.replace("createSlider(0, 20, 3, 1)", "createSlider(0, 10, 3, 1)"));
        bundle.declared_meta = Some(record);
        let report = lint_source(&bundle, &LintConfig::default()).unwrap();
        assert_eq!(rule_ids(&report), ["MS012"]);
        assert_eq!(report.findings[0].severity, Severity::Warning);
        assert!(report.findings[0].message.contains("max 10"));
        assert!(report.not_assessed.is_empty());
    }

    #[test]
    fn strings_and_comments_do_not_satisfy_rules() {
        let src = SKETCH
            .replace("  describe('A ball bounces inside the drawing region.', LABEL);\n", "  // describe('x');\n  let s = \"describe('x')\";\n");
        assert_eq!(rule_ids(&lint(&src)), ["MS004"]);
    }

    #[test]
    fn network_access() {
        let src = format!("{SKETCH}\nfunction send() {{ fetch('https://lrs.example/xapi', {{}}); }}\n");
        assert_eq!(rule_ids(&lint(&src)), ["MS008"]);
        let config = LintConfig {
            analytics_allowlist: vec!["https://lrs.example/".into()],
            ..LintConfig::default()
        };
        let report = lint_source(&SourceBundle::from_script("sketch.js", &src), &config).unwrap();
        assert!(report.findings.is_empty());
        let xhr = format!("{SKETCH}\nlet x = new XMLHttpRequest();\n");
        assert_eq!(rule_ids(&lint_source(&SourceBundle::from_script("s.js", &xhr), &config).unwrap()), ["MS008"]);
        let method = format!("{SKETCH}\ncache.fetch('k');\n");
        assert!(lint(&method).findings.is_empty());
    }

    #[test]
    fn severities_are_configurable() {
        let src = SKETCH.replace("  describe('A ball bounces inside the drawing region.', LABEL);\n", "");
        let bundle = SourceBundle::from_script("sketch.js", &src);
        let config = LintConfig::default().with_rule("MS004", RuleSetting::Warning);
        let report = lint_source(&bundle, &config).unwrap();
        assert!(report.pass);
        assert_eq!(report.findings[0].severity, Severity::Warning);
        let off = LintConfig::default().with_rule("MS004", RuleSetting::Off);
        let report = lint_source(&bundle, &off).unwrap();
        assert!(report.findings.is_empty());
        assert!(!report.rules_evaluated.contains(&"MS004".to_string()));
    }

    #[test]
    fn config_file_form() {
        let config = LintConfig::from_json(r#"{"rules": {"MS011": "off"}, "analyticsAllowlist": ["/xapi"]}"#).unwrap();
        assert_eq!(config.rules["MS011"], RuleSetting::Off);
        assert_eq!(config.script_allowlist, default_script_allowlist());
        assert!(LintConfig::from_json(r#"{"rules": {"MS999": "off"}}"#).is_err());
        assert!(LintConfig::from_json(r#"{"rules": {"MS001": "fatal"}}"#).is_err());
    }

    #[test]
    fn html_inline_scripts_and_external_sources() {
        let html = format!(
            "<html>\n<script src=\"https://cdn.jsdelivr.net/npm/p5@1.11.1/lib/p5.js\"></script>\n<script src=\"https://evil.example/x.js\"></script>\n<script>\n{SKETCH}</script>\n</html>\n"
        );
        let bundle = SourceBundle {
            html: vec![SourceFile::new("main.html", html)],
            ..SourceBundle::default()
        };
        let report = lint_source(&bundle, &LintConfig::default()).unwrap();
        assert_eq!(rule_ids(&report), ["MS010"]);
        assert_eq!(report.findings[0].line, 3);

        let stripped = SKETCH.replace("  describe('A ball bounces inside the drawing region.', LABEL);\n", "");
        let broken = SourceBundle {
            html: vec![SourceFile::new("main.html", format!("<script>\n{stripped}</script>"))],
            ..SourceBundle::default()
        };
        let report = lint_source(&broken, &LintConfig::default()).unwrap();
        let f = report.findings.iter().find(|f| f.rule_id == "MS004").unwrap();
        assert_eq!(f.filename, "main.html");
        assert_eq!(f.line, 10);
    }

    #[test]
    fn lexical_problems_are_findings() {
        let report = lint(&format!("{SKETCH}\nlet s = 'open\n"));
        assert_eq!(rule_ids(&report), ["MS014"]);
        assert_eq!(report.findings[0].line, 33);
    }

    #[test]
    fn empty_bundle_is_rejected() {
        assert!(matches!(
            lint_source(&SourceBundle::default(), &LintConfig::default()),
            Err(LintError::EmptyBundle)
        ));
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(lint_bundle(dir.path(), &LintConfig::default()), Err(LintError::EmptyBundle)));
    }

    #[test]
    fn excerpt_is_bounded() {
        assert_eq!(excerpt(&"x".repeat(300)).chars().count(), EXCERPT_LIMIT);
        assert_eq!(excerpt("  a  "), "a");
    }
}
