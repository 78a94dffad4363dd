//! Record parsing, layered-schema validation and completeness scoring.

mod completeness;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    derive_record_id, ControlKind, EventSpec, Extensions, MicroSimRecord, ModelSpec, TechnicalMeta,
    UiControl, Vocabulary, LICENSES,
};

pub use completeness::{completeness_score, Checklist, ChecklistSection};
pub use parse::{parse_record, ParseErrorKind, ParseFailure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "error" => Some(Severity::Error),
            "warning" => Some(Severity::Warning),
            "info" => Some(Severity::Info),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! finding_codes {
    ($($variant:ident => $code:literal, $severity:ident, $about:literal;)+) => {
        /// Stable identifiers for validation findings.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum FindingCode {
            $(#[serde(rename = $code)] $variant,)+
        }

        impl FindingCode {
            pub const ALL: &'static [FindingCode] = &[$(FindingCode::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $(FindingCode::$variant => $code,)+ }
            }

            pub fn severity(self) -> Severity {
                match self { $(FindingCode::$variant => Severity::$severity,)+ }
            }

            pub fn about(self) -> &'static str {
                match self { $(FindingCode::$variant => $about,)+ }
            }
        }
    };
}

finding_codes! {
    RequiredField => "REQUIRED_FIELD", Error, "a required field is missing or blank";
    EnumViolation => "ENUM_VIOLATION", Error, "value is outside its enumeration";
    RangeViolation => "RANGE_VIOLATION", Error, "numeric value or range is out of bounds";
    FormatViolation => "FORMAT_VIOLATION", Error, "text does not match the required syntax";
    DanglingRef => "DANGLING_REF", Error, "reference names no declared UI control";
    DuplicateName => "DUPLICATE_NAME", Error, "name must be unique within the record";
    IdentifierMismatch => "IDENTIFIER_MISMATCH", Error, "dublinCore.identifier differs from the derived record id";
    HeightMismatch => "HEIGHT_MISMATCH", Warning, "canvasHeight differs from drawHeight + controlHeight";
    UnknownTerm => "UNKNOWN_TERM", Warning, "term is not in the controlled vocabulary";
    DuplicateEntry => "DUPLICATE_ENTRY", Warning, "list repeats an entry";
    CustomRights => "CUSTOM_RIGHTS", Info, "rights statement is custom text rather than a known license";
    UnknownField => "UNKNOWN_FIELD", Info, "field is not part of the schema and is preserved as an extension";
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationFinding {
    /// Slash-delimited pointer into the document. For a missing field it
    /// names the nearest enclosing node that exists.
    pub path: String,
    pub code: FindingCode,
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub completeness: f64,
    pub findings: Vec<ValidationFinding>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &ValidationFinding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn has_code(&self, code: FindingCode) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Schema validator configured with a subject vocabulary and a checklist.
#[derive(Debug, Clone, Default)]
pub struct Validator {
    pub vocabulary: Vocabulary,
    pub checklist: Checklist,
}

impl Validator {
    pub fn new(vocabulary: Vocabulary, checklist: Checklist) -> Self {
        Self {
            vocabulary,
            checklist,
        }
    }

    pub fn validate(&self, record: &MicroSimRecord) -> ValidationReport {
        let mut out = Findings::default();
        out.extensions("", &record.extensions);
        if let Some(version) = &record.schema_version {
            if semver::Version::parse(version).is_err() {
                out.push(
                    "/schemaVersion",
                    FindingCode::FormatViolation,
                    format!("schemaVersion `{version}` is not a semantic version"),
                );
            }
        }
        self.check_dublin_core(record, &mut out);
        self.check_educational(record, &mut out);
        check_technical(record.technical.as_ref(), &mut out);
        check_ui(&record.ui, &mut out);
        if let Some(model) = &record.model {
            check_model(model, &mut out);
        }
        check_analytics_spec(&record.analytics_spec, &record.ui, &mut out);

        let findings = out.0;
        ValidationReport {
            valid: !findings.iter().any(|f| f.severity == Severity::Error),
            completeness: self.checklist.score(record),
            findings,
        }
    }

    fn check_dublin_core(&self, record: &MicroSimRecord, out: &mut Findings) {
        let Some(dc) = &record.dublin_core else {
            out.required("", "dublinCore.title");
            out.required("", "dublinCore.description");
            return;
        };
        out.required_text("/dublinCore", "title", dc.title.as_deref());
        out.required_text("/dublinCore", "description", dc.description.as_deref());
        if let Some(date) = &dc.date {
            if !is_calendar_date(date) {
                out.push(
                    "/dublinCore/date",
                    FindingCode::FormatViolation,
                    format!("date `{date}` is not a YYYY-MM-DD calendar date"),
                );
            }
        }
        if let Some(lang) = &dc.language {
            if !is_language_tag(lang) {
                out.push(
                    "/dublinCore/language",
                    FindingCode::FormatViolation,
                    format!("`{lang}` is not a BCP-47 language tag"),
                );
            }
        }
        if let Some(identifier) = &dc.identifier {
            if let Ok(derived) = derive_record_id(record) {
                if identifier != derived.as_str() {
                    out.push(
                        "/dublinCore/identifier",
                        FindingCode::IdentifierMismatch,
                        format!("identifier `{identifier}` does not match derived id `{derived}`"),
                    );
                }
            }
        }
        if let Some(rights) = &dc.rights {
            if !LICENSES.contains(&rights.as_str()) {
                out.push(
                    "/dublinCore/rights",
                    FindingCode::CustomRights,
                    "rights is custom text, not a recognised license identifier".to_string(),
                );
            }
        }
        out.extensions("/dublinCore", &dc.extensions);
    }

    fn check_educational(&self, record: &MicroSimRecord, out: &mut Findings) {
        let Some(edu) = &record.educational else {
            out.required("", "educational.gradeLevels");
            out.required("", "educational.subjects");
            return;
        };
        if edu.grade_levels.is_empty() {
            out.required("/educational", "gradeLevels");
        }
        let mut seen = BTreeSet::new();
        for (i, grade) in edu.grade_levels.iter().enumerate() {
            let path = format!("/educational/gradeLevels/{i}");
            if !grade.is_known() {
                out.enum_violation(&path, "grade level", grade.as_str(), &crate::model::GradeLevel::expected());
            } else if !seen.insert(grade.clone()) {
                out.duplicate(&path, grade.as_str());
            }
        }

        if edu.subjects.is_empty() {
            out.required("/educational", "subjects");
        }
        let mut seen = BTreeSet::new();
        for (i, subject) in edu.subjects.iter().enumerate() {
            let path = format!("/educational/subjects/{i}");
            match self.vocabulary.normalize(subject) {
                Err(_) => out.push(&path, FindingCode::RequiredField, "subject is blank".into()),
                Ok(n) => {
                    if !n.recognized {
                        out.push(
                            &path,
                            FindingCode::UnknownTerm,
                            format!("subject `{}` is not in the subject vocabulary", n.canonical),
                        );
                    }
                    if !seen.insert(n.canonical.clone()) {
                        out.duplicate(&path, &n.canonical);
                    }
                }
            }
        }

        let mut seen = BTreeSet::new();
        for (i, level) in edu.bloom_levels.iter().enumerate() {
            let path = format!("/educational/bloomLevels/{i}");
            if !level.is_known() {
                out.enum_violation(&path, "Bloom level", level.as_str(), &crate::model::BloomLevel::expected());
            } else if !seen.insert(level.clone()) {
                out.duplicate(&path, level.as_str());
            }
        }

        for (i, standard) in edu.standards.iter().enumerate() {
            let path = format!("/educational/standards/{i}");
            match &standard.framework {
                None => out.required(&path, "framework"),
                Some(fw) if !fw.is_known() => out.enum_violation(
                    &format!("{path}/framework"),
                    "standards framework",
                    fw.as_str(),
                    &crate::model::StandardFramework::expected(),
                ),
                Some(_) => {}
            }
            out.required_text(&path, "code", standard.code.as_deref());
            out.extensions(&path, &standard.extensions);
        }

        if edu.duration_minutes == Some(0) {
            out.push(
                "/educational/durationMinutes",
                FindingCode::RangeViolation,
                "durationMinutes must be positive".into(),
            );
        }

        if let Some(load) = &edu.cognitive_load {
            for (name, level) in [
                ("intrinsic", &load.intrinsic),
                ("extraneous", &load.extraneous),
                ("germane", &load.germane),
            ] {
                if let Some(level) = level.as_ref().filter(|l| !l.is_known()) {
                    out.enum_violation(
                        &format!("/educational/cognitiveLoad/{name}"),
                        "cognitive load level",
                        level.as_str(),
                        &crate::model::LoadLevel::expected(),
                    );
                }
            }
            out.extensions("/educational/cognitiveLoad", &load.extensions);
        }
        out.extensions("/educational", &edu.extensions);
    }
}

fn check_technical(technical: Option<&TechnicalMeta>, out: &mut Findings) {
    let Some(tech) = technical else {
        out.required("", "technical.framework");
        return;
    };
    match &tech.framework {
        None => out.required("/technical", "framework"),
        Some(fw) if !fw.is_known() => out.push(
            "/technical/framework",
            FindingCode::UnknownTerm,
            format!(
                "framework `{fw}` is not in the framework vocabulary ({})",
                crate::model::Framework::expected()
            ),
        ),
        Some(_) => {}
    }
    for (name, value) in [
        ("canvasWidth", tech.canvas_width),
        ("drawHeight", tech.draw_height),
        ("controlHeight", tech.control_height),
        ("canvasHeight", tech.canvas_height),
    ] {
        if value == Some(0) {
            out.push(
                &format!("/technical/{name}"),
                FindingCode::RangeViolation,
                format!("{name} must be positive"),
            );
        }
    }
    if let (Some(canvas), Some(draw), Some(controls)) =
        (tech.canvas_height, tech.draw_height, tech.control_height)
    {
        let sum = u64::from(draw) + u64::from(controls);
        if u64::from(canvas) != sum {
            out.push(
                "/technical/canvasHeight",
                FindingCode::HeightMismatch,
                format!("canvasHeight {canvas} != drawHeight {draw} + controlHeight {controls} ({sum})"),
            );
        }
    }
    if let Some(layout) = tech.layout_type.as_ref().filter(|l| !l.is_known()) {
        out.enum_violation(
            "/technical/layoutType",
            "layout type",
            layout.as_str(),
            &crate::model::LayoutType::expected(),
        );
    }
    let mut seen = BTreeSet::new();
    for (i, device) in tech.device_compat.iter().enumerate() {
        let path = format!("/technical/deviceCompat/{i}");
        if !device.is_known() {
            out.enum_violation(&path, "device class", device.as_str(), &crate::model::DeviceClass::expected());
        } else if !seen.insert(device.clone()) {
            out.duplicate(&path, device.as_str());
        }
    }
    if let Some(fps) = tech.target_frame_rate {
        if !(fps > 0.0 && fps.is_finite()) {
            out.push(
                "/technical/targetFrameRate",
                FindingCode::RangeViolation,
                "targetFrameRate must be positive".into(),
            );
        }
    }
    out.extensions("/technical", &tech.extensions);
}

fn check_ui(controls: &[UiControl], out: &mut Findings) {
    let mut names = BTreeSet::new();
    for (i, control) in controls.iter().enumerate() {
        let path = format!("/ui/{i}");
        match control.name.as_deref() {
            None => out.required(&path, "name"),
            Some(name) if !is_identifier(name) => out.push(
                &format!("{path}/name"),
                FindingCode::FormatViolation,
                format!("control name `{name}` is not an identifier"),
            ),
            Some(name) => {
                if !names.insert(name) {
                    out.push(
                        &format!("{path}/name"),
                        FindingCode::DuplicateName,
                        format!("control name `{name}` is declared more than once"),
                    );
                }
            }
        }
        match &control.kind {
            None => out.required(&path, "kind"),
            Some(kind) if !kind.is_known() => out.enum_violation(
                &format!("{path}/kind"),
                "control kind",
                kind.as_str(),
                &ControlKind::expected(),
            ),
            Some(_) => {}
        }
        if control.is_slider() {
            check_slider(control, &path, out);
        }
        out.extensions(&path, &control.extensions);
    }
}

fn check_slider(control: &UiControl, path: &str, out: &mut Findings) {
    let (Some(min), Some(max)) = (control.min, control.max) else {
        if control.min.is_none() {
            out.required(path, "min");
        }
        if control.max.is_none() {
            out.required(path, "max");
        }
        return;
    };
    if min > max {
        out.push(
            path,
            FindingCode::RangeViolation,
            format!("slider min {min} exceeds max {max}"),
        );
    } else if let Some(default) = control.default_value {
        if default < min || default > max {
            out.push(
                &format!("{path}/defaultValue"),
                FindingCode::RangeViolation,
                format!("defaultValue {default} lies outside [{min}, {max}]"),
            );
        }
    }
    if let Some(step) = control.step {
        if step <= 0.0 {
            out.push(
                &format!("{path}/step"),
                FindingCode::RangeViolation,
                format!("step {step} must be positive"),
            );
        }
    }
}

fn check_model(model: &ModelSpec, out: &mut Findings) {
    let mut names = BTreeSet::new();
    for (i, var) in model.variables.iter().enumerate() {
        let path = format!("/model/variables/{i}");
        match var.name.as_deref() {
            None => out.required(&path, "name"),
            Some(name) => {
                if !names.insert(name) {
                    out.push(
                        &format!("{path}/name"),
                        FindingCode::DuplicateName,
                        format!("variable `{name}` is declared more than once"),
                    );
                }
            }
        }
        if let Some(role) = var.role.as_ref().filter(|r| !r.is_known()) {
            out.enum_violation(
                &format!("{path}/role"),
                "variable role",
                role.as_str(),
                &crate::model::VariableRole::expected(),
            );
        }
        if let Some(dt) = var.data_type.as_ref().filter(|d| !d.is_known()) {
            out.enum_violation(
                &format!("{path}/dataType"),
                "data type",
                dt.as_str(),
                &crate::model::DataType::expected(),
            );
        }
        if let Some(range) = var.range {
            if range.min > range.max {
                out.push(
                    &format!("{path}/range"),
                    FindingCode::RangeViolation,
                    format!("range min {} exceeds max {}", range.min, range.max),
                );
            }
        }
        out.extensions(&path, &var.extensions);
    }
    out.extensions("/model", &model.extensions);
}

fn check_analytics_spec(spec: &[EventSpec], ui: &[UiControl], out: &mut Findings) {
    let controls: BTreeSet<&str> = ui.iter().filter_map(|c| c.name.as_deref()).collect();
    for (i, event) in spec.iter().enumerate() {
        let path = format!("/analyticsSpec/{i}");
        match &event.event_type {
            None => out.required(&path, "eventType"),
            Some(t) if !t.is_known() => out.enum_violation(
                &format!("{path}/eventType"),
                "event type",
                t.as_str(),
                &crate::model::EventType::expected(),
            ),
            Some(_) => {}
        }
        if let Some(importance) = event.importance.as_ref().filter(|i| !i.is_known()) {
            out.enum_violation(
                &format!("{path}/importance"),
                "importance",
                importance.as_str(),
                &crate::model::Importance::expected(),
            );
        }
        if let Some(control) = &event.control_ref {
            if !controls.contains(control.as_str()) {
                out.push(
                    &format!("{path}/controlRef"),
                    FindingCode::DanglingRef,
                    format!("controlRef `{control}` names no declared UI control"),
                );
            }
        }
        out.extensions(&path, &event.extensions);
    }
}

#[derive(Default)]
struct Findings(Vec<ValidationFinding>);

impl Findings {
    fn push(&mut self, path: &str, code: FindingCode, message: String) {
        self.0.push(ValidationFinding {
            path: path.to_string(),
            code,
            severity: code.severity(),
            message,
        });
    }

    fn required(&mut self, parent: &str, field: &str) {
        self.push(
            parent,
            FindingCode::RequiredField,
            format!("required field `{field}` is missing"),
        );
    }

    fn required_text(&mut self, parent: &str, field: &str, value: Option<&str>) {
        match value {
            None => self.required(parent, field),
            Some(text) if text.trim().is_empty() => self.push(
                &format!("{parent}/{field}"),
                FindingCode::RequiredField,
                format!("required field `{field}` is blank"),
            ),
            Some(_) => {}
        }
    }

    fn enum_violation(&mut self, path: &str, what: &str, value: &str, expected: &str) {
        self.push(
            path,
            FindingCode::EnumViolation,
            format!("`{value}` is not a valid {what}; expected one of: {expected}"),
        );
    }

    fn duplicate(&mut self, path: &str, value: &str) {
        self.push(path, FindingCode::DuplicateEntry, format!("`{value}` is listed more than once"));
    }

    fn extensions(&mut self, parent: &str, extensions: &Extensions) {
        for key in extensions.keys() {
            self.push(
                &format!("{parent}/{}", escape_pointer(key)),
                FindingCode::UnknownField,
                format!("unknown field `{key}` preserved as an extension"),
            );
        }
    }
}

fn escape_pointer(segment: &str) -> String {
    segment.replace('~', "~0").replace('/', "~1")
}

fn is_calendar_date(text: &str) -> bool {
    text.len() == 10 && chrono::NaiveDate::parse_from_str(text, "%Y-%m-%d").is_ok()
}

fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Syntactic BCP-47 check: a 2-3 or 5-8 letter primary language subtag
/// (or `x`/`i` for private use and grandfathered tags) followed by subtags
/// of 1-8 alphanumerics.
fn is_language_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let Some(primary) = parts.next() else {
        return false;
    };
    let primary_ok = primary.chars().all(|c| c.is_ascii_alphabetic())
        && (matches!(primary.len(), 2 | 3 | 5..=8) || primary.eq_ignore_ascii_case("x") || primary.eq_ignore_ascii_case("i"));
    primary_ok
        && parts.all(|p| (1..=8).contains(&p.len()) && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

/// Validates `record` with the seed subject vocabulary and bundled checklist.
pub fn validate_record(record: &MicroSimRecord) -> ValidationReport {
    Validator::default().validate(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DublinCore, EducationalMeta, GradeLevel};

    fn minimal() -> MicroSimRecord {
        parse_record(
            br#"{
              "dublinCore": {"title": "Minimal", "description": "d"},
              "educational": {"gradeLevels": ["6"], "subjects": ["Physics"]},
              "technical": {"framework": "p5.js"}
            }"#,
        )
        .unwrap()
    }

    fn codes(report: &ValidationReport) -> Vec<(&str, FindingCode)> {
        report.findings.iter().map(|f| (f.path.as_str(), f.code)).collect()
    }

    #[test]
    fn minimal_record_is_valid() {
        let report = validate_record(&minimal());
        assert!(report.valid, "{:#?}", report.findings);
        assert!(report.findings.is_empty());
    }

    #[test]
    fn empty_record_lists_every_required_field() {
        let report = validate_record(&MicroSimRecord::default());
        assert!(!report.valid);
        assert_eq!(report.completeness, 0.0);
        let messages: Vec<&str> = report.findings.iter().map(|f| f.message.as_str()).collect();
        assert_eq!(report.findings.len(), 5, "{messages:?}");
        assert!(report.findings.iter().all(|f| f.code == FindingCode::RequiredField && f.path.is_empty()));
    }

    #[test]
    fn out_of_range_grade() {
        let mut record = minimal();
        record.educational.as_mut().unwrap().grade_levels = vec!["6".into(), "13".into()];
        let report = validate_record(&record);
        assert!(!report.valid);
        assert_eq!(codes(&report), vec![("/educational/gradeLevels/1", FindingCode::EnumViolation)]);
    }

    #[test]
    fn inverted_slider_range() {
        let mut record = minimal();
        record.ui = vec![UiControl {
            name: Some("speed".into()),
            kind: Some(ControlKind::Slider),
            min: Some(5.0),
            max: Some(2.0),
            ..Default::default()
        }];
        let report = validate_record(&record);
        assert_eq!(codes(&report), vec![("/ui/0", FindingCode::RangeViolation)]);
    }

    #[test]
    fn dangling_control_ref() {
        let mut record = minimal();
        record.ui = vec![UiControl {
            name: Some("speed".into()),
            kind: Some(ControlKind::Button),
            ..Default::default()
        }];
        record.analytics_spec = vec![
            EventSpec {
                event_type: Some("interaction".into()),
                control_ref: Some("speed".into()),
                ..Default::default()
            },
            EventSpec {
                event_type: Some("interaction".into()),
                control_ref: Some("gravity".into()),
                ..Default::default()
            },
        ];
        // oracle: set membership of controlRef in declared control names
        let declared: BTreeSet<&str> = record.ui.iter().filter_map(|c| c.name.as_deref()).collect();
        let expected: Vec<String> = record
            .analytics_spec
            .iter()
            .enumerate()
            .filter(|(_, e)| !declared.contains(e.control_ref.as_deref().unwrap()))
            .map(|(i, _)| format!("/analyticsSpec/{i}/controlRef"))
            .collect();
        let report = validate_record(&record);
        let got: Vec<String> = report
            .findings
            .iter()
            .filter(|f| f.code == FindingCode::DanglingRef)
            .map(|f| f.path.clone())
            .collect();
        assert_eq!(got, expected);
        assert!(!report.valid);
    }

    #[test]
    fn unknown_subject_is_only_a_warning() {
        let mut record = minimal();
        record.educational.as_mut().unwrap().subjects = vec!["Astrology".into(), "math".into(), "Mathematics".into()];
        let report = validate_record(&record);
        assert!(report.valid);
        assert_eq!(
            codes(&report),
            vec![
                ("/educational/subjects/0", FindingCode::UnknownTerm),
                ("/educational/subjects/2", FindingCode::DuplicateEntry),
            ]
        );
    }

    #[test]
    fn format_checks() {
        let mut record = minimal();
        let dc = record.dublin_core.as_mut().unwrap();
        dc.date = Some("2024-02-30".into());
        dc.language = Some("english!".into());
        dc.rights = Some("Ask the author".into());
        record.schema_version = Some("v1".into());
        let report = validate_record(&record);
        assert_eq!(
            codes(&report),
            vec![
                ("/schemaVersion", FindingCode::FormatViolation),
                ("/dublinCore/date", FindingCode::FormatViolation),
                ("/dublinCore/language", FindingCode::FormatViolation),
                ("/dublinCore/rights", FindingCode::CustomRights),
            ]
        );
    }

    #[test]
    fn identifier_must_match_derived_id() {
        let mut record = minimal();
        let id = derive_record_id(&record).unwrap();
        record.dublin_core.as_mut().unwrap().identifier = Some(id.to_string());
        assert!(validate_record(&record).findings.is_empty());
        record.dublin_core.as_mut().unwrap().identifier = Some("minimal-00000000".into());
        assert_eq!(
            codes(&validate_record(&record)),
            vec![("/dublinCore/identifier", FindingCode::IdentifierMismatch)]
        );
    }

    #[test]
    fn height_mismatch_is_a_warning() {
        let mut record = minimal();
        let tech = record.technical.as_mut().unwrap();
        tech.draw_height = Some(400);
        tech.control_height = Some(50);
        tech.canvas_height = Some(430);
        let report = validate_record(&record);
        assert!(report.valid);
        assert_eq!(codes(&report), vec![("/technical/canvasHeight", FindingCode::HeightMismatch)]);
    }

    #[test]
    fn extensions_produce_info() {
        let record = parse_record(
            br#"{"dublinCore": {"title": "T", "description": "d", "a/b": 1},
                 "educational": {"gradeLevels": ["K"], "subjects": ["Biology"]},
                 "technical": {"framework": "p5.js"}, "x": true}"#,
        )
        .unwrap();
        let report = validate_record(&record);
        assert!(report.valid);
        assert_eq!(
            codes(&report),
            vec![("/x", FindingCode::UnknownField), ("/dublinCore/a~1b", FindingCode::UnknownField)]
        );
    }

    #[test]
    fn every_enumeration_rejects_an_outsider() {
        let text = br#"{
          "dublinCore": {"title": "T", "description": "d"},
          "educational": {"gradeLevels": ["Preschool"], "subjects": ["Physics"], "bloomLevels": ["Memorize"],
            "standards": [{"framework": "AP", "code": "X"}],
            "cognitiveLoad": {"intrinsic": "Extreme"}},
          "technical": {"framework": "p5.js", "layoutType": "masonry", "deviceCompat": ["watch"]},
          "ui": [{"name": "a", "kind": "knob"}],
          "model": {"variables": [{"name": "v", "role": "hidden", "dataType": "complex"}]},
          "analyticsSpec": [{"eventType": "clicked", "importance": "urgent"}]
        }"#;
        let report = validate_record(&parse_record(text).unwrap());
        let paths: Vec<&str> = report
            .findings
            .iter()
            .filter(|f| f.code == FindingCode::EnumViolation)
            .map(|f| f.path.as_str())
            .collect();
        assert_eq!(
            paths,
            vec![
                "/educational/gradeLevels/0",
                "/educational/bloomLevels/0",
                "/educational/standards/0/framework",
                "/educational/cognitiveLoad/intrinsic",
                "/technical/layoutType",
                "/technical/deviceCompat/0",
                "/ui/0/kind",
                "/model/variables/0/role",
                "/model/variables/0/dataType",
                "/analyticsSpec/0/eventType",
                "/analyticsSpec/0/importance",
            ]
        );
    }

    #[test]
    fn structural_errors() {
        let text = br#"{
          "dublinCore": {"title": " ", "description": "d"},
          "educational": {"gradeLevels": ["6", "6"], "subjects": ["Physics"], "durationMinutes": 0,
            "standards": [{"code": ""}]},
          "technical": {"framework": "flash", "canvasWidth": 0, "targetFrameRate": -1},
          "ui": [{"name": "9lives", "kind": "slider", "min": 0, "max": 10, "defaultValue": 11, "step": 0},
                 {"name": "b", "kind": "slider"}],
          "model": {"variables": [{"name": "v", "range": {"min": 2, "max": 1}}, {"name": "v"}]}
        }"#;
        let report = validate_record(&parse_record(text).unwrap());
        assert_eq!(
            codes(&report),
            vec![
                ("/dublinCore/title", FindingCode::RequiredField),
                ("/educational/gradeLevels/1", FindingCode::DuplicateEntry),
                ("/educational/standards/0", FindingCode::RequiredField),
                ("/educational/standards/0/code", FindingCode::RequiredField),
                ("/educational/durationMinutes", FindingCode::RangeViolation),
                ("/technical/framework", FindingCode::UnknownTerm),
                ("/technical/canvasWidth", FindingCode::RangeViolation),
                ("/technical/targetFrameRate", FindingCode::RangeViolation),
                ("/ui/0/name", FindingCode::FormatViolation),
                ("/ui/0/defaultValue", FindingCode::RangeViolation),
                ("/ui/0/step", FindingCode::RangeViolation),
                ("/ui/1", FindingCode::RequiredField),
                ("/ui/1", FindingCode::RequiredField),
                ("/model/variables/0/range", FindingCode::RangeViolation),
                ("/model/variables/1/name", FindingCode::DuplicateName),
            ]
        );
    }

    #[test]
    fn language_tags() {
        for ok in ["en", "en-US", "zh-Hant-TW", "es-419", "x-private", "sgn-BE-FR"] {
            assert!(is_language_tag(ok), "{ok}");
        }
        for bad in ["", "e", "english-", "en_US", "en--US", "toolongprimary"] {
            assert!(!is_language_tag(bad), "{bad}");
        }
    }

    #[test]
    fn report_json_shape() {
        let report = validate_record(&MicroSimRecord {
            dublin_core: Some(DublinCore::default()),
            educational: Some(EducationalMeta {
                grade_levels: vec![GradeLevel::G6],
                ..Default::default()
            }),
            ..Default::default()
        });
        let value: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["completeness", "findings", "valid"]);
        let finding = value["findings"][0].as_object().unwrap();
        let keys: BTreeSet<&str> = finding.keys().map(String::as_str).collect();
        assert_eq!(keys, BTreeSet::from(["path", "code", "severity", "message"]));
        assert_eq!(value["findings"][0]["severity"], "error");
        assert_eq!(value["findings"][0]["code"], "REQUIRED_FIELD");
    }

    #[test]
    fn code_registry_is_unique() {
        let codes: BTreeSet<&str> = FindingCode::ALL.iter().map(|c| c.as_str()).collect();
        assert_eq!(codes.len(), FindingCode::ALL.len());
    }
}
