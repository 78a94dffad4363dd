//! The MicroSim record data model.
//!
//! A record is a layered JSON document: Dublin Core cataloging fields,
//! educational metadata, technical requirements, UI controls, the simulation
//! model and the declared analytics events. All fields are optional at
//! the type level so that an incomplete or partially wrong document still
//! parses; the [`crate::validate`] module decides what is acceptable.
//!
//! Fields the schema does not know about are kept in the `extensions` bag of
//! the section they appear in and are written back unchanged.

mod embed;
mod enums;
mod identity;
mod vocabulary;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use embed::{escape_html, generate_embed, EmbedError, EmbedOptions, EmbedWidth};
pub use enums::{
    BloomLevel, ControlKind, DataType, DeviceClass, EventType, Framework, GradeLevel, Importance,
    LayoutType, LoadLevel, StandardFramework, VariableRole, LICENSES,
};
pub use identity::{canonical_bytes, canonical_json, derive_record_id, slugify, IdentityError, RecordId};
pub use vocabulary::{normalize_term, Normalization, VocabError, Vocabulary};

/// Unknown members of a JSON object, preserved for forward compatibility.
pub type Extensions = BTreeMap<String, Value>;

fn is_empty_map(map: &Extensions) -> bool {
    map.is_empty()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MicroSimRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dublin_core: Option<DublinCore>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub educational: Option<EducationalMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub technical: Option<TechnicalMeta>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ui: Vec<UiControl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub analytics_spec: Vec<EventSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<String>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extensions: Extensions,
}

impl MicroSimRecord {
    pub fn title(&self) -> Option<&str> {
        self.dublin_core.as_ref()?.title.as_deref()
    }

    pub fn description(&self) -> Option<&str> {
        self.dublin_core.as_ref()?.description.as_deref()
    }

    pub fn control(&self, name: &str) -> Option<&UiControl> {
        self.ui.iter().find(|c| c.name.as_deref() == Some(name))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DublinCore {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub creator: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subject: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub publisher: Option<String>,
    /// Calendar date, `YYYY-MM-DD`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<String>,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub resource_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identifier: Option<String>,
    /// BCP-47 language tag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relation: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rights: Option<String>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extensions: Extensions,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EducationalMeta {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grade_levels: Vec<GradeLevel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subjects: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub topics: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bloom_levels: Vec<BloomLevel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub standards: Vec<StandardRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prerequisites: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_minutes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cognitive_load: Option<CognitiveLoad>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extensions: Extensions,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CognitiveLoad {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intrinsic: Option<LoadLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extraneous: Option<LoadLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub germane: Option<LoadLevel>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extensions: Extensions,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StandardRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub framework: Option<StandardFramework>,
    /// Framework-specific code such as `HSA.REI.B.4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extensions: Extensions,
}

/// Canvas geometry and platform requirements. Dimensions are pixels.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TechnicalMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canvas_width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draw_height: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_height: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canvas_height: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub framework: Option<Framework>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub framework_version: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout_type: Option<LayoutType>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub browser_compat: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub device_compat: Vec<DeviceClass>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub accessibility_features: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_frame_rate: Option<f64>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extensions: Extensions,
}

impl TechnicalMeta {
    /// The stated canvas height, or the sum of the two regions when only
    /// those are given.
    pub fn effective_canvas_height(&self) -> Option<u32> {
        self.canvas_height.or_else(|| {
            self.draw_height
                .zip(self.control_height)
                .and_then(|(draw, controls)| draw.checked_add(controls))
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UiControl {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ControlKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extensions: Extensions,
}

impl UiControl {
    pub fn is_slider(&self) -> bool {
        self.kind == Some(ControlKind::Slider)
    }

    /// `(min, max)` for a slider with a non-empty range.
    pub fn slider_range(&self) -> Option<(f64, f64)> {
        if !self.is_slider() {
            return None;
        }
        match (self.min, self.max) {
            (Some(min), Some(max)) if min < max => Some((min, max)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub equations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assumptions: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub limitations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variables: Vec<ModelVariable>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extensions: Extensions,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelVariable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<VariableRole>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_type: Option<DataType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<ValueRange>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extensions: Extensions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EventSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_type: Option<EventType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub importance: Option<Importance>,
    /// Name of the [`UiControl`] this event reports on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_ref: Option<String>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extensions: Extensions,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_has_no_sections() {
        let record: MicroSimRecord = serde_json::from_str("{}").unwrap();
        assert_eq!(record, MicroSimRecord::default());
        assert_eq!(serde_json::to_string(&record).unwrap(), "{}");
    }

    #[test]
    fn unknown_fields_survive_round_trip() {
        let text = r#"{"dublinCore":{"title":"T","x-note":"keep"},"futureSection":{"a":1}}"#;
        let record: MicroSimRecord = serde_json::from_str(text).unwrap();
        let dc = record.dublin_core.as_ref().unwrap();
        assert_eq!(dc.extensions["x-note"], Value::from("keep"));
        assert!(record.extensions.contains_key("futureSection"));
        let back: Value = serde_json::to_value(&record).unwrap();
        let original: Value = serde_json::from_str(text).unwrap();
        assert_eq!(back, original);
    }

    #[test]
    fn effective_height_falls_back_to_region_sum() {
        let mut tech = TechnicalMeta {
            draw_height: Some(400),
            control_height: Some(50),
            ..Default::default()
        };
        assert_eq!(tech.effective_canvas_height(), Some(450));
        tech.canvas_height = Some(430);
        assert_eq!(tech.effective_canvas_height(), Some(430));
        tech.canvas_height = None;
        tech.control_height = None;
        assert_eq!(tech.effective_canvas_height(), None);
    }

    #[test]
    fn slider_range_requires_ordered_bounds() {
        let mut control = UiControl {
            kind: Some(ControlKind::Slider),
            min: Some(0.0),
            max: Some(20.0),
            ..Default::default()
        };
        assert_eq!(control.slider_range(), Some((0.0, 20.0)));
        control.max = Some(0.0);
        assert_eq!(control.slider_range(), None);
        control.kind = Some(ControlKind::Button);
        control.max = Some(20.0);
        assert_eq!(control.slider_range(), None);
    }
}
