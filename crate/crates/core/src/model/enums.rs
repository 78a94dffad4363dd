//! Closed enumerations used by the record schema.
//!
//! Every enumeration carries an `Other` variant holding the raw text so an
//! out-of-vocabulary value survives parsing and can be reported by the
//! validator at its exact location instead of failing the whole document.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

macro_rules! closed_enum {
    (
        $(#[$meta:meta])*
        $name:ident { $($variant:ident => $text:literal),+ $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant,)+
            /// A value outside the enumeration, kept verbatim.
            Other(String),
        }

        impl $name {
            /// Every known value, in declaration order.
            pub const KNOWN: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &str {
                match self {
                    $($name::$variant => $text,)+
                    $name::Other(raw) => raw,
                }
            }

            pub fn is_known(&self) -> bool {
                !matches!(self, $name::Other(_))
            }

            /// Case-insensitive lookup; `None` when the text names no known value.
            pub fn parse_ci(text: &str) -> Option<Self> {
                let text = text.trim();
                Self::KNOWN
                    .iter()
                    .find(|v| v.as_str().eq_ignore_ascii_case(text))
                    .cloned()
            }

            /// Comma-separated list of the known values, for messages.
            pub fn expected() -> String {
                Self::KNOWN.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(", ")
            }
        }

        impl From<&str> for $name {
            fn from(text: &str) -> Self {
                match text {
                    $($text => $name::$variant,)+
                    other => $name::Other(other.to_string()),
                }
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let raw = String::deserialize(deserializer)?;
                Ok($name::from(raw.as_str()))
            }
        }
    };
}

closed_enum! {
    /// K-12 grades plus post-secondary bands.
    GradeLevel {
        K => "K",
        G1 => "1",
        G2 => "2",
        G3 => "3",
        G4 => "4",
        G5 => "5",
        G6 => "6",
        G7 => "7",
        G8 => "8",
        G9 => "9",
        G10 => "10",
        G11 => "11",
        G12 => "12",
        Undergraduate => "Undergraduate",
        Graduate => "Graduate",
        AdultEducation => "AdultEducation",
    }
}

closed_enum! {
    /// Bloom's taxonomy cognitive levels.
    BloomLevel {
        Remember => "Remember",
        Understand => "Understand",
        Apply => "Apply",
        Analyze => "Analyze",
        Evaluate => "Evaluate",
        Create => "Create",
    }
}

closed_enum! {
    StandardFramework {
        Ccss => "CCSS",
        Ngss => "NGSS",
        Iste => "ISTE",
        Unlisted => "Other",
    }
}

closed_enum! {
    LoadLevel {
        Low => "Low",
        Medium => "Medium",
        High => "High",
    }
}

closed_enum! {
    /// Rendering framework a simulation is built on.
    Framework {
        P5 => "p5.js",
        Vanilla => "vanilla",
        VisNetwork => "vis-network",
        VisTimeline => "vis-timeline",
        ChartJs => "chartjs",
        Mermaid => "mermaid",
    }
}

closed_enum! {
    LayoutType {
        Fixed => "fixed",
        ResponsiveWidth => "responsive-width",
        TwoColumn => "two-column",
    }
}

closed_enum! {
    DeviceClass {
        Desktop => "desktop",
        Tablet => "tablet",
        Phone => "phone",
    }
}

closed_enum! {
    ControlKind {
        Slider => "slider",
        Button => "button",
        Checkbox => "checkbox",
        Select => "select",
        Radio => "radio",
        Unspecified => "other",
    }
}

closed_enum! {
    VariableRole {
        Input => "input",
        Output => "output",
        Intermediate => "intermediate",
        Constant => "constant",
    }
}

closed_enum! {
    DataType {
        Number => "number",
        Integer => "integer",
        Boolean => "boolean",
        Text => "text",
    }
}

closed_enum! {
    /// Interaction event taxonomy; doubles as the statement verb set.
    EventType {
        Interaction => "interaction",
        Navigation => "navigation",
        Learning => "learning",
        Performance => "performance",
        Engagement => "engagement",
        Error => "error",
    }
}

closed_enum! {
    Importance {
        High => "high",
        Medium => "medium",
        Low => "low",
    }
}

/// Licenses recognised in `dublinCore.rights`; anything else is custom text.
pub const LICENSES: &[&str] = &[
    "CC0-1.0",
    "CC-BY-4.0",
    "CC-BY-SA-4.0",
    "CC-BY-NC-4.0",
    "CC-BY-NC-SA-4.0",
    "CC-BY-ND-4.0",
    "CC-BY-NC-ND-4.0",
    "MIT",
    "Apache-2.0",
    "BSD-3-Clause",
    "GPL-3.0-only",
    "Public Domain",
];
