//! Facet names, queries and their query-string encoding.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::CatalogError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FacetName {
    GradeLevel,
    Subject,
    BloomLevel,
    StandardFramework,
    Framework,
    DeviceCompat,
    LayoutType,
    DurationBucket,
}

impl FacetName {
    pub const ALL: [FacetName; 8] = [
        FacetName::GradeLevel,
        FacetName::Subject,
        FacetName::BloomLevel,
        FacetName::StandardFramework,
        FacetName::Framework,
        FacetName::DeviceCompat,
        FacetName::LayoutType,
        FacetName::DurationBucket,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FacetName::GradeLevel => "gradeLevel",
            FacetName::Subject => "subject",
            FacetName::BloomLevel => "bloomLevel",
            FacetName::StandardFramework => "standardFramework",
            FacetName::Framework => "framework",
            FacetName::DeviceCompat => "deviceCompat",
            FacetName::LayoutType => "layoutType",
            FacetName::DurationBucket => "durationBucket",
        }
    }

    /// Short query-string parameter name.
    pub fn param(self) -> &'static str {
        match self {
            FacetName::GradeLevel => "grade",
            FacetName::Subject => "subject",
            FacetName::BloomLevel => "bloom",
            FacetName::StandardFramework => "standard",
            FacetName::Framework => "framework",
            FacetName::DeviceCompat => "device",
            FacetName::LayoutType => "layout",
            FacetName::DurationBucket => "duration",
        }
    }

    /// Accepts the facet name or its short parameter name.
    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        Self::ALL
            .into_iter()
            .find(|f| f.as_str() == text || f.param() == text)
            .ok_or_else(|| CatalogError::UnknownFacet(text.to_string()))
    }
}

impl fmt::Display for FacetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const DEFAULT_LIMIT: usize = 50;

/// Facet selections plus keywords: disjunction within a facet, conjunction
/// across facets and keyword tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FacetQuery {
    #[serde(default)]
    pub facet_selections: BTreeMap<FacetName, BTreeSet<String>>,
    #[serde(default)]
    pub keywords: String,
    #[serde(default = "default_limit")]
    pub limit: usize,
    #[serde(default)]
    pub offset: usize,
}

fn default_limit() -> usize {
    DEFAULT_LIMIT
}

impl Default for FacetQuery {
    fn default() -> Self {
        Self {
            facet_selections: BTreeMap::new(),
            keywords: String::new(),
            limit: DEFAULT_LIMIT,
            offset: 0,
        }
    }
}

impl FacetQuery {
    pub fn select<I, S>(mut self, facet: FacetName, values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.facet_selections
            .entry(facet)
            .or_default()
            .extend(values.into_iter().map(Into::into));
        self
    }

    pub fn keywords(mut self, keywords: &str) -> Self {
        self.keywords = keywords.to_string();
        self
    }

    pub fn page(mut self, limit: usize, offset: usize) -> Self {
        self.limit = limit;
        self.offset = offset;
        self
    }

    /// Parses `grade=9,10&subject=Chemistry&q=molecular+bonding&limit=50`.
    ///
    /// Commas separate values of one facet; repeated parameters merge.
    pub fn from_query_string(text: &str) -> Result<Self, CatalogError> {
        let mut query = FacetQuery::default();
        let mut keywords = Vec::new();
        for (key, value) in form_urlencoded::parse(text.trim_start_matches('?').as_bytes()) {
            match key.as_ref() {
                "q" => keywords.push(value.into_owned()),
                "limit" => query.limit = pagination("limit", &value)?,
                "offset" => query.offset = pagination("offset", &value)?,
                other => {
                    let facet = FacetName::parse(other)?;
                    let entry = query.facet_selections.entry(facet).or_default();
                    entry.extend(
                        value
                            .split(',')
                            .map(str::trim)
                            .filter(|v| !v.is_empty())
                            .map(str::to_string),
                    );
                }
            }
        }
        query.facet_selections.retain(|_, values| !values.is_empty());
        query.keywords = keywords.join(" ");
        if query.limit == 0 {
            return Err(CatalogError::Pagination("limit must be positive".into()));
        }
        Ok(query)
    }

    /// The inverse of [`FacetQuery::from_query_string`] (up to value order).
    pub fn to_query_string(&self) -> String {
        let mut out = form_urlencoded::Serializer::new(String::new());
        for (facet, values) in &self.facet_selections {
            if !values.is_empty() {
                let joined = values.iter().map(String::as_str).collect::<Vec<_>>().join(",");
                out.append_pair(facet.param(), &joined);
            }
        }
        if !self.keywords.trim().is_empty() {
            out.append_pair("q", &self.keywords);
        }
        out.append_pair("limit", &self.limit.to_string());
        out.append_pair("offset", &self.offset.to_string());
        out.finish()
    }
}

fn pagination(name: &str, value: &str) -> Result<usize, CatalogError> {
    value
        .trim()
        .parse()
        .map_err(|_| CatalogError::Pagination(format!("{name} must be a non-negative integer, got `{value}`")))
}
