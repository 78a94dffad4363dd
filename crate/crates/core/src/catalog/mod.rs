//! Faceted inverted index over validated records.

pub mod query;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    derive_record_id, BloomLevel, DeviceClass, Framework, GradeLevel, IdentityError, LayoutType, MicroSimRecord,
    RecordId, StandardFramework, Vocabulary,
};

pub use query::{FacetName, FacetQuery, DEFAULT_LIMIT};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("duplicate record id `{0}`")]
    DuplicateId(RecordId),
    #[error("no record with id `{0}`")]
    UnknownId(RecordId),
    #[error("unknown facet `{0}`")]
    UnknownFacet(String),
    #[error("pagination: {0}")]
    Pagination(String),
    #[error(transparent)]
    Identity(#[from] IdentityError),
}

pub const DURATION_BUCKETS: [&str; 4] = ["≤5", "6-15", "16-30", ">30"];

pub fn duration_bucket(minutes: u32) -> &'static str {
    match minutes {
        0..=5 => DURATION_BUCKETS[0],
        6..=15 => DURATION_BUCKETS[1],
        16..=30 => DURATION_BUCKETS[2],
        _ => DURATION_BUCKETS[3],
    }
}

/// The id a record is indexed under: its declared identifier when that is a
/// well-formed id, otherwise the derived one.
pub fn record_id(record: &MicroSimRecord) -> Result<RecordId, IdentityError> {
    match record
        .dublin_core
        .as_ref()
        .and_then(|dc| dc.identifier.as_deref())
        .map(RecordId::parse)
    {
        Some(Ok(id)) => Ok(id),
        _ => derive_record_id(record),
    }
}

/// Facet values a record is posted under.
pub fn facet_values(record: &MicroSimRecord, vocab: &Vocabulary) -> BTreeMap<FacetName, BTreeSet<String>> {
    let mut out: BTreeMap<FacetName, BTreeSet<String>> = BTreeMap::new();
    let mut add = |facet: FacetName, value: &str| {
        if !value.trim().is_empty() {
            out.entry(facet).or_default().insert(value.to_string());
        }
    };
    if let Some(ed) = &record.educational {
        for g in &ed.grade_levels {
            add(FacetName::GradeLevel, g.as_str());
        }
        for s in &ed.subjects {
            add(FacetName::Subject, &vocab.canonicalize(s));
        }
        for b in &ed.bloom_levels {
            add(FacetName::BloomLevel, b.as_str());
        }
        for s in &ed.standards {
            if let Some(f) = &s.framework {
                add(FacetName::StandardFramework, f.as_str());
            }
        }
        if let Some(minutes) = ed.duration_minutes {
            add(FacetName::DurationBucket, duration_bucket(minutes));
        }
    }
    if let Some(t) = &record.technical {
        if let Some(f) = &t.framework {
            add(FacetName::Framework, f.as_str());
        }
        for d in &t.device_compat {
            add(FacetName::DeviceCompat, d.as_str());
        }
        if let Some(l) = &t.layout_type {
            add(FacetName::LayoutType, l.as_str());
        }
    }
    out
}

/// Canonical spelling of a query value for `facet`.
pub fn normalize_facet_value(facet: FacetName, value: &str, vocab: &Vocabulary) -> String {
    fn known<T>(parsed: Option<T>, as_str: impl Fn(&T) -> &str, raw: &str) -> String {
        parsed.map_or_else(|| raw.to_string(), |v| as_str(&v).to_string())
    }
    let raw = value.trim();
    match facet {
        FacetName::GradeLevel => known(GradeLevel::parse_ci(raw), GradeLevel::as_str, raw),
        FacetName::Subject => vocab.canonicalize(raw),
        FacetName::BloomLevel => known(BloomLevel::parse_ci(raw), BloomLevel::as_str, raw),
        FacetName::StandardFramework => known(StandardFramework::parse_ci(raw), StandardFramework::as_str, raw),
        FacetName::Framework => known(Framework::parse_ci(raw), Framework::as_str, raw),
        FacetName::DeviceCompat => known(DeviceClass::parse_ci(raw), DeviceClass::as_str, raw),
        FacetName::LayoutType => known(LayoutType::parse_ci(raw), LayoutType::as_str, raw),
        FacetName::DurationBucket => match raw {
            "<=5" => DURATION_BUCKETS[0].to_string(),
            _ => raw.to_string(),
        },
    }
}

/// Lowercased, punctuation-split, vocabulary-normalized terms of `text`.
pub fn text_terms(text: &str, vocab: &Vocabulary) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| vocab.canonicalize(t).to_lowercase())
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TermFrequency {
    pub title: u32,
    pub other: u32,
}

impl TermFrequency {
    pub fn score(self) -> u64 {
        3 * u64::from(self.title) + u64::from(self.other)
    }
}

/// Term frequencies of one record, split into title and everything else.
pub fn record_terms(record: &MicroSimRecord, vocab: &Vocabulary) -> BTreeMap<String, TermFrequency> {
    let mut out: BTreeMap<String, TermFrequency> = BTreeMap::new();
    if let Some(title) = record.title() {
        for t in text_terms(title, vocab) {
            out.entry(t).or_default().title += 1;
        }
    }
    let mut other = |text: &str| {
        for t in text_terms(text, vocab) {
            out.entry(t).or_default().other += 1;
        }
    };
    if let Some(d) = record.description() {
        other(d);
    }
    if let Some(ed) = &record.educational {
        for s in &ed.subjects {
            other(s);
        }
        for t in &ed.topics {
            other(t);
        }
    }
    // multi-word subjects are also searchable as one phrase, so an alias
    // such as "CS" finds "Computer Science"
    if let Some(ed) = &record.educational {
        for s in &ed.subjects {
            let phrase = vocab.canonicalize(s).to_lowercase();
            if phrase.contains(|c: char| !c.is_alphanumeric()) {
                out.entry(phrase).or_default().other += 1;
            }
        }
    }
    out
}

pub type FacetPostings = BTreeMap<FacetName, BTreeMap<String, BTreeSet<RecordId>>>;
pub type TextPostings = BTreeMap<String, BTreeMap<RecordId, TermFrequency>>;

#[derive(Debug, Clone)]
pub struct CatalogIndex {
    records: BTreeMap<RecordId, MicroSimRecord>,
    facet_postings: FacetPostings,
    text_postings: TextPostings,
    generation: u64,
    vocab: Vocabulary,
}

impl Default for CatalogIndex {
    fn default() -> Self {
        Self::new(Vocabulary::default())
    }
}

#[derive(Debug, Clone)]
pub enum IndexUpdate {
    Upsert(MicroSimRecord),
    Remove(RecordId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Hit {
    pub id: RecordId,
    pub score: u64,
    pub title: String,
    pub snippet: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchResult {
    pub hits: Vec<Hit>,
    /// Matching records before paging.
    pub total: usize,
    pub facet_counts: BTreeMap<FacetName, BTreeMap<String, usize>>,
    pub generation: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FacetValueCount {
    pub value: String,
    pub total_count: usize,
}

const SNIPPET_CHARS: usize = 160;

pub fn snippet(record: &MicroSimRecord) -> String {
    let text = record.description().unwrap_or("").trim();
    match text.char_indices().nth(SNIPPET_CHARS) {
        Some((cut, _)) => format!("{}...", text[..cut].trim_end()),
        None => text.to_string(),
    }
}

/// Indexes `records` with the seed subject vocabulary.
pub fn build_index(records: impl IntoIterator<Item = MicroSimRecord>) -> Result<CatalogIndex, CatalogError> {
    CatalogIndex::build(records, Vocabulary::default())
}

impl CatalogIndex {
    pub fn new(vocab: Vocabulary) -> Self {
        Self {
            records: BTreeMap::new(),
            facet_postings: BTreeMap::new(),
            text_postings: BTreeMap::new(),
            generation: 0,
            vocab,
        }
    }

    pub fn build(records: impl IntoIterator<Item = MicroSimRecord>, vocab: Vocabulary) -> Result<Self, CatalogError> {
        let mut index = Self::new(vocab);
        for record in records {
            let id = record_id(&record)?;
            if index.records.contains_key(&id) {
                return Err(CatalogError::DuplicateId(id));
            }
            index.post(&id, &record);
            index.records.insert(id, record);
        }
        Ok(index)
    }

    pub fn records(&self) -> &BTreeMap<RecordId, MicroSimRecord> {
        &self.records
    }

    pub fn get(&self, id: &RecordId) -> Option<&MicroSimRecord> {
        self.records.get(id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn facet_postings(&self) -> &FacetPostings {
        &self.facet_postings
    }

    pub fn text_postings(&self) -> &TextPostings {
        &self.text_postings
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Same records and postings, ignoring the generation counter.
    pub fn same_postings(&self, other: &CatalogIndex) -> bool {
        self.records.keys().eq(other.records.keys())
            && self.facet_postings == other.facet_postings
            && self.text_postings == other.text_postings
    }

    fn post(&mut self, id: &RecordId, record: &MicroSimRecord) {
        for (facet, values) in facet_values(record, &self.vocab) {
            let by_value = self.facet_postings.entry(facet).or_default();
            for v in values {
                by_value.entry(v).or_default().insert(id.clone());
            }
        }
        for (term, tf) in record_terms(record, &self.vocab) {
            self.text_postings.entry(term).or_default().insert(id.clone(), tf);
        }
    }

    fn unpost(&mut self, id: &RecordId, record: &MicroSimRecord) {
        for (facet, values) in facet_values(record, &self.vocab) {
            let Some(by_value) = self.facet_postings.get_mut(&facet) else {
                continue;
            };
            for v in values {
                if let Some(ids) = by_value.get_mut(&v) {
                    ids.remove(id);
                    if ids.is_empty() {
                        by_value.remove(&v);
                    }
                }
            }
            if by_value.is_empty() {
                self.facet_postings.remove(&facet);
            }
        }
        for term in record_terms(record, &self.vocab).into_keys() {
            if let Some(ids) = self.text_postings.get_mut(&term) {
                ids.remove(id);
                if ids.is_empty() {
                    self.text_postings.remove(&term);
                }
            }
        }
    }

    /// Applies one change and returns the new generation.
    pub fn update(&mut self, update: IndexUpdate) -> Result<u64, CatalogError> {
        match update {
            IndexUpdate::Upsert(record) => {
                let id = record_id(&record)?;
                if let Some(old) = self.records.remove(&id) {
                    self.unpost(&id, &old);
                }
                self.post(&id, &record);
                self.records.insert(id, record);
            }
            IndexUpdate::Remove(id) => {
                let old = self.records.remove(&id).ok_or_else(|| CatalogError::UnknownId(id.clone()))?;
                self.unpost(&id, &old);
            }
        }
        self.generation += 1;
        Ok(self.generation)
    }

    fn normalized_selections(&self, query: &FacetQuery) -> BTreeMap<FacetName, BTreeSet<String>> {
        query
            .facet_selections
            .iter()
            .filter(|(_, values)| !values.is_empty())
            .map(|(facet, values)| {
                let normalized = values
                    .iter()
                    .filter(|v| !v.trim().is_empty())
                    .map(|v| normalize_facet_value(*facet, v, &self.vocab))
                    .collect();
                (*facet, normalized)
            })
            .collect()
    }

    /// Ids passing every facet selection except `skip`'s, and containing every keyword term.
    fn candidates(
        &self,
        selections: &BTreeMap<FacetName, BTreeSet<String>>,
        terms: &BTreeSet<String>,
        skip: Option<FacetName>,
    ) -> BTreeSet<&RecordId> {
        let mut set: BTreeSet<&RecordId> = self.records.keys().collect();
        for (facet, values) in selections {
            if Some(*facet) == skip {
                continue;
            }
            let postings = self.facet_postings.get(facet);
            let allowed: BTreeSet<&RecordId> = values
                .iter()
                .filter_map(|v| postings.and_then(|p| p.get(v)))
                .flatten()
                .collect();
            set.retain(|id| allowed.contains(id));
        }
        for term in terms {
            match self.text_postings.get(term) {
                Some(ids) => set.retain(|id| ids.contains_key(*id)),
                None => set.clear(),
            }
        }
        set
    }

    pub fn search(&self, query: &FacetQuery) -> Result<SearchResult, CatalogError> {
        if query.limit == 0 {
            return Err(CatalogError::Pagination("limit must be positive".into()));
        }
        let selections = self.normalized_selections(query);
        let terms: BTreeSet<String> = text_terms(&query.keywords, &self.vocab).into_iter().collect();

        let matched = self.candidates(&selections, &terms, None);
        let mut scored: Vec<(u64, &RecordId)> = matched
            .iter()
            .map(|id| {
                let score = terms
                    .iter()
                    .filter_map(|t| self.text_postings.get(t).and_then(|ids| ids.get(*id)))
                    .map(|tf| tf.score())
                    .sum();
                (score, *id)
            })
            .collect();
        scored.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        let total = scored.len();
        let hits = scored
            .into_iter()
            .skip(query.offset)
            .take(query.limit)
            .map(|(score, id)| {
                let record = &self.records[id];
                Hit {
                    id: id.clone(),
                    score,
                    title: record.title().unwrap_or("").to_string(),
                    snippet: snippet(record),
                }
            })
            .collect();

        let mut facet_counts = BTreeMap::new();
        for facet in FacetName::ALL {
            let pool = if selections.contains_key(&facet) {
                self.candidates(&selections, &terms, Some(facet))
            } else {
                matched.clone()
            };
            let mut counts = BTreeMap::new();
            if let Some(by_value) = self.facet_postings.get(&facet) {
                for (value, ids) in by_value {
                    let n = ids.iter().filter(|id| pool.contains(id)).count();
                    if n > 0 {
                        counts.insert(value.clone(), n);
                    }
                }
            }
            for selected in selections.get(&facet).into_iter().flatten() {
                counts.entry(selected.clone()).or_insert(0);
            }
            facet_counts.insert(facet, counts);
        }

        Ok(SearchResult {
            hits,
            total,
            facet_counts,
            generation: self.generation,
        })
    }

    /// Every facet value with its record count, most common first.
    pub fn list_facets(&self) -> BTreeMap<FacetName, Vec<FacetValueCount>> {
        self.facet_postings
            .iter()
            .map(|(facet, by_value)| {
                let mut values: Vec<FacetValueCount> = by_value
                    .iter()
                    .map(|(value, ids)| FacetValueCount {
                        value: value.clone(),
                        total_count: ids.len(),
                    })
                    .collect();
                values.sort_by(|a, b| b.total_count.cmp(&a.total_count).then_with(|| a.value.cmp(&b.value)));
                (*facet, values)
            })
            .collect()
    }
}

/// Applies one change to `index`, returning the new generation.
pub fn update_index(index: &mut CatalogIndex, update: IndexUpdate) -> Result<u64, CatalogError> {
    index.update(update)
}

pub fn search(index: &CatalogIndex, query: &FacetQuery) -> Result<SearchResult, CatalogError> {
    index.search(query)
}

pub fn list_facets(index: &CatalogIndex) -> BTreeMap<FacetName, Vec<FacetValueCount>> {
    index.list_facets()
}
