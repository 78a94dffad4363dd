//! Controlled vocabularies with case-insensitive synonym folding.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VocabError {
    #[error("term is empty after trimming")]
    EmptyTerm,
    #[error("alias `{alias}` maps to `{target}`, which is not a canonical term")]
    DanglingAlias { alias: String, target: String },
    #[error("alias `{alias}` is claimed by both `{first}` and `{second}`")]
    ConflictingAlias {
        alias: String,
        first: String,
        second: String,
    },
    #[error("vocabulary file: {0}")]
    Format(String),
}

/// Outcome of [`normalize_term`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Normalization {
    pub canonical: String,
    pub was_alias: bool,
    /// `false` when the term is neither canonical nor a registered alias;
    /// `canonical` then holds the trimmed input.
    pub recognized: bool,
}

/// A closed set of canonical terms plus alias → canonical mappings.
///
/// Lookups fold case and surrounding whitespace. The on-disk form is a JSON
/// object `{ "Canonical": ["alias", ...] }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    canonical: BTreeSet<String>,
    synonyms: BTreeMap<String, String>,
    // lowercase key → canonical spelling, covering canonicals and aliases
    folded: BTreeMap<String, (String, bool)>,
}

impl Vocabulary {
    pub fn new<C, A>(canonical: C, synonyms: A) -> Result<Self, VocabError>
    where
        C: IntoIterator,
        C::Item: Into<String>,
        A: IntoIterator<Item = (String, String)>,
    {
        let canonical: BTreeSet<String> = canonical.into_iter().map(Into::into).collect();
        let mut folded = BTreeMap::new();
        for term in &canonical {
            folded.insert(fold(term), (term.clone(), false));
        }
        let mut synonyms_map = BTreeMap::new();
        for (alias, target) in synonyms {
            if !canonical.contains(&target) {
                return Err(VocabError::DanglingAlias { alias, target });
            }
            let key = fold(&alias);
            if let Some((existing, _)) = folded.get(&key) {
                if existing != &target {
                    return Err(VocabError::ConflictingAlias {
                        alias,
                        first: existing.clone(),
                        second: target,
                    });
                }
                continue;
            }
            folded.insert(key, (target.clone(), true));
            synonyms_map.insert(alias, target);
        }
        Ok(Self {
            canonical,
            synonyms: synonyms_map,
            folded,
        })
    }

    /// The subject vocabulary shipped with the registry.
    pub fn seed_subjects() -> Self {
        let canon = [
            "Mathematics",
            "Physics",
            "Chemistry",
            "Biology",
            "Computer Science",
            "Science",
            "Engineering",
        ];
        let aliases = [("math", "Mathematics"), ("chem", "Chemistry"), ("CS", "Computer Science")];
        Self::new(
            canon,
            aliases.iter().map(|(a, c)| (a.to_string(), c.to_string())),
        )
        .expect("seed vocabulary is consistent")
    }

    /// Parses the `{canonical: [aliases...]}` file form.
    pub fn from_json(text: &str) -> Result<Self, VocabError> {
        let map: BTreeMap<String, Vec<String>> =
            serde_json::from_str(text).map_err(|e| VocabError::Format(e.to_string()))?;
        let canonical: Vec<String> = map.keys().cloned().collect();
        let synonyms = map
            .into_iter()
            .flat_map(|(canon, aliases)| aliases.into_iter().map(move |a| (a, canon.clone())));
        Self::new(canonical, synonyms)
    }

    pub fn to_json(&self) -> String {
        let mut map: BTreeMap<&str, Vec<&str>> =
            self.canonical.iter().map(|c| (c.as_str(), Vec::new())).collect();
        for (alias, target) in &self.synonyms {
            map.entry(target.as_str()).or_default().push(alias.as_str());
        }
        serde_json::to_string_pretty(&map).expect("vocabulary serializes")
    }

    /// Adds terms and aliases from `other`, rejecting alias conflicts.
    pub fn extend(&self, other: &Vocabulary) -> Result<Self, VocabError> {
        let canonical = self.canonical.iter().chain(&other.canonical).cloned();
        let synonyms = self
            .synonyms
            .iter()
            .chain(&other.synonyms)
            .map(|(a, c)| (a.clone(), c.clone()));
        Self::new(canonical, synonyms)
    }

    pub fn canonical_terms(&self) -> impl Iterator<Item = &str> {
        self.canonical.iter().map(String::as_str)
    }

    pub fn synonyms(&self) -> impl Iterator<Item = (&str, &str)> {
        self.synonyms.iter().map(|(a, c)| (a.as_str(), c.as_str()))
    }

    pub fn contains(&self, term: &str) -> bool {
        self.folded.contains_key(&fold(term))
    }

    /// Maps a term to its canonical form; see [`normalize_term`].
    pub fn normalize(&self, term: &str) -> Result<Normalization, VocabError> {
        let trimmed = term.trim();
        if trimmed.is_empty() {
            return Err(VocabError::EmptyTerm);
        }
        Ok(match self.folded.get(&fold(trimmed)) {
            Some((canonical, was_alias)) => Normalization {
                canonical: canonical.clone(),
                was_alias: *was_alias,
                recognized: true,
            },
            None => Normalization {
                canonical: trimmed.to_string(),
                was_alias: false,
                recognized: false,
            },
        })
    }

    /// Canonical form when recognised, otherwise the trimmed input.
    pub fn canonicalize(&self, term: &str) -> String {
        match self.normalize(term) {
            Ok(n) => n.canonical,
            Err(_) => term.trim().to_string(),
        }
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::seed_subjects()
    }
}

fn fold(term: &str) -> String {
    term.trim().to_lowercase()
}

/// Maps `term` to its canonical form under `vocab`, matching canonical terms
/// and aliases case-insensitively after trimming.
pub fn normalize_term(term: &str, vocab: &Vocabulary) -> Result<Normalization, VocabError> {
    vocab.normalize(term)
}
