//! Shared test support: a seeded random record generator and a linear-scan
//! search oracle that works on the records' raw JSON.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use microsim::catalog::{FacetName, FacetQuery};
use microsim::model::{derive_record_id, MicroSimRecord};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub const GRADES: [&str; 16] = [
    "K", "1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11", "12", "Undergraduate", "Graduate", "AdultEducation",
];
pub const BLOOMS: [&str; 6] = ["Remember", "Understand", "Apply", "Analyze", "Evaluate", "Create"];
pub const STANDARDS: [&str; 4] = ["CCSS", "NGSS", "ISTE", "Other"];
pub const FRAMEWORKS: [&str; 6] = ["p5.js", "vanilla", "vis-network", "vis-timeline", "chartjs", "mermaid"];
pub const DEVICES: [&str; 3] = ["desktop", "tablet", "phone"];
pub const LAYOUTS: [&str; 3] = ["fixed", "responsive-width", "two-column"];
pub const BUCKETS: [&str; 4] = ["≤5", "6-15", "16-30", ">30"];
pub const SUBJECTS: [&str; 7] =
    ["Mathematics", "Physics", "Chemistry", "Biology", "Computer Science", "Science", "Engineering"];
const SUBJECT_ALIASES: [(&str, &str); 3] = [("math", "Mathematics"), ("chem", "Chemistry"), ("cs", "Computer Science")];
const WORDS: [&str; 18] = [
    "ball", "wave", "molecular", "bonding", "graph", "orbit", "pendulum", "cell", "circuit", "sorting", "fraction",
    "spring", "gravity", "atom", "energy", "vector", "math", "CS",
];

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str], max: usize) -> Vec<&'a str> {
    let n = rng.gen_range(0..=max.min(items.len()));
    let mut chosen: Vec<&str> = items.choose_multiple(rng, n).copied().collect();
    chosen.sort();
    chosen
}

fn words(rng: &mut ChaCha8Rng, range: std::ops::RangeInclusive<usize>) -> String {
    let n = rng.gen_range(range);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

/// A random record that passes validation; `serial` keeps ids distinct.
pub fn random_record(rng: &mut ChaCha8Rng, serial: usize) -> MicroSimRecord {
    let title = {
        let mut t = words(rng, 1..=3);
        if let Some(first) = t.get_mut(0..1) {
            first.make_ascii_uppercase();
        }
        t
    };
    let description = format!("{}. Sim number {serial}.", words(rng, 3..=11));
    let mut grades = pick(rng, &GRADES, 4);
    if grades.is_empty() {
        grades.push(GRADES[rng.gen_range(0..GRADES.len())]);
    }
    let subject_pool = ["Mathematics", "Physics", "Chemistry", "Biology", "Computer Science", "Science", "math", "chem", "CS", "Engineering"];
    let mut subjects = pick(rng, &subject_pool, 3);
    if subjects.is_empty() {
        subjects.push(subject_pool[rng.gen_range(0..subject_pool.len())]);
    }
    let standards: Vec<Value> = pick(rng, &STANDARDS, 2)
        .into_iter()
        .map(|f| json!({"framework": f, "code": format!("X-{}", rng.gen_range(1..99))}))
        .collect();
    let mut educational = json!({
        "gradeLevels": grades,
        "subjects": subjects,
        "bloomLevels": pick(rng, &BLOOMS, 3),
        "topics": [words(rng, 2..=2)],
        "standards": standards,
    });
    if rng.gen_bool(0.85) {
        educational["durationMinutes"] = json!(rng.gen_range(1..60));
    }
    let mut technical = json!({
        "framework": FRAMEWORKS[rng.gen_range(0..FRAMEWORKS.len())],
        "deviceCompat": pick(rng, &DEVICES, 3),
    });
    if rng.gen_bool(0.7) {
        technical["layoutType"] = json!(LAYOUTS[rng.gen_range(0..LAYOUTS.len())]);
    }
    let value = json!({
        "dublinCore": {"title": title, "description": description},
        "educational": educational,
        "technical": technical,
    });
    let mut record: MicroSimRecord = serde_json::from_value(value).unwrap();
    let id = derive_record_id(&record).unwrap();
    record.dublin_core.as_mut().unwrap().identifier = Some(id.to_string());
    record
}

pub fn random_records(rng: &mut ChaCha8Rng, n: usize) -> Vec<MicroSimRecord> {
    (0..n).map(|i| random_record(rng, i)).collect()
}

/// The concrete grade 9-12 chemistry scenario.
pub fn chemistry_query() -> FacetQuery {
    FacetQuery::default()
        .select(FacetName::GradeLevel, ["9", "10", "11", "12"])
        .select(FacetName::Subject, ["Chemistry"])
        .select(FacetName::BloomLevel, ["Apply", "Analyze"])
        .select(FacetName::DeviceCompat, ["tablet"])
}

fn vary_case(rng: &mut ChaCha8Rng, s: &str) -> String {
    match rng.gen_range(0..3) {
        0 => s.to_lowercase(),
        1 => s.to_uppercase(),
        _ => s.to_string(),
    }
}

pub fn random_query(rng: &mut ChaCha8Rng) -> FacetQuery {
    let mut query = FacetQuery::default();
    let facets = FacetName::ALL;
    let n = rng.gen_range(0..=3);
    for facet in facets.choose_multiple(rng, n) {
        let universe: Vec<&str> = match facet {
            FacetName::GradeLevel => GRADES.to_vec(),
            FacetName::Subject => SUBJECTS.iter().copied().chain(["math", "chem", "CS", "Astronomy"]).collect(),
            FacetName::BloomLevel => BLOOMS.to_vec(),
            FacetName::StandardFramework => STANDARDS.to_vec(),
            FacetName::Framework => FRAMEWORKS.to_vec(),
            FacetName::DeviceCompat => DEVICES.to_vec(),
            FacetName::LayoutType => LAYOUTS.to_vec(),
            FacetName::DurationBucket => BUCKETS.iter().copied().chain(["<=5"]).collect(),
        };
        let n = rng.gen_range(1..=3);
        let values: Vec<String> = universe.choose_multiple(rng, n).map(|v| vary_case(rng, v)).collect();
        query = query.select(*facet, values);
    }
    if rng.gen_bool(0.5) {
        let mut kw = words(rng, 1..=2);
        if rng.gen_bool(0.1) {
            kw.push_str(" zebra");
        }
        query.keywords = vary_case(rng, &kw);
    }
    query.limit = rng.gen_range(1..=60);
    query.offset = if rng.gen_bool(0.7) { 0 } else { rng.gen_range(0..30) };
    query
}

// ---- oracle -------------------------------------------------------------

fn canonical_subject(s: &str) -> String {
    let lower = s.trim().to_lowercase();
    if let Some((_, c)) = SUBJECT_ALIASES.iter().find(|(a, _)| *a == lower) {
        return c.to_string();
    }
    SUBJECTS
        .iter()
        .find(|c| c.to_lowercase() == lower)
        .map_or_else(|| s.trim().to_string(), |c| c.to_string())
}

fn canonical_value(facet: FacetName, raw: &str) -> String {
    let list: &[&str] = match facet {
        FacetName::Subject => return canonical_subject(raw),
        FacetName::DurationBucket => return if raw.trim() == "<=5" { "≤5".into() } else { raw.trim().into() },
        FacetName::GradeLevel => &GRADES,
        FacetName::BloomLevel => &BLOOMS,
        FacetName::StandardFramework => &STANDARDS,
        FacetName::Framework => &FRAMEWORKS,
        FacetName::DeviceCompat => &DEVICES,
        FacetName::LayoutType => &LAYOUTS,
    };
    list.iter()
        .find(|v| v.eq_ignore_ascii_case(raw.trim()))
        .map_or_else(|| raw.trim().to_string(), |v| v.to_string())
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .map(|a| a.iter().filter_map(|x| x.as_str().map(str::to_string)).collect())
        .unwrap_or_default()
}

pub fn oracle_facets(record: &MicroSimRecord) -> BTreeMap<FacetName, BTreeSet<String>> {
    let v = serde_json::to_value(record).unwrap();
    let ed = &v["educational"];
    let tech = &v["technical"];
    let mut out: BTreeMap<FacetName, BTreeSet<String>> = BTreeMap::new();
    out.insert(FacetName::GradeLevel, strings(&ed["gradeLevels"]).into_iter().collect());
    out.insert(FacetName::Subject, strings(&ed["subjects"]).iter().map(|s| canonical_subject(s)).collect());
    out.insert(FacetName::BloomLevel, strings(&ed["bloomLevels"]).into_iter().collect());
    out.insert(
        FacetName::StandardFramework,
        ed["standards"]
            .as_array()
            .into_iter()
            .flatten()
            .filter_map(|s| s["framework"].as_str().map(str::to_string))
            .collect(),
    );
    out.insert(FacetName::Framework, tech["framework"].as_str().map(str::to_string).into_iter().collect());
    out.insert(FacetName::DeviceCompat, strings(&tech["deviceCompat"]).into_iter().collect());
    out.insert(FacetName::LayoutType, tech["layoutType"].as_str().map(str::to_string).into_iter().collect());
    let bucket = ed["durationMinutes"].as_u64().map(|m| {
        if m <= 5 {
            "≤5"
        } else if m <= 15 {
            "6-15"
        } else if m <= 30 {
            "16-30"
        } else {
            ">30"
        }
    });
    out.insert(FacetName::DurationBucket, bucket.map(str::to_string).into_iter().collect());
    out
}

fn oracle_tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| canonical_subject(t).to_lowercase())
        .collect()
}

/// (title count, other count) for `term` in `record`.
pub fn oracle_tf(record: &MicroSimRecord, term: &str) -> (u64, u64) {
    let v = serde_json::to_value(record).unwrap();
    let count = |text: &str| oracle_tokens(text).iter().filter(|t| *t == term).count() as u64;
    let title = v["dublinCore"]["title"].as_str().map_or(0, count);
    let mut other = v["dublinCore"]["description"].as_str().map_or(0, count);
    for s in strings(&v["educational"]["subjects"]) {
        other += count(&s);
        let phrase = canonical_subject(&s).to_lowercase();
        if phrase.contains(' ') && phrase == term {
            other += 1;
        }
    }
    for t in strings(&v["educational"]["topics"]) {
        other += count(&t);
    }
    (title, other)
}

#[derive(Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub hits: Vec<(String, u64)>,
    pub total: usize,
    pub facet_counts: BTreeMap<FacetName, BTreeMap<String, usize>>,
}

fn matches(
    facets: &BTreeMap<FacetName, BTreeSet<String>>,
    selections: &BTreeMap<FacetName, BTreeSet<String>>,
    skip: Option<FacetName>,
) -> bool {
    selections
        .iter()
        .filter(|(f, _)| Some(**f) != skip)
        .all(|(f, wanted)| wanted.iter().any(|w| facets[f].contains(w)))
}

/// Linear scan over every record.
pub fn oracle_search(records: &[MicroSimRecord], query: &FacetQuery) -> OracleResult {
    let selections: BTreeMap<FacetName, BTreeSet<String>> = query
        .facet_selections
        .iter()
        .filter(|(_, vs)| !vs.is_empty())
        .map(|(f, vs)| (*f, vs.iter().map(|v| canonical_value(*f, v)).collect()))
        .collect();
    let terms: BTreeSet<String> = oracle_tokens(&query.keywords).into_iter().collect();
    let rows: Vec<(String, BTreeMap<FacetName, BTreeSet<String>>, Vec<(u64, u64)>)> = records
        .iter()
        .map(|r| {
            let id = r.dublin_core.as_ref().unwrap().identifier.clone().unwrap();
            let tfs = terms.iter().map(|t| oracle_tf(r, t)).collect();
            (id, oracle_facets(r), tfs)
        })
        .collect();
    let has_terms = |tfs: &Vec<(u64, u64)>| tfs.iter().all(|(a, b)| a + b > 0);

    let mut hits: Vec<(String, u64)> = rows
        .iter()
        .filter(|(_, f, tfs)| matches(f, &selections, None) && has_terms(tfs))
        .map(|(id, _, tfs)| (id.clone(), tfs.iter().map(|(t, o)| 3 * t + o).sum()))
        .collect();
    hits.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let total = hits.len();
    let hits = hits.into_iter().skip(query.offset).take(query.limit).collect();

    let mut facet_counts = BTreeMap::new();
    for facet in FacetName::ALL {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for (_, f, tfs) in &rows {
            if matches(f, &selections, Some(facet)) && has_terms(tfs) {
                for v in &f[&facet] {
                    *counts.entry(v.clone()).or_default() += 1;
                }
            }
        }
        for v in selections.get(&facet).into_iter().flatten() {
            counts.entry(v.clone()).or_insert(0);
        }
        facet_counts.insert(facet, counts);
    }
    OracleResult {
        hits,
        total,
        facet_counts,
    }
}
