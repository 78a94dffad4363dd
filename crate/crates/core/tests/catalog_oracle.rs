mod common;

use common::*;
use microsim::catalog::{build_index, record_id, FacetName, FacetQuery, IndexUpdate};
use microsim::validate::validate_record;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check(index: &microsim::catalog::CatalogIndex, records: &[microsim::model::MicroSimRecord], query: &FacetQuery) {
    let got = index.search(query).unwrap();
    let want = oracle_search(records, query);
    let hits: Vec<(String, u64)> = got.hits.iter().map(|h| (h.id.to_string(), h.score)).collect();
    assert_eq!(hits, want.hits, "{query:?}");
    assert_eq!(got.total, want.total, "{query:?}");
    assert_eq!(got.facet_counts, want.facet_counts, "{query:?}");
}

#[test]
fn random_corpus_records_are_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for record in random_records(&mut rng, 200) {
        let report = validate_record(&record);
        assert!(report.valid, "{}", report.to_json());
    }
}

#[test]
fn search_matches_linear_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let records = random_records(&mut rng, 200);
    let index = build_index(records.clone()).unwrap();
    check(&index, &records, &chemistry_query());
    check(&index, &records, &chemistry_query().keywords("molecular bonding"));
    for _ in 0..500 {
        check(&index, &records, &random_query(&mut rng));
    }
}

#[test]
fn chemistry_scenario_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let records = random_records(&mut rng, 20);
    let index = build_index(records.clone()).unwrap();
    let got = index.search(&chemistry_query()).unwrap();
    let expected: Vec<String> = records
        .iter()
        .filter(|r| {
            let f = oracle_facets(r);
            ["9", "10", "11", "12"].iter().any(|g| f[&FacetName::GradeLevel].contains(*g))
                && f[&FacetName::Subject].contains("Chemistry")
                && ["Apply", "Analyze"].iter().any(|b| f[&FacetName::BloomLevel].contains(*b))
                && f[&FacetName::DeviceCompat].contains("tablet")
        })
        .map(|r| record_id(r).unwrap().to_string())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let ids: Vec<String> = got.hits.iter().map(|h| h.id.to_string()).collect();
    assert_eq!(ids, expected);
}

#[test]
fn empty_query_returns_everything() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let records = random_records(&mut rng, 30);
    let index = build_index(records).unwrap();
    let result = index.search(&FacetQuery::default().page(100, 0)).unwrap();
    assert_eq!(result.total, 30);
    assert!(result.hits.iter().all(|h| h.score == 0));
    assert!(result.hits.windows(2).all(|w| w[0].id < w[1].id));
}

#[test]
fn random_updates_match_rebuild() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pool = random_records(&mut rng, 120);
    let mut index = build_index(Vec::new()).unwrap();
    let mut live = std::collections::BTreeMap::new();
    for _ in 0..1000 {
        let record = pool[rng.gen_range(0..pool.len())].clone();
        let id = record_id(&record).unwrap();
        if live.contains_key(&id) && rng.gen_bool(0.4) {
            index.update(IndexUpdate::Remove(id.clone())).unwrap();
            live.remove(&id);
        } else {
            index.update(IndexUpdate::Upsert(record.clone())).unwrap();
            live.insert(id, record);
        }
    }
    assert_eq!(index.generation(), 1000);
    let rebuilt = build_index(live.into_values()).unwrap();
    assert!(index.same_postings(&rebuilt));
    assert_eq!(index.facet_postings(), rebuilt.facet_postings());
    assert_eq!(index.text_postings(), rebuilt.text_postings());
}

fn corpus(seed: u64) -> (Vec<microsim::model::MicroSimRecord>, microsim::catalog::CatalogIndex) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = random_records(&mut rng, 60);
    let index = build_index(records.clone()).unwrap();
    (records, index)
}

fn hit_set(index: &microsim::catalog::CatalogIndex, q: &FacetQuery) -> std::collections::BTreeSet<String> {
    let mut q = q.clone();
    q.limit = usize::MAX;
    q.offset = 0;
    index.search(&q).unwrap().hits.into_iter().map(|h| h.id.to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn widening_a_facet_never_shrinks_and_adding_one_never_grows(seed in 0u64..8, qseed in any::<u64>()) {
        let (_, index) = corpus(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(qseed);
        let base = random_query(&mut rng);
        let extra = random_query(&mut rng);
        let before = hit_set(&index, &base);
        for (facet, values) in &extra.facet_selections {
            let mut q = base.clone();
            let added_new_facet = !q.facet_selections.contains_key(facet);
            q.facet_selections.entry(*facet).or_default().extend(values.iter().cloned());
            let after = hit_set(&index, &q);
            if added_new_facet {
                prop_assert!(after.is_subset(&before));
            } else {
                prop_assert!(before.is_subset(&after));
            }
        }
    }

    #[test]
    fn facet_counts_predict_totals(seed in 0u64..8, qseed in any::<u64>()) {
        let (_, index) = corpus(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(qseed);
        let mut base = random_query(&mut rng);
        base.offset = 0;
        let result = index.search(&base).unwrap();
        for (facet, counts) in &result.facet_counts {
            if base.facet_selections.contains_key(facet) {
                continue;
            }
            for (value, count) in counts {
                let q = base.clone().select(*facet, [value.clone()]);
                prop_assert_eq!(index.search(&q).unwrap().total, *count);
            }
        }
    }
}
