//! Seeded property suites for invariants beyond the acceptance gate:
//! determinism across reparsing, template instantiation versus projection,
//! query result ordering and completeness, declaration-order independence
//! of numbering, merge idempotence, and store IO round-trips.

mod common;

use std::collections::BTreeMap;

use pci::annotation::{instantiate_template, load_store, save_store, CvCatalog, Filler};
use pci::graph::{ConceptualGraph, GraphKind};
use pci::projection::{answer_query, project};
use pci::vocabulary::VocabularyBuilder;
use rand::prelude::*;

#[test]
fn projection_is_stable_across_reparsing() {
    let data = common::bundled();
    let v = &data.vocabulary;
    let pool = common::GraphPool::from_vocabulary(v);
    let mut rng = common::rng(11);

    for _ in 0..200 {
        let target = common::random_graph(&mut rng, &pool, GraphKind::Narrative, 1, 6, 2);
        let query = if rng.random_bool(0.5) {
            common::query_from_target(&mut rng, v, &target)
        } else {
            common::random_graph(&mut rng, &pool, GraphKind::Topical, 0, 4, 2)
        };
        let direct = project(&query, &target, v).expect("pool types are known");
        let query2 = ConceptualGraph::parse(&query.serialize()).expect("own output parses");
        let target2 = ConceptualGraph::parse(&target.serialize()).expect("own output parses");
        let reparsed = project(&query2, &target2, v).expect("pool types are known");
        let left: Vec<String> = direct.iter().map(|m| m.to_string()).collect();
        let right: Vec<String> = reparsed.iter().map(|m| m.to_string()).collect();
        assert_eq!(left, right, "projection differs after a round trip");
    }
}

#[test]
fn templates_project_into_their_instances() {
    let data = common::bundled();
    let v = &data.vocabulary;
    let mut catalog = CvCatalog::new();
    for cv in data.controlled {
        catalog.add(cv).expect("bundled names are distinct");
    }
    let mut rng = common::rng(12);
    let words = ["sami", "herding", "duodji", "joik"];

    for _ in 0..100 {
        let template = data.templates.choose(&mut rng).expect("four templates");
        let mut fills = BTreeMap::new();
        for slot in template.slots.keys() {
            if rng.random_bool(0.4) {
                continue; // leave this slot generic
            }
            let word = *words.choose(&mut rng).expect("non-empty");
            let filler = if rng.random_bool(0.5) {
                Filler::free(word)
            } else {
                Filler::tagged(word, common::lang("eng"))
            };
            fills.insert(slot.clone(), filler);
        }
        let instance = instantiate_template(template, &fills, &catalog).expect("slots exist");
        let mappings = project(&template.graph, &instance, v).expect("bundled types");
        assert!(
            !mappings.is_empty(),
            "template {} no longer projects into its own instance",
            template.template_id
        );
    }
}

#[test]
fn query_results_are_ordered_and_complete() {
    let data = common::bundled();
    let v = &data.vocabulary;
    let mut catalog = CvCatalog::new();
    for cv in data.controlled {
        catalog.add(cv).expect("bundled names are distinct");
    }
    let pool = common::GraphPool::from_vocabulary(v);
    let valid = common::ValidPool::from_vocabulary(v);
    let mut rng = common::rng(13);

    for _ in 0..150 {
        let store = common::random_store(&mut rng, &valid, v, &catalog);
        let query = common::random_graph(&mut rng, &pool, GraphKind::Topical, 1, 3, 1);
        let results = answer_query(&query, &store, v).expect("pool types are known");

        for pair in results.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let ordered = b.mappings.len() < a.mappings.len()
                || (b.mappings.len() == a.mappings.len() && a.annotation_id < b.annotation_id);
            assert!(ordered, "results out of order: {} then {}", a.annotation_id, b.annotation_id);
        }
        for r in &results {
            assert!(!r.mappings.is_empty(), "a zero-match annotation was returned");
        }
        let returned: Vec<&str> = results.iter().map(|r| r.annotation_id.as_str()).collect();
        for annotation in store.annotations() {
            let count = project(&query, &annotation.graph, v).expect("pool types are known").len();
            let listed = returned.contains(&annotation.annotation_id.as_str());
            assert_eq!(
                listed,
                count > 0,
                "annotation {} misreported (count {count})",
                annotation.annotation_id
            );
        }
    }
}

#[test]
fn numbering_ignores_declaration_order() {
    let mut rng = common::rng(14);

    for _ in 0..100 {
        let n = rng.random_range(2..=30);
        let mut decls: Vec<(String, Vec<String>)> = Vec::new();
        for i in 1..n {
            let parent = rng.random_range(0..i);
            decls.push((format!("K{i}"), vec![format!("K{parent}")]));
        }
        let build = |decls: &[(String, Vec<String>)]| {
            let mut b = VocabularyBuilder::new("K0");
            for (label, parents) in decls {
                b.concept(label, parents.iter().cloned());
            }
            b.relation("Links", 2, Vec::<&str>::new());
            b.nesting("Topic", Vec::<&str>::new());
            b.build().expect("rooted and acyclic").serialize()
        };
        let ordered = build(&decls);
        decls.shuffle(&mut rng);
        let shuffled = build(&decls);
        assert_eq!(ordered, shuffled, "identifier assignment depends on declaration order");
    }
}

#[test]
fn coreferent_merge_is_idempotent_and_monotone() {
    let data = common::bundled();
    let v = &data.vocabulary;
    let pool = common::GraphPool::from_vocabulary(v);
    let mut rng = common::rng(15);

    for _ in 0..200 {
        let g = common::random_graph(&mut rng, &pool, GraphKind::Topical, 0, 6, 2);
        let merged = g.merge_coreferent();
        assert!(merged.node_count() <= g.node_count());
        assert_eq!(merged.edges().len(), g.edges().len(), "merge must not drop edges");
        assert_eq!(
            merged.serialize(),
            merged.merge_coreferent().serialize(),
            "merge is not idempotent"
        );
        // A merge never invents types: the merged graph still checks the
        // same way against the vocabulary (modulo node identity).
        let before = g.check_well_formed(v).error_count();
        let after = merged.check_well_formed(v).error_count();
        assert!(after <= before, "merge introduced well-formedness errors");
    }
}

#[test]
fn stores_survive_the_filesystem() {
    let data = common::bundled();
    let v = &data.vocabulary;
    let mut catalog = CvCatalog::new();
    for cv in data.controlled {
        catalog.add(cv).expect("bundled names are distinct");
    }
    let valid = common::ValidPool::from_vocabulary(v);
    let mut rng = common::rng(16);
    let dir = tempfile::tempdir().expect("temp dir");

    for i in 0..50 {
        let store = common::random_store(&mut rng, &valid, v, &catalog);
        let path = dir.path().join(format!("store{i}.pci"));
        save_store(&store, &path).expect("writable");
        let loaded = load_store(&path).expect("own file loads");
        assert_eq!(store.serialize(), loaded.serialize(), "store changed across the filesystem");
    }
}

#[test]
fn bundled_lint_stays_advisory() {
    let data = common::bundled();
    let lint = data.vocabulary.lint_labels();
    assert_eq!(lint.error_count(), 0, "bundled labels must never lint as errors");
}
