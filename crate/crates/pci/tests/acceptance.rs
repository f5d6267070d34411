//! Acceptance gate: seven behavioural criteria with stated runtime budgets.
//!
//! Each criterion is one test that prints a single `PASS` line with its
//! measured runtime; budgets are asserted, so a slow regression fails the
//! gate just like a wrong answer. Random criteria run on fixed ChaCha8
//! seeds and are fully reproducible.

mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use pci::annotation::{AnnotationStore, CvCatalog};
use pci::graph::{ConceptualGraph, GraphKind};
use pci::projection::{count_projections_oracle, project, verify_mapping};
use pci::vocabulary::Vocabulary;
use rand::prelude::*;

fn pass(name: &str, budget: Duration, start: Instant) {
    let elapsed = start.elapsed();
    assert!(elapsed <= budget, "{name} exceeded its runtime budget: {elapsed:?} > {budget:?}");
    println!("PASS {name} in {elapsed:?} (budget {budget:?})");
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn corpus_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample/corpus.pci")
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pci"))
}

#[test]
fn criterion_1_structural_fidelity() {
    let start = Instant::now();
    let data = common::bundled();
    let v = &data.vocabulary;
    let children = |label: &str| {
        let id = v.concept_by_label(label).expect("bundled theme").id;
        v.children(id).expect("known theme").len()
    };

    assert_eq!(children(v.root_label()), 3, "top-level concept taxemes");
    assert_eq!(children("Discourse Description"), 5);
    assert_eq!(children("World_PCI"), 13);

    let relation_root = v.relations().find(|r| r.parents.is_empty()).expect("single relation root");
    assert_eq!(v.children(relation_root.id).expect("known").len(), 3, "relation taxemes");
    let situating = v.relation_by_label("Situating Relation").expect("bundled relation");
    assert_eq!(v.children(situating.id).expect("known").len(), 10);
    let narrative = v.relation_by_label("Narrative Relation").expect("bundled relation");
    assert_eq!(v.children(narrative.id).expect("known").len(), 2);

    assert_eq!(v.nestings().count(), 1, "nesting types");
    assert_eq!(data.templates.len(), 4, "template groups");
    let groups: BTreeSet<_> = data.templates.iter().map(|t| t.group).collect();
    assert_eq!(groups.len(), 4, "template groups are pairwise distinct");

    pass("criterion 1 (structural fidelity)", Duration::from_secs(1), start);
}

#[test]
fn criterion_2_oracle_equivalence() {
    let start = Instant::now();
    let data = common::bundled();
    let v = &data.vocabulary;
    let pool = common::GraphPool::from_vocabulary(v);
    let mut rng = common::rng(0x5eed_0002);

    let mut positives = 0;
    for case in 0..1_000 {
        let target = common::random_graph(&mut rng, &pool, GraphKind::Narrative, 1, 6, 2);
        // Half the queries are derived from the target (guaranteed to
        // project), half are independent (likely negative); the oracle must
        // agree on both.
        let query = if case % 2 == 0 {
            common::query_from_target(&mut rng, v, &target)
        } else {
            common::random_graph(&mut rng, &pool, GraphKind::Topical, 0, 4, 2)
        };
        let mappings = project(&query, &target, v).expect("pool types are known");
        let slow = count_projections_oracle(&query, &target, v)
            .expect("generator respects the oracle's level limit");
        assert_eq!(
            mappings.len() as u64,
            slow,
            "case {case}: search and oracle disagree\nquery:\n{}\ntarget:\n{}",
            query.serialize(),
            target.serialize()
        );
        for mapping in &mappings {
            verify_mapping(&query, &target, v, mapping)
                .expect("every search result is label-preserving");
        }
        if !mappings.is_empty() {
            positives += 1;
        }
    }
    assert!(positives >= 400, "only {positives} of 1000 pairs projected; generator degenerated");

    pass("criterion 2 (oracle equivalence, 1000 pairs)", Duration::from_secs(60), start);
}

#[test]
#[allow(clippy::needless_range_loop)] // index pairs (i, j, k) over one matrix read best as indices
fn criterion_3_subsumption_laws() {
    let start = Instant::now();
    let mut rng = common::rng(0x5eed_0003);

    for case in 0..200 {
        let random = common::random_vocabulary(&mut rng, 50);
        let v = &random.vocabulary;
        let n = random.ids.len();

        let mut holds = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                holds[i][j] = v.subsumes(random.ids[i], random.ids[j]).expect("same kind");
                assert_eq!(
                    holds[i][j],
                    common::brute_force_subsumes(&random.parents, i, j),
                    "case {case}: subsumes(K{i}, K{j}) disagrees with brute force"
                );
            }
        }
        for i in 0..n {
            assert!(holds[i][i], "case {case}: reflexivity fails at K{i}");
            for j in 0..n {
                if holds[i][j] && holds[j][i] {
                    assert_eq!(i, j, "case {case}: antisymmetry fails at K{i}, K{j}");
                }
                if !holds[i][j] {
                    continue;
                }
                for k in 0..n {
                    if holds[j][k] {
                        assert!(
                            holds[i][k],
                            "case {case}: transitivity fails at K{i} <= K{j} <= K{k}"
                        );
                    }
                }
            }
        }
    }

    pass("criterion 3 (subsumption laws, 200 DAGs)", Duration::from_secs(30), start);
}

#[test]
fn criterion_4_round_trips() {
    let start = Instant::now();
    let data = common::bundled();
    let v = &data.vocabulary;
    let mut catalog = CvCatalog::new();
    for cv in data.controlled {
        catalog.add(cv).expect("bundled names are distinct");
    }

    // Golden files parse and re-serialize byte-identically.
    let vocab_text = std::fs::read_to_string(golden("vocabulary.pci")).expect("golden exists");
    let parsed = Vocabulary::parse(&vocab_text).expect("golden vocabulary parses");
    assert_eq!(vocab_text, parsed.serialize(), "vocabulary golden drifted");

    let graph_text = std::fs::read_to_string(golden("graph.cg")).expect("golden exists");
    let parsed = ConceptualGraph::parse(&graph_text).expect("golden graph parses");
    assert_eq!(graph_text, parsed.serialize(), "graph golden drifted");

    for store_file in [golden("store.pci"), corpus_path()] {
        let store_text = std::fs::read_to_string(&store_file).expect("golden exists");
        let parsed = AnnotationStore::parse(&store_text).expect("golden store parses");
        assert_eq!(
            store_text,
            parsed.serialize(),
            "store golden drifted: {}",
            store_file.display()
        );
    }

    // Random instances survive serialize -> parse structurally (and the
    // canonical form is a fixed point).
    let mut rng = common::rng(0x5eed_0004);
    let pool = common::GraphPool::from_vocabulary(v);
    let valid = common::ValidPool::from_vocabulary(v);

    for _ in 0..200 {
        let graph = common::random_graph(&mut rng, &pool, GraphKind::Narrative, 0, 6, 2);
        let text = graph.serialize();
        let back = ConceptualGraph::parse(&text).expect("own output parses");
        assert_eq!(graph, back, "graph changed across the round trip");
        assert_eq!(text, back.serialize(), "graph text is not a fixed point");
    }

    for _ in 0..150 {
        let random = common::random_vocabulary(&mut rng, 50);
        let text = random.vocabulary.serialize();
        let back = Vocabulary::parse(&text).expect("own output parses");
        assert_eq!(text, back.serialize(), "vocabulary text is not a fixed point");
        assert_eq!(random.vocabulary.concepts().count(), back.concepts().count());
    }

    for _ in 0..150 {
        let store = common::random_store(&mut rng, &valid, v, &catalog);
        let text = store.serialize();
        let back = AnnotationStore::parse(&text).expect("own output parses");
        assert_eq!(store.asset_count(), back.asset_count());
        assert_eq!(store.annotation_count(), back.annotation_count());
        assert_eq!(text, back.serialize(), "store text is not a fixed point");
    }

    pass("criterion 4 (round trips, 4 goldens + 500 random)", Duration::from_secs(30), start);
}

/// The corpus's hand-enumerated expected sets: every annotation whose topic
/// holds a Social-Group-subsumed node, ordered by descending match count
/// then id, and the three segments annotated with the individual
/// [Minority: walachians].
const SOCIAL_GROUP_EXPECTED: [&str; 21] = [
    "a04", "a13", "a22", "a23", "a01", "a02", "a03", "a05", "a06", "a07", "a09", "a10", "a11",
    "a12", "a14", "a15", "a17", "a18", "a19", "a20", "a21",
];
const WALACHIANS_EXPECTED: [&str; 3] = ["a09", "a10", "a15"];

fn run_query(store: &Path, query_file: &Path) -> Vec<String> {
    let out =
        cli().args(["query", "--store"]).arg(store).arg(query_file).output().expect("binary runs");
    assert!(out.status.success(), "query failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout)
        .expect("utf-8 output")
        .lines()
        .map(|line| {
            let mut parts = line.split(' ');
            assert_eq!(parts.next(), Some("match"), "unexpected line: {line}");
            parts.next().expect("annotation id").to_string()
        })
        .collect()
}

#[test]
fn criterion_5_indexing_end_to_end() {
    let start = Instant::now();
    let dir = tempfile::tempdir().expect("temp dir");
    let store = dir.path().join("store.pci");

    let out = cli()
        .args(["ingest", "--store"])
        .arg(&store)
        .arg(corpus_path())
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "ingest of the sample corpus must exit 0: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let group_query = dir.path().join("group.cg");
    std::fs::write(&group_query, "graph topical\nnode n1 [T-32: *]\n").expect("writable");
    let ids = run_query(&store, &group_query);
    assert_eq!(ids, SOCIAL_GROUP_EXPECTED, "[Social Group: *] result set or order drifted");

    let walachians_query = dir.path().join("walachians.cg");
    std::fs::write(&walachians_query, "graph topical\nnode n1 [T-34: \"walachians\"]\n")
        .expect("writable");
    let ids = run_query(&store, &walachians_query);
    assert_eq!(ids, WALACHIANS_EXPECTED, "[Minority: walachians] result set drifted");

    pass("criterion 5 (indexing workflow end-to-end)", Duration::from_secs(5), start);
}

#[test]
fn criterion_6_obligation_enforcement() {
    let start = Instant::now();
    let dir = tempfile::tempdir().expect("temp dir");
    let store = dir.path().join("store.pci");

    // An interview segment whose narrative graph never says what it is
    // about: the Discourse-Type node lacks its topic nesting.
    let bad = "pci-store v1\n\
               asset clip 60000 \"media/clip.mkv\"\n\
               annotation a01 clip 0 10000\n  graph narrative\n    node n1 [T-15: *]\n  endgraph\n";
    let bad_file = dir.path().join("bad.pci");
    std::fs::write(&bad_file, bad).expect("writable");

    let out =
        cli().args(["ingest", "--store"]).arg(&store).arg(&bad_file).output().expect("binary runs");
    assert_eq!(out.status.code(), Some(1), "rejection must exit 1");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("discourse-type node lacks a Discourse Topic nesting"),
        "rejection must name the obligation: {stdout}"
    );
    assert!(!store.exists(), "a rejected batch must not write the store");

    pass("criterion 6 (obligation enforcement)", Duration::from_secs(5), start);
}

#[test]
fn criterion_7_monotonicity() {
    let start = Instant::now();
    let data = common::bundled();
    let v = &data.vocabulary;
    let pool = common::GraphPool::from_vocabulary(v);
    let mut rng = common::rng(0x5eed_0007);

    let mut cases = 0;
    let mut matching_before = 0;
    while cases < 500 {
        let target = common::random_graph(&mut rng, &pool, GraphKind::Narrative, 1, 6, 2);
        let query = if cases % 2 == 0 {
            common::query_from_target(&mut rng, v, &target)
        } else {
            common::random_graph(&mut rng, &pool, GraphKind::Topical, 1, 4, 2)
        };
        if query.is_empty() {
            continue;
        }
        let types = common::node_types_deep(&query);
        let candidates: Vec<usize> = (0..types.len())
            .filter(|&i| !common::strict_ancestors(v, types[i]).is_empty())
            .collect();
        let Some(&seq) = candidates.choose(&mut rng) else {
            continue; // every query node is already the root type
        };
        let ancestors = common::strict_ancestors(v, types[seq]);
        let general = *ancestors.choose(&mut rng).expect("candidate has ancestors");
        let generalized = common::rebuild_replacing(&query, seq, general);

        let before = project(&query, &target, v).expect("pool types are known").len();
        let after = project(&generalized, &target, v).expect("pool types are known").len();
        assert!(
            after >= before,
            "generalizing {} to {general} lost matches ({before} -> {after})\nquery:\n{}\ntarget:\n{}",
            types[seq],
            query.serialize(),
            target.serialize()
        );
        if before > 0 {
            matching_before += 1;
        }
        cases += 1;
    }
    assert!(
        matching_before >= 200,
        "only {matching_before} of 500 cases matched before generalizing; generator degenerated"
    );

    pass("criterion 7 (monotonicity, 500 cases)", Duration::from_secs(30), start);
}
