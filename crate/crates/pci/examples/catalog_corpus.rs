//! Load the sample corpus, run projection queries over it, and print the
//! catalogue: totals, per-group counts, and per-theme coverage.
//!
//! The corpus under `data/sample/corpus.pci` is generated by the
//! `build_sample_corpus` example: three field-recording assets and
//! twenty-four annotated segments spanning all four discourse-topic groups.
//!
//! Run with: `cargo run -p pci --example catalog_corpus`

use std::collections::BTreeMap;

use pci::annotation::{catalog, AnnotationStore, CvCatalog};
use pci::graph::{ConceptualGraph, GraphKind, KeywordSource, Lang, Referent};
use pci::pci_data;
use pci::projection::answer_query;

fn main() {
    let data = pci_data::load_bundled().expect("bundled data is self-consistent");
    let v = &data.vocabulary;
    let mut cvs = CvCatalog::new();
    for cv in data.controlled {
        cvs.add(cv).expect("bundled names are distinct");
    }

    let text = include_str!("../data/sample/corpus.pci");
    let store = AnnotationStore::parse(text).expect("corpus is well formed");
    assert!(!store.validate(v, &cvs).has_errors());
    println!(
        "loaded {} annotations across {} assets",
        store.annotation_count(),
        store.asset_count()
    );

    // Querying is projection per annotation: a single generic node asks
    // "which segments mention any social group, at any nesting depth?".
    let mut group_query = ConceptualGraph::new(GraphKind::Topical);
    group_query.add_concept(
        v.concept_by_label("Social Group").expect("bundled theme").id,
        Referent::Generic,
    );
    let results = answer_query(&group_query, &store, v).expect("types are known");
    println!("\n[Social Group: *] matches {} segments; the busiest:", results.len());
    for r in results.iter().take(4) {
        println!("  {}", r.summary_line());
    }

    // An individual referent narrows to one keyword.
    let mut walachians = ConceptualGraph::new(GraphKind::Topical);
    walachians.add_concept(
        v.concept_by_label("Minority").expect("bundled theme").id,
        Referent::Individual {
            keyword: "walachians".into(),
            language: None,
            source: KeywordSource::Free,
        },
    );
    let results = answer_query(&walachians, &store, v).expect("types are known");
    println!("\n[Minority: walachians] matches:");
    for r in &results {
        println!("  {}", r.summary_line());
    }

    // A whole template graph works as a query too: its generic slots are
    // just generic nodes.
    let intangible = data
        .templates
        .iter()
        .find(|t| t.template_id == "intangible-heritage")
        .expect("bundled template");
    let results = answer_query(&intangible.graph, &store, v).expect("types are known");
    let ids: Vec<&str> = results.iter().map(|r| r.annotation_id.as_str()).collect();
    println!("\nintangible-heritage template as query: {}", ids.join(", "));

    // The catalogue summarizes the whole store: each annotation counts
    // toward the first group whose template projects into it, and toward
    // every top-level world theme its topic nodes specialize.
    let summary = catalog(&store, v, &data.templates);
    println!("\ncatalogue: {} annotations", summary.total);
    for (group, count) in &summary.groups {
        println!("  group {group} {count}");
    }
    for (id, label, count) in summary.themes.iter().filter(|(_, _, n)| *n > 0) {
        println!("  theme {id} \"{label}\" {count}");
    }

    // Language coverage of the underlying assets, for a sense of the data.
    let mut languages: BTreeMap<Lang, usize> = BTreeMap::new();
    for asset in store.assets() {
        for l in &asset.languages {
            *languages.entry(*l).or_default() += 1;
        }
    }
    let spoken: Vec<String> = languages.iter().map(|(l, n)| format!("{l}:{n}")).collect();
    println!("\nasset languages: {}", spoken.join(" "));
}
