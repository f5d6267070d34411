//! Media assets, template instantiation, and store round-trips.
//!
//! An annotation binds a time segment of one asset to a narrative graph that
//! says what the segment is and, in its nested topic, what it is about.
//! Templates are pre-validated graphs with named generic slots; filling a
//! slot specializes it to an individual, optionally checked against a
//! controlled vocabulary. The store's text form is canonical, so a written
//! and re-read store serializes byte-identically.
//!
//! Run with: `cargo run -p pci --example annotate_segments`

use std::collections::BTreeMap;

use pci::annotation::{
    instantiate_template, AnnotationStore, CvCatalog, Filler, Keyword, KeywordKind, MediaAsset,
    Segment, SegmentAnnotation,
};
use pci::graph::Lang;
use pci::pci_data;

fn lang(code: &str) -> Lang {
    Lang::new(code).expect("valid language code")
}

fn main() {
    let data = pci_data::load_bundled().expect("bundled data is self-consistent");
    let v = &data.vocabulary;
    let mut catalog = CvCatalog::new();
    for cv in data.controlled {
        catalog.add(cv).expect("bundled names are distinct");
    }

    // Templates ship with the data set, one per discourse-topic group.
    println!("bundled templates:");
    for t in &data.templates {
        let slots: Vec<&str> = t.slots.keys().map(String::as_str).collect();
        println!("  {} \"{}\" group={} slots={}", t.template_id, t.name, t.group, slots.join(","));
    }

    // Fill the essentials template: who, where, which environment.
    let essentials =
        data.templates.iter().find(|t| t.template_id == "essentials").expect("bundled template");
    let mut fills = BTreeMap::new();
    fills.insert("group".to_string(), Filler::controlled("sami", Some(lang("eng")), "peoples"));
    fills.insert("environment".to_string(), Filler::tagged("coastal fjords", lang("eng")));
    let graph = instantiate_template(essentials, &fills, &catalog).expect("slots exist");
    println!("\ninstantiated essentials graph (organisation slot left generic):");
    println!("{}", graph.serialize());

    // Controlled fillers must resolve; a typo is an error, not a warning.
    let mut bad = BTreeMap::new();
    bad.insert("group".to_string(), Filler::controlled("samii", Some(lang("eng")), "peoples"));
    let err = instantiate_template(essentials, &bad, &catalog).expect_err("not in the vocabulary");
    println!("misspelled controlled filler: {err}");

    // Register an asset and annotate one segment of it.
    let mut store = AnnotationStore::new();
    let mut asset = MediaAsset::new("fjord-footage", "media/fjord-footage.mkv", 1_800_000);
    asset.languages = vec![lang("sme"), lang("eng")];
    store.add_asset(asset).expect("fresh id");

    let mut annotation =
        SegmentAnnotation::new("f01", Segment::new("fjord-footage", 0, 120_000), graph);
    annotation.set_field(
        lang("eng"),
        Some("Herding by the fjord"),
        Some("A herder describes the spring migration route."),
    );
    annotation.keywords.push(Keyword::controlled(
        "sami",
        lang("eng"),
        KeywordKind::ExtractedTerm,
        "peoples",
    ));
    annotation.pragmatic_marks.push(v.concept_by_label("Research").expect("bundled theme").id);
    store.add_annotation(annotation, v, &catalog).expect("segment and graph are valid");

    // Segment bounds are enforced against the asset's duration.
    let stray = SegmentAnnotation::new(
        "f02",
        Segment::new("fjord-footage", 1_700_000, 2_000_000),
        essentials.graph.clone(),
    );
    let err = store.add_annotation(stray, v, &catalog).expect_err("ends past the asset");
    println!("\nout-of-bounds segment: {err}");

    // The store's text form is canonical.
    let text = store.serialize();
    println!("\nstore file:\n{text}");
    let back = AnnotationStore::parse(&text).expect("own output parses");
    assert_eq!(text, back.serialize());
    assert!(!back.validate(v, &catalog).has_errors());
    println!("round-trip is byte-identical and still validates");
}
