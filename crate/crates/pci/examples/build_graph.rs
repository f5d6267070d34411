//! Construct, check, serialize and merge conceptual graphs.
//!
//! A conceptual graph is a set of typed concept nodes joined by ordered
//! relation edges; a node may carry nested inner graphs keyed by nesting
//! context. Well-formedness against a vocabulary is a report, not a panic,
//! and the text form is canonical: parse(serialize(g)) reproduces g exactly.
//!
//! Run with: `cargo run -p pci --example build_graph`

use pci::graph::{ConceptualGraph, GraphKind, KeywordSource, Lang, Referent};
use pci::pci_data;
use pci::vocabulary::{TypeIdentifier, Vocabulary};

fn theme(v: &Vocabulary, label: &str) -> TypeIdentifier {
    v.concept_by_label(label).expect("bundled theme").id
}

fn relation(v: &Vocabulary, label: &str) -> TypeIdentifier {
    v.relation_by_label(label).expect("bundled relation").id
}

fn individual(keyword: &str, code: &str) -> Referent {
    Referent::Individual {
        keyword: keyword.into(),
        language: Some(Lang::new(code).expect("valid language code")),
        source: KeywordSource::Free,
    }
}

fn main() {
    let data = pci_data::load_bundled().expect("bundled data is self-consistent");
    let v = &data.vocabulary;
    let topic = data.vocabulary.nesting_by_label("Discourse Topic").expect("bundled nesting").id;

    // One interview segment about reindeer herding: the outer narrative
    // level says what kind of discourse it is, the nested topical level says
    // what it is about.
    let mut inner = ConceptualGraph::new(GraphKind::Topical);
    let herders = inner.add_concept(theme(v, "Minority"), individual("sami", "eng"));
    let herding = inner.add_concept(theme(v, "Activity"), individual("reindeer herding", "eng"));
    let tundra = inner.add_concept(theme(v, "Natural Environment"), Referent::Generic);
    inner
        .add_relation_checked(v, relation(v, "Is Subject Of"), vec![herders, herding])
        .expect("declared arity is 2");
    inner
        .add_relation_checked(v, relation(v, "Spatial Relation"), vec![herding, tundra])
        .expect("declared arity is 2");

    let mut outer = ConceptualGraph::new(GraphKind::Narrative);
    let interview = outer.add_concept(theme(v, "Interview"), Referent::Generic);
    outer.attach_nesting(interview, topic, inner).expect("first nesting on this node");

    let report = outer.check_well_formed(v);
    println!("well-formedness findings: {}", report.findings().len());
    assert!(!report.has_errors());

    let text = outer.serialize();
    println!("\ncanonical text form:\n{text}");

    let back = ConceptualGraph::parse(&text).expect("own output parses");
    assert_eq!(text, back.serialize());
    println!("round-trip is byte-identical");

    // Violations are findings with the offending node or edge as subject.
    let mut broken = outer.clone();
    let stray = broken.add_concept(theme(v, "Author"), Referent::Generic);
    broken
        .add_relation(relation(v, "Explains"), vec![stray, stray, stray])
        .expect("unchecked append defers arity to the report");
    println!("\nfindings after adding a bad edge:");
    for finding in broken.check_well_formed(v).findings() {
        println!("  {finding}");
    }

    // Coreference: equal type, keyword and language name the same individual,
    // so a normalization pass can collapse the duplicates and rewrite edges.
    let mut dup = ConceptualGraph::new(GraphKind::Topical);
    let a = dup.add_concept(theme(v, "Minority"), individual("sami", "eng"));
    let craft = dup.add_concept(theme(v, "Activity"), individual("duodji", "eng"));
    let b = dup.add_concept(theme(v, "Minority"), individual("sami", "eng"));
    dup.add_relation_checked(v, relation(v, "Is Subject Of"), vec![a, craft])
        .expect("declared arity is 2");
    dup.add_relation_checked(v, relation(v, "Is Object Of"), vec![b, craft])
        .expect("declared arity is 2");
    let merged = dup.merge_coreferent();
    println!(
        "\ncoreferent merge: {} nodes down to {}, edges untouched: {}",
        dup.node_count(),
        merged.node_count(),
        merged.edges().len()
    );
    println!("{}", merged.serialize());
}
