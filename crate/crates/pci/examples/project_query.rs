//! Projection search, with the exhaustive counting oracle as a cross-check.
//!
//! A projection maps every query node onto a target node with a more
//! specific (or equal) type and a compatible referent, preserving every
//! relation edge and every nesting. The query may anchor at the target's
//! outer level or inside any nesting, so asking about a topic finds it no
//! matter how deeply the annotation buried it.
//!
//! Run with: `cargo run -p pci --example project_query`

use pci::graph::{ConceptualGraph, GraphKind, KeywordSource, Lang, Referent};
use pci::pci_data;
use pci::projection::{count_projections_oracle, project, verify_mapping, ORACLE_NODE_LIMIT};
use pci::vocabulary::{TypeIdentifier, Vocabulary};

fn theme(v: &Vocabulary, label: &str) -> TypeIdentifier {
    v.concept_by_label(label).expect("bundled theme").id
}

fn individual(keyword: &str) -> Referent {
    Referent::Individual {
        keyword: keyword.into(),
        language: Some(Lang::new("eng").expect("valid language code")),
        source: KeywordSource::Free,
    }
}

fn single(v: &Vocabulary, label: &str, referent: Referent) -> ConceptualGraph {
    let mut q = ConceptualGraph::new(GraphKind::Topical);
    q.add_concept(theme(v, label), referent);
    q
}

fn main() {
    let data = pci_data::load_bundled().expect("bundled data is self-consistent");
    let v = &data.vocabulary;
    let topic = data.vocabulary.nesting_by_label("Discourse Topic").expect("bundled nesting").id;

    // Target: an interview whose topic relates two minorities to a shared
    // territory.
    let mut inner = ConceptualGraph::new(GraphKind::Topical);
    let sami = inner.add_concept(theme(v, "Minority"), individual("sami"));
    let inuit = inner.add_concept(theme(v, "Minority"), individual("inuit"));
    let territory = inner.add_concept(theme(v, "Social Territory"), individual("Sapmi"));
    let spatial = v.relation_by_label("Spatial Relation").expect("bundled relation").id;
    inner.add_relation_checked(v, spatial, vec![sami, territory]).expect("arity 2");
    inner.add_relation_checked(v, spatial, vec![inuit, territory]).expect("arity 2");

    let mut target = ConceptualGraph::new(GraphKind::Narrative);
    let interview = target.add_concept(theme(v, "Interview"), Referent::Generic);
    target.attach_nesting(interview, topic, inner).expect("first nesting");

    println!("target:\n{}", target.serialize());

    // A generic query node matches every node its type subsumes, at every
    // nesting level. "Actor" is an ancestor of "Minority", so it reaches
    // both nested individuals; the mapping records the anchor path.
    for (label, referent) in [
        ("Actor", Referent::Generic),
        ("Minority", individual("inuit")),
        ("Minority", individual("basques")),
    ] {
        let query = single(v, label, referent.clone());
        let mappings = project(&query, &target, v).expect("types are known");
        println!("query [{label}: {referent}] has {} projections", mappings.len());
        for m in &mappings {
            println!("  anchor {}: {m}", m.anchor_path());
            verify_mapping(&query, &target, v, m).expect("search output is label-preserving");
        }
    }

    // Edges constrain jointly: the query asks for some actor spatially
    // related to some social environment, and each consistent assignment is
    // one projection.
    let mut query = ConceptualGraph::new(GraphKind::Topical);
    let who = query.add_concept(theme(v, "Actor"), Referent::Generic);
    let wher = query.add_concept(theme(v, "Social Environment"), Referent::Generic);
    query.add_relation_checked(v, spatial, vec![who, wher]).expect("arity 2");
    let mappings = project(&query, &target, v).expect("types are known");
    println!("\nedge-constrained query has {} projections:", mappings.len());
    for m in &mappings {
        println!("  {m}");
    }

    // The counting oracle enumerates every node function exhaustively and
    // filters; it exists to keep the search engine honest on small inputs.
    let fast = mappings.len() as u64;
    let slow = count_projections_oracle(&query, &target, v).expect("target is small");
    println!("\nsearch found {fast}, oracle counted {slow}");
    assert_eq!(fast, slow);

    // The oracle refuses any level larger than ORACLE_NODE_LIMIT nodes,
    // because its cost is |target| ^ |query|.
    let mut big = ConceptualGraph::new(GraphKind::Topical);
    for _ in 0..=ORACLE_NODE_LIMIT {
        big.add_concept(theme(v, "Activity"), Referent::Generic);
    }
    let refusal = count_projections_oracle(&query, &big, v).expect_err("too large by one");
    println!("oracle on {} nodes: {refusal}", ORACLE_NODE_LIMIT + 1);
}
