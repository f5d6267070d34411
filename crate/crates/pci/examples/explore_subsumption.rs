//! Subsumption tests and least common subsumers over the bundled hierarchies.
//!
//! Every theme, relation and nesting hierarchy is a rooted DAG, so a type can
//! specialize several parents at once; subsumption is the reflexive and
//! transitive reachability along parent links, and the least common
//! subsumers of two types form a set, not necessarily a single type.
//!
//! Run with: `cargo run -p pci --example explore_subsumption`

use pci::pci_data;
use pci::vocabulary::{TypeIdentifier, Vocabulary};

fn theme(v: &Vocabulary, label: &str) -> TypeIdentifier {
    v.concept_by_label(label).expect("bundled theme").id
}

fn name(v: &Vocabulary, id: TypeIdentifier) -> String {
    let label = match v.concept(id) {
        Some(c) => &c.label,
        None => &v.relation(id).expect("known relation").label,
    };
    format!("{id} \"{label}\"")
}

fn main() {
    let data = pci_data::load_bundled().expect("bundled data is self-consistent");
    let v = &data.vocabulary;

    let actor = theme(v, "Actor");
    let group = theme(v, "Social Group");
    let minority = theme(v, "Minority");
    let fauna = theme(v, "Fauna");
    let flora = theme(v, "Flora");

    println!("subsumption is reachability along parent links:");
    for (a, b) in [(actor, minority), (minority, actor), (fauna, flora), (group, group)] {
        println!(
            "  {} subsumes {}: {}",
            name(v, a),
            name(v, b),
            v.subsumes(a, b).expect("same kind")
        );
    }

    // "Chronology" sits under two parents: it is a discourse genre (a way a
    // film segment is narrated) and a temporal theme (what the segment is
    // about). Both ancestries are live at once.
    let chronology = theme(v, "Chronology");
    let genre = theme(v, "Discourse Genre");
    let temporality = theme(v, "Temporality and History");
    println!("\n\"Chronology\" specializes two hierarchies at once:");
    for ancestor in [genre, temporality] {
        println!(
            "  {} subsumes {}: {}",
            name(v, ancestor),
            name(v, chronology),
            v.subsumes(ancestor, chronology).expect("same kind")
        );
    }

    // Least common subsumers: the tightest shared generalizations.
    println!("\nleast common subsumers:");
    let pairs = [
        (minority, theme(v, "Indigenous People")),
        (fauna, flora),
        (chronology, theme(v, "Summary")),
        (chronology, theme(v, "Period")),
    ];
    for (a, b) in pairs {
        let lcs = v.least_common_subsumers(a, b).expect("same kind");
        let labels: Vec<String> = lcs.into_iter().map(|id| name(v, id)).collect();
        println!("  lcs({}, {}) = {}", name(v, a), name(v, b), labels.join(", "));
    }

    // Relations subsume the same way.
    let situating = v.relation_by_label("Situating Relation").expect("bundled relation").id;
    let spatial = v.relation_by_label("Spatial Relation").expect("bundled relation").id;
    println!(
        "\n{} subsumes {}: {}",
        name(v, situating),
        name(v, spatial),
        v.subsumes(situating, spatial).expect("same kind")
    );

    // Kinds never mix: asking whether a theme subsumes a relation is an
    // error, not a false.
    let err = v.subsumes(actor, spatial).expect_err("theme versus relation");
    println!("\ncross-kind comparison fails: {err}");
}
