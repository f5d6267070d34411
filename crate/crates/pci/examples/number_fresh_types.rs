//! Deterministic identifier assignment for fresh types.
//!
//! Declarations may pin identifiers explicitly or leave them open. Open
//! declarations are numbered by a depth-first walk from each hierarchy's
//! root, visiting children in byte-order of their NFC labels and skipping
//! numbers already pinned, so the same declarations always freeze to the
//! same identifiers no matter the declaration order.
//!
//! Run with: `cargo run -p pci --example number_fresh_types`

use pci::vocabulary::{TypeIdentifier, VocabularyBuilder};

fn declare(shuffled: bool) -> VocabularyBuilder {
    let mut b = VocabularyBuilder::new("Inventory");
    let mut items: Vec<(&str, &str)> = vec![
        ("Holding", "Inventory"),
        ("Print", "Holding"),
        ("Negative", "Holding"),
        ("Audio Reel", "Holding"),
        ("Gear", "Inventory"),
        ("Camera", "Gear"),
    ];
    if shuffled {
        items.reverse();
    }
    for (label, parent) in items {
        b.concept(label, [parent]);
    }
    b.relation("Belongs To", 2, Vec::<&str>::new());
    b.nesting("Discourse Topic", Vec::<&str>::new());
    b
}

fn main() {
    let v = declare(false).build().expect("declarations are consistent");
    println!("depth-first, label-ordered numbering:");
    let mut themes: Vec<_> = v.concepts().collect();
    themes.sort_by_key(|c| c.id);
    for c in &themes {
        println!("  {} \"{}\"", c.id, c.label);
    }

    // Declaration order does not matter; only the shape does.
    let shuffled = declare(true).build().expect("same declarations, reversed");
    assert_eq!(v.serialize(), shuffled.serialize());
    println!("\nreversed declaration order freezes to identical identifiers");

    // Pinned identifiers are honored and fresh numbering flows around them.
    let mut b = VocabularyBuilder::new("Inventory");
    b.concept_full(Some(TypeIdentifier::theme(2)), "Gear", ["Inventory"], None);
    b.concept_full(Some(TypeIdentifier::theme(7)), "Tripod", ["Gear"], None);
    b.concept("Camera", ["Gear"]);
    b.concept("Lens", ["Gear"]);
    b.relation("Belongs To", 2, Vec::<&str>::new());
    b.nesting("Discourse Topic", Vec::<&str>::new());
    let pinned = b.build().expect("pins do not collide");
    println!("\npinned T-2 and T-7; fresh types take the gaps:");
    let mut themes: Vec<_> = pinned.concepts().collect();
    themes.sort_by_key(|c| c.id);
    for c in &themes {
        println!("  {} \"{}\"", c.id, c.label);
    }

    // Builders can also assign identifiers without freezing, which is what
    // a vocabulary editor would do before writing the file back out.
    let mut b = declare(false);
    b.assign_identifiers().expect("consistent declarations");
    println!("\nassign_identifiers on the builder, then build, changes nothing:");
    let same = b.build().expect("still consistent");
    assert_eq!(v.serialize(), same.serialize());
    println!("  byte-identical serialization");
}
