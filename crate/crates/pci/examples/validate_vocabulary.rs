//! Parse and validate vocabulary documents, reading the findings as data.
//!
//! A vocabulary document declares three rooted hierarchies (themes,
//! relations, nesting contexts). Syntax errors abort parsing; everything
//! semantic (unknown parents, cycles, duplicate labels, covariance of
//! relation signatures) is collected into a [`ValidationReport`] so a whole
//! file's problems surface at once.
//!
//! Run with: `cargo run -p pci --example validate_vocabulary`

use pci::vocabulary::{ValidationOptions, Vocabulary, VocabularyBuilder};

const GOOD: &str = r#"
root "Archive"
concept "Holding" parent="Archive"
concept "Film Reel" parent="Holding"
concept "Field Tape" parent="Holding"
relation "Thematic Relation" arity=2
relation "Preserves" arity=2 signature="Archive","Holding" parent="Thematic Relation"
nesting "Discourse Topic"
"#;

const BAD: &str = r#"
root "Archive"
concept "Holding" parent="Archive"
concept "Holding" parent="Archive"
concept "Film Reel" parent="Lost Shelf"
relation "Thematic Relation" arity=2
nesting "Discourse Topic"
"#;

const CYCLIC: &str = r#"
root "Archive"
concept "Box" parent="Crate"
concept "Crate" parent="Box"
relation "Thematic Relation" arity=2
nesting "Discourse Topic"
"#;

const MISMATCHED: &str = r#"
root "Archive"
relation "Thematic Relation" arity=2
relation "Preserves" arity=2 parent="Thematic Relation"
relation "Preserves Badly" arity=3 parent="Preserves"
nesting "Discourse Topic"
"#;

fn main() {
    // A clean document builds straight into a frozen, queryable vocabulary.
    let good = Vocabulary::parse(GOOD).expect("document is well formed");
    println!(
        "parsed a vocabulary with {} themes, {} relations, {} nestings",
        good.concepts().count(),
        good.relations().count(),
        good.nestings().count()
    );
    let archive = good.concept_by_label("Archive").expect("declared above");
    let reel = good.concept_by_label("Film Reel").expect("declared above");
    println!(
        "\"Archive\" received {} and subsumes \"Film Reel\": {}",
        archive.id,
        good.subsumes(archive.id, reel.id).expect("same kind")
    );

    // A broken document still parses into a builder; validation then lists
    // every semantic problem instead of stopping at the first.
    let builder = VocabularyBuilder::parse(BAD).expect("syntax is fine, semantics are not");
    let report = builder.validate();
    println!("\nfindings for the broken document ({} errors):", report.error_count());
    for finding in report.findings() {
        println!("  {finding}");
    }
    assert!(report.has_errors());

    // Checks are staged: cycle detection needs resolved parent links, and
    // arity and covariance rules need acyclic, rooted hierarchies, so a
    // structurally broken file never drowns in follow-on noise.
    let cyclic = VocabularyBuilder::parse(CYCLIC).expect("parses").validate();
    println!("\nfindings once the parents resolve:");
    for finding in cyclic.findings() {
        println!("  {finding}");
    }
    let staged = VocabularyBuilder::parse(MISMATCHED).expect("parses").validate();
    println!("\nfindings once the structure is sound:");
    for finding in staged.findings() {
        println!("  {finding}");
    }

    // Signature covariance can be downgraded to a warning for drafts.
    let draft = r#"
root "Archive"
concept "Holding" parent="Archive"
relation "Thematic Relation" arity=2
relation "Preserves" arity=2 signature="Archive","Holding" parent="Thematic Relation"
relation "Keeps" arity=2 signature="Archive","Archive" parent="Preserves"
nesting "Discourse Topic"
"#;
    let strict = VocabularyBuilder::parse(draft).expect("parses").validate();
    let lax = VocabularyBuilder::parse(draft)
        .expect("parses")
        .validate_with(&ValidationOptions { enforce_covariance: false });
    println!(
        "\nwidened signature: {} errors under strict covariance, {} when relaxed",
        strict.error_count(),
        lax.error_count()
    );
    for finding in lax.findings() {
        println!("  {finding}");
    }

    // Label lint is a separate, advisory pass over a built vocabulary.
    let lint = good.lint_labels();
    println!("\nlint findings on the clean vocabulary: {}", lint.findings().len());
    for finding in lint.findings() {
        println!("  {finding}");
    }
}
