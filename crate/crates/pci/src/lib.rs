//! Conceptual-graph knowledge engine for time-coded audiovisual archives.
//!
//! The crate bundles a cultural-heritage vocabulary (themes, relations and
//! nesting contexts arranged in rooted DAGs), conceptual graphs built over it,
//! a projection query engine, and a segment annotation store, together with
//! a thin `pci` command-line binary.
//!
//! The primary interface is the runnable example set; each example is a
//! self-contained tour of one capability:
//!
//! | example | capability |
//! |---------|------------|
//! | `validate_vocabulary` | parse + validate vocabulary documents, findings as data |
//! | `explore_subsumption` | subsumption tests and least common subsumers |
//! | `number_fresh_types` | deterministic identifier assignment for fresh types |
//! | `build_graph` | construct, check, serialize and merge conceptual graphs |
//! | `project_query` | projection search with the exhaustive counting oracle |
//! | `annotate_segments` | media assets, template instantiation, store round-trips |
//! | `catalog_corpus` | load the sample corpus, run queries, print the catalog |
//! | `build_sample_corpus` | deterministic generator for the sample corpus file |
//!
//! Run one with `cargo run -p pci --example <name>`.
//!
//! # Library layout
//!
//! - [`vocabulary`]: type hierarchies, parsing, validation, lint, numbering
//! - [`graph`]: concept nodes, relation edges, nestings, well-formedness
//! - [`projection`]: mappings, the search engine, the counting oracle
//! - [`annotation`]: assets, segment annotations, templates, controlled vocabularies
//! - [`pci_data`]: the bundled vocabulary, templates and controlled vocabularies
//! - [`report`]: severity-tagged findings shared by all validators
//!
//! # Quick start
//!
//! ```
//! use pci::pci_data;
//!
//! let data = pci_data::load_bundled().expect("bundled data is self-consistent");
//! let actor = data.vocabulary.concept_by_label("Actor").unwrap();
//! let minority = data.vocabulary.concept_by_label("Minority").unwrap();
//! assert!(data.vocabulary.subsumes(actor.id, minority.id).unwrap());
//! ```

pub mod annotation;
pub mod cli;
pub mod graph;
pub mod pci_data;
pub mod projection;
pub mod report;
pub mod vocabulary;

pub use report::{Finding, Severity, ValidationReport};
pub use vocabulary::{TypeIdentifier, TypeKind, Vocabulary};
