//! Well-formedness of a graph against a vocabulary.
//!
//! Checks, recursively through all nesting levels:
//! - every node type is a known theme, every edge type a known relation,
//!   every nesting type a known nesting context;
//! - individual keywords are non-empty; controlled keywords resolve in their
//!   named controlled vocabulary (when a resolver is supplied);
//! - edge arity matches the declared relation arity; each argument's concept
//!   type is subsumed by the declared signature slot type;
//! - a node typed under Discourse Type carries a nesting typed under
//!   Discourse Topic: missing is an error in a narrative configuration and a
//!   warning otherwise; conversely a discourse-topic nesting on a node not
//!   typed under Discourse Type is an error;
//! - empty nestings are warnings (template slots are legitimately empty).
//!
//! Findings inside nestings use path subjects: `n1/C-1/n2` is node `n2`
//! inside the `C-1` nesting of outer node `n1`.

use std::fmt;

use crate::report::ValidationReport;
use crate::vocabulary::{TypeIdentifier, TypeKind, Vocabulary};

use super::{ConceptualGraph, GraphKind, KeywordSource, Lang, Referent};

/// Label anchoring the discourse-topic obligation.
pub(crate) const DISCOURSE_TYPE_LABEL: &str = "Discourse Type";
/// Label of the nesting context that discharges the obligation.
pub(crate) const DISCOURSE_TOPIC_LABEL: &str = "Discourse Topic";

/// Result of resolving a controlled keyword against a catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvLookup {
    /// No catalog available; membership is not checked.
    Unchecked,
    /// The named controlled vocabulary does not exist in the catalog.
    UnknownVocabulary,
    /// The vocabulary exists but does not list the keyword.
    Missing,
    /// The keyword is listed.
    Present,
}

pub(super) fn check(
    g: &ConceptualGraph,
    vocabulary: &Vocabulary,
    resolve: &dyn Fn(&str, &str, Option<Lang>) -> CvLookup,
) -> ValidationReport {
    let mut report = ValidationReport::new();
    let anchors = Anchors {
        discourse_type: vocabulary.concept_by_label(DISCOURSE_TYPE_LABEL).map(|c| c.id),
        discourse_topic: vocabulary.nesting_by_label(DISCOURSE_TOPIC_LABEL).map(|n| n.id),
    };
    walk(g, "", vocabulary, &anchors, resolve, &mut report);
    report.finish()
}

struct Anchors {
    discourse_type: Option<TypeIdentifier>,
    discourse_topic: Option<TypeIdentifier>,
}

fn subject(prefix: &str, tail: impl fmt::Display) -> String {
    if prefix.is_empty() {
        tail.to_string()
    } else {
        format!("{prefix}/{tail}")
    }
}

/// Is `id` a known theme subsumed by `ancestor`?
fn under(v: &Vocabulary, ancestor: Option<TypeIdentifier>, id: TypeIdentifier) -> bool {
    match ancestor {
        Some(anc) if anc.kind() == id.kind() && v.contains(id) => {
            v.subsumes(anc, id).unwrap_or(false)
        }
        _ => false,
    }
}

fn walk(
    g: &ConceptualGraph,
    path: &str,
    v: &Vocabulary,
    anchors: &Anchors,
    resolve: &dyn Fn(&str, &str, Option<Lang>) -> CvLookup,
    report: &mut ValidationReport,
) {
    for node in g.nodes() {
        let node_subject = subject(path, node.id);

        let type_known = match node.concept_type.kind() {
            TypeKind::Theme if v.contains(node.concept_type) => true,
            TypeKind::Theme => {
                report.error(&node_subject, format!("unknown concept type {}", node.concept_type));
                false
            }
            _ => {
                report.error(
                    &node_subject,
                    format!("node type {} is not a theme identifier", node.concept_type),
                );
                false
            }
        };

        if let Referent::Individual { keyword, language, source } = &node.referent {
            if keyword.trim().is_empty() {
                report.error(&node_subject, "individual keyword is empty");
            } else if let KeywordSource::Controlled(name) = source {
                match resolve(name, keyword, *language) {
                    CvLookup::Unchecked | CvLookup::Present => {}
                    CvLookup::UnknownVocabulary => report.error(
                        &node_subject,
                        format!("references unknown controlled vocabulary \"{name}\""),
                    ),
                    CvLookup::Missing => report.error(
                        &node_subject,
                        format!(
                            "keyword {} is not listed in controlled vocabulary \"{name}\"",
                            super::text::quote(keyword)
                        ),
                    ),
                }
            }
        }

        let is_discourse_node = type_known && under(v, anchors.discourse_type, node.concept_type);
        let mut has_topic = false;

        for (nesting_type, inner) in &node.nestings {
            let nest_subject = subject(path, format_args!("{}/{}", node.id, nesting_type));
            let nesting_known = match nesting_type.kind() {
                TypeKind::Nesting if v.contains(*nesting_type) => true,
                TypeKind::Nesting => {
                    report.error(&node_subject, format!("unknown nesting type {nesting_type}"));
                    false
                }
                _ => {
                    report.error(
                        &node_subject,
                        format!("nesting type {nesting_type} is not a nesting identifier"),
                    );
                    false
                }
            };

            if nesting_known && under(v, anchors.discourse_topic, *nesting_type) {
                has_topic = true;
                if type_known && !is_discourse_node {
                    report.error(
                        &node_subject,
                        format!(
                            "discourse-topic nesting on a node whose type {} is not under {}",
                            node.concept_type, DISCOURSE_TYPE_LABEL
                        ),
                    );
                }
            }

            if inner.is_empty() {
                report.warning(&nest_subject, "nesting is empty");
            }
            walk(inner, &nest_subject, v, anchors, resolve, report);
        }

        if is_discourse_node && !has_topic {
            let message = format!("discourse-type node lacks a {DISCOURSE_TOPIC_LABEL} nesting");
            if g.kind == GraphKind::Narrative {
                report.error(&node_subject, message);
            } else {
                report.warning(&node_subject, message);
            }
        }
    }

    for edge in g.edges() {
        let edge_subject = subject(path, edge);
        if edge.relation_type.kind() != TypeKind::Relation {
            report.error(
                &edge_subject,
                format!("edge type {} is not a relation identifier", edge.relation_type),
            );
            continue;
        }
        let Some(declared) = v.relation(edge.relation_type) else {
            report.error(&edge_subject, format!("unknown relation type {}", edge.relation_type));
            continue;
        };
        if declared.arity as usize != edge.args.len() {
            report.error(
                &edge_subject,
                format!(
                    "relation {} takes {} arguments, got {}",
                    edge.relation_type,
                    declared.arity,
                    edge.args.len()
                ),
            );
            continue;
        }
        let Some(signature) = &declared.signature else { continue };
        for (slot, (&arg, &slot_type)) in edge.args.iter().zip(signature).enumerate() {
            let Some(arg_node) = g.node(arg) else {
                report.error(&edge_subject, format!("argument {} is dangling", slot + 1));
                continue;
            };
            if arg_node.concept_type.kind() != TypeKind::Theme || !v.contains(arg_node.concept_type)
            {
                continue; // already reported on the node
            }
            if !v.subsumes(slot_type, arg_node.concept_type).unwrap_or(false) {
                report.error(
                    &edge_subject,
                    format!(
                        "argument {} ({}) of type {} is not subsumed by slot type {}",
                        slot + 1,
                        arg,
                        arg_node.concept_type,
                        slot_type
                    ),
                );
            }
        }
    }
}
