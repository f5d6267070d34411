//! Coreference normalization.
//!
//! Two nodes at the same level are coreferent when they agree on concept
//! type, individual keyword, and language tag (keyword source is not part of
//! identity; generics never corefer, each is a distinct existential).
//! Merging folds each node into the earliest coreferent node whose
//! nesting-context types are disjoint from its own; the keeper takes the
//! union of the nestings and all edges are rewritten to it. Nodes whose
//! nesting types overlap stay separate: their inner graphs may disagree and
//! no merge rule for inner graphs is defined.
//!
//! The fold is deterministic (node-id order) and idempotent: a keeper's
//! nesting set only ever grows, so nodes that stayed separate stay separate.

use std::collections::BTreeMap;

use super::{ConceptualGraph, NodeId, RelationEdge};

pub(super) fn merge(g: &ConceptualGraph) -> ConceptualGraph {
    let mut out = ConceptualGraph::new(g.kind);
    let mut remap: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    // Keeper ids in insertion order, with the coreference key of each.
    let mut keepers: Vec<NodeId> = Vec::new();

    for node in g.nodes() {
        let key =
            node.referent.identity().map(|(kw, lang)| (node.concept_type, kw.to_string(), lang));

        let mut absorbed = false;
        if let Some(key) = &key {
            for &keeper_id in &keepers {
                let keeper = out.node(keeper_id).expect("keeper inserted");
                let keeper_key = keeper
                    .referent
                    .identity()
                    .map(|(kw, lang)| (keeper.concept_type, kw.to_string(), lang));
                if keeper_key.as_ref() != Some(key) {
                    continue;
                }
                let disjoint = node.nestings.iter().all(|(t, _)| keeper.nesting(*t).is_none());
                if !disjoint {
                    continue;
                }
                // Absorb: union the nestings, keep the keeper's referent.
                let keeper = out.nodes.get_mut(&keeper_id).expect("keeper inserted");
                for (t, inner) in &node.nestings {
                    let at = keeper.nestings.partition_point(|(k, _)| k < t);
                    keeper.nestings.insert(at, (*t, inner.clone()));
                }
                remap.insert(node.id, keeper_id);
                absorbed = true;
                break;
            }
        }
        if !absorbed {
            out.nodes.insert(node.id, node.clone());
            keepers.push(node.id);
            remap.insert(node.id, node.id);
        }
    }

    // Normalize below: merge within every kept nesting.
    for node in out.nodes.values_mut() {
        for (_, inner) in &mut node.nestings {
            *inner = merge(inner);
        }
    }

    for edge in g.edges() {
        out.edges.push(RelationEdge {
            relation_type: edge.relation_type,
            args: edge.args.iter().map(|a| remap[a]).collect(),
        });
    }
    out
}
