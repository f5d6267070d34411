//! Exhaustive projection counter, kept deliberately independent of the
//! backtracking search: it enumerates every function from query nodes to
//! target nodes with an odometer and filters by directly transcribed rules.
//! Slow by design; refuses targets with more than [`ORACLE_NODE_LIMIT`]
//! concept nodes at any nesting level.

use crate::graph::{ConceptualGraph, Referent};
use crate::vocabulary::Vocabulary;

use super::{ProjectionError, ORACLE_NODE_LIMIT};

/// Count all projections of `query` into `target` by brute force, matching
/// the anchoring semantics of [`super::project`]: the empty query counts 1,
/// any other query is counted at the outer level and inside every nesting.
pub fn count_projections_oracle(
    query: &ConceptualGraph,
    target: &ConceptualGraph,
    v: &Vocabulary,
) -> Result<u64, ProjectionError> {
    super::validate_types(query, v)?;
    super::validate_types(target, v)?;
    check_size(target)?;
    if query.is_empty() {
        return Ok(1);
    }
    Ok(count_all_levels(query, target, v))
}

fn check_size(level: &ConceptualGraph) -> Result<(), ProjectionError> {
    if level.node_count() > ORACLE_NODE_LIMIT {
        return Err(ProjectionError::TooLarge {
            nodes: level.node_count(),
            limit: ORACLE_NODE_LIMIT,
        });
    }
    for node in level.nodes() {
        for (_, inner) in &node.nestings {
            check_size(inner)?;
        }
    }
    Ok(())
}

fn count_all_levels(query: &ConceptualGraph, level: &ConceptualGraph, v: &Vocabulary) -> u64 {
    let mut total = count_at(query, level, v);
    for node in level.nodes() {
        for (_, inner) in &node.nestings {
            total += count_all_levels(query, inner, v);
        }
    }
    total
}

/// Mappings of one query level into one target level. Each admissible
/// node function contributes the product, over the query nestings it must
/// satisfy, of the summed counts over compatible target nestings.
fn count_at(query: &ConceptualGraph, target: &ConceptualGraph, v: &Vocabulary) -> u64 {
    let query_nodes: Vec<_> = query.nodes().collect();
    if query_nodes.is_empty() {
        return 1;
    }
    let target_nodes: Vec<_> = target.nodes().collect();
    if target_nodes.is_empty() {
        return 0;
    }

    let mut total = 0u64;
    let mut odometer = vec![0usize; query_nodes.len()];
    loop {
        total += contribution(query, target, v, &query_nodes, &target_nodes, &odometer);

        // Advance: rightmost position first.
        let mut pos = odometer.len();
        loop {
            if pos == 0 {
                return total;
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < target_nodes.len() {
                break;
            }
            odometer[pos] = 0;
        }
    }
}

fn contribution(
    query: &ConceptualGraph,
    target: &ConceptualGraph,
    v: &Vocabulary,
    query_nodes: &[&crate::graph::ConceptNode],
    target_nodes: &[&crate::graph::ConceptNode],
    odometer: &[usize],
) -> u64 {
    // Node rule: subsumed type; individuals need the same keyword and,
    // when the query is tagged, the same language.
    for (qi, &ti) in odometer.iter().enumerate() {
        let q = query_nodes[qi];
        let t = target_nodes[ti];
        if !v.subsumes(q.concept_type, t.concept_type).unwrap_or(false) {
            return 0;
        }
        if let Referent::Individual { keyword, language, .. } = &q.referent {
            let Referent::Individual { keyword: tk, language: tl, .. } = &t.referent else {
                return 0;
            };
            if keyword != tk || (language.is_some() && language != tl) {
                return 0;
            }
        }
    }

    let image = |node_id| {
        let qi = query_nodes.iter().position(|q| q.id == node_id).unwrap();
        target_nodes[odometer[qi]].id
    };

    // Edge rule: some target edge with a subsumed relation type and the
    // pointwise-mapped argument list.
    for edge in query.edges() {
        let mapped: Vec<_> = edge.args.iter().map(|a| image(*a)).collect();
        let ok = target.edges().iter().any(|te| {
            te.args == mapped && v.subsumes(edge.relation_type, te.relation_type).unwrap_or(false)
        });
        if !ok {
            return 0;
        }
    }

    // Nesting rule: each query nesting multiplies by the summed counts over
    // compatible nestings of the image node.
    let mut product = 1u64;
    for (qi, &ti) in odometer.iter().enumerate() {
        let q = query_nodes[qi];
        let t = target_nodes[ti];
        for (query_nesting, query_inner) in &q.nestings {
            let mut ways = 0u64;
            for (target_nesting, target_inner) in &t.nestings {
                if v.subsumes(*query_nesting, *target_nesting).unwrap_or(false) {
                    ways += count_at(query_inner, target_inner, v);
                }
            }
            if ways == 0 {
                return 0;
            }
            product = product.saturating_mul(ways);
        }
    }
    product
}
