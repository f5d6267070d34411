//! Projection: label-preserving homomorphisms of a query graph into target
//! graphs under type specialization.
//!
//! A mapping assigns every query concept node to a target node whose type is
//! subsumed by the query node's type, with referent compatibility (an
//! individual query keyword requires the same individual; a generic accepts
//! anything), every query edge realized by a target edge of a subsumed
//! relation type with pointwise-mapped arguments, and every query nesting
//! mirrored by a child projection into a compatible nesting of the image
//! node. Homomorphism, not isomorphism: two query nodes may share an image.
//!
//! A non-empty query may anchor at the target's outer level or inside any
//! nesting, at every depth; the query's own nesting structure is then
//! mirrored exactly below the anchor. The empty query is vacuous: exactly
//! one empty mapping, regardless of target.
//!
//! Mapping identity is (anchor, concept map, nesting choices). Edge
//! witnesses are canonical (first compatible target edge) and never multiply
//! the count, which keeps [`project`] in exact agreement with the exhaustive
//! [`count_projections_oracle`].

mod oracle;
mod query;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{ConceptNode, ConceptualGraph, NodeId, Referent};
use crate::vocabulary::{TypeIdentifier, TypeKind, Vocabulary};

pub use oracle::count_projections_oracle;
pub use query::{answer_query, QueryResult};

/// Maximum concept nodes per target level the oracle will enumerate.
pub const ORACLE_NODE_LIMIT: usize = 8;

/// Errors from projection and the counting oracle.
#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("type {0} does not occur in the vocabulary or has the wrong kind for its position")]
    UnknownType(TypeIdentifier),
    #[error(
        "size limit exceeded: a target level has {nodes} concept nodes, oracle limit is {limit}"
    )]
    TooLarge { nodes: usize, limit: usize },
}

/// One projection of the query into the target.
///
/// Ordering is the canonical result order: anchor path first (outer level
/// before nested anchors, pre-order), then concept map, edge witnesses, and
/// nesting choices.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProjectionMapping {
    /// Hops from the target's outer level to the anchor level: the host
    /// node and the nesting type descended into. Empty for the outer level.
    pub anchor: Vec<(NodeId, TypeIdentifier)>,
    /// Query node → target node at the anchor level.
    pub concept_map: BTreeMap<NodeId, NodeId>,
    /// Witness target-edge index per query edge, in query-edge order.
    pub edge_map: Vec<usize>,
    /// For each query nesting (query node, query nesting type): the target
    /// nesting type matched and the child projection into it.
    #[allow(clippy::type_complexity)]
    pub nested: BTreeMap<(NodeId, TypeIdentifier), (TypeIdentifier, Box<ProjectionMapping>)>,
}

impl ProjectionMapping {
    /// Render the anchor path, `outer` for the top level.
    pub fn anchor_path(&self) -> String {
        if self.anchor.is_empty() {
            "outer".to_string()
        } else {
            self.anchor
                .iter()
                .map(|(node, nesting)| format!("{node}/{nesting}"))
                .collect::<Vec<_>>()
                .join("/")
        }
    }
}

impl fmt::Display for ProjectionMapping {
    /// One-line summary: anchor, node pairs, and nesting choices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}:", self.anchor_path())?;
        if self.concept_map.is_empty() {
            write!(f, " (empty)")?;
        }
        for (q, t) in &self.concept_map {
            write!(f, " {q}->{t}")?;
        }
        for ((q, qn), (tn, child)) in &self.nested {
            write!(f, " [{q}/{qn}~{tn}: {child}]")?;
        }
        Ok(())
    }
}

/// Every type mentioned by the graph, with the kind its position requires.
fn validate_types(g: &ConceptualGraph, v: &Vocabulary) -> Result<(), ProjectionError> {
    for node in g.nodes() {
        if node.concept_type.kind() != TypeKind::Theme || !v.contains(node.concept_type) {
            return Err(ProjectionError::UnknownType(node.concept_type));
        }
        for (nesting_type, inner) in &node.nestings {
            if nesting_type.kind() != TypeKind::Nesting || !v.contains(*nesting_type) {
                return Err(ProjectionError::UnknownType(*nesting_type));
            }
            validate_types(inner, v)?;
        }
    }
    for edge in g.edges() {
        if edge.relation_type.kind() != TypeKind::Relation || !v.contains(edge.relation_type) {
            return Err(ProjectionError::UnknownType(edge.relation_type));
        }
    }
    Ok(())
}

/// May a query node with this type and referent map onto the target node?
/// Nesting constraints are handled separately.
fn node_compatible(v: &Vocabulary, q: &ConceptNode, t: &ConceptNode) -> bool {
    if !v.subsumes(q.concept_type, t.concept_type).unwrap_or(false) {
        return false;
    }
    match &q.referent {
        Referent::Generic => true,
        Referent::Individual { keyword, language, .. } => match &t.referent {
            Referent::Generic => false,
            Referent::Individual { keyword: t_kw, language: t_lang, .. } => {
                keyword == t_kw && (language.is_none() || language == t_lang)
            }
        },
    }
}

/// All projections of `query` into `target`, across all anchor levels,
/// in canonical order.
pub fn project(
    query: &ConceptualGraph,
    target: &ConceptualGraph,
    v: &Vocabulary,
) -> Result<Vec<ProjectionMapping>, ProjectionError> {
    validate_types(query, v)?;
    validate_types(target, v)?;
    if query.is_empty() {
        return Ok(vec![ProjectionMapping::default()]);
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    anchor_walk(query, target, v, &mut path, &mut out);
    out.sort();
    out.dedup();
    Ok(out)
}

/// Projections of `query` at exactly the given target level (no anchor
/// descent). The empty query yields one empty mapping.
pub fn project_at(
    query: &ConceptualGraph,
    target_level: &ConceptualGraph,
    v: &Vocabulary,
) -> Result<Vec<ProjectionMapping>, ProjectionError> {
    validate_types(query, v)?;
    validate_types(target_level, v)?;
    let mut out = enumerate_level(query, target_level, v);
    out.sort();
    out.dedup();
    Ok(out)
}

fn anchor_walk(
    query: &ConceptualGraph,
    level: &ConceptualGraph,
    v: &Vocabulary,
    path: &mut Vec<(NodeId, TypeIdentifier)>,
    out: &mut Vec<ProjectionMapping>,
) {
    for mut mapping in enumerate_level(query, level, v) {
        mapping.anchor = path.clone();
        out.push(mapping);
    }
    for node in level.nodes() {
        for (nesting_type, inner) in &node.nestings {
            path.push((node.id, *nesting_type));
            anchor_walk(query, inner, v, path, out);
            path.pop();
        }
    }
}

/// The nesting-choice options of one query nesting on an assigned node:
/// every (target nesting type, child mapping) combination.
type NestOptions = Vec<(TypeIdentifier, ProjectionMapping)>;

/// Backtracking enumeration of all mappings of one query level into one
/// target level. Types are assumed validated.
fn enumerate_level(
    query: &ConceptualGraph,
    target: &ConceptualGraph,
    v: &Vocabulary,
) -> Vec<ProjectionMapping> {
    if query.is_empty() {
        return vec![ProjectionMapping::default()];
    }

    let query_nodes: Vec<&ConceptNode> = query.nodes().collect();

    // Candidate images per query node, cheap filters only: type subsumption,
    // referent compatibility, and existence of a compatible nesting per
    // query nesting (child projections are enumerated on assignment).
    let mut candidates: Vec<Vec<&ConceptNode>> = Vec::with_capacity(query_nodes.len());
    for q in &query_nodes {
        let list: Vec<&ConceptNode> = target
            .nodes()
            .filter(|t| node_compatible(v, q, t))
            .filter(|t| {
                q.nestings.iter().all(|(qn, _)| {
                    t.nestings.iter().any(|(tn, _)| v.subsumes(*qn, *tn).unwrap_or(false))
                })
            })
            .collect();
        if list.is_empty() {
            return Vec::new();
        }
        candidates.push(list);
    }

    // Most-constrained variable first; node id breaks ties for determinism.
    let mut order: Vec<usize> = (0..query_nodes.len()).collect();
    order.sort_by_key(|&i| (candidates[i].len(), query_nodes[i].id));

    let mut search = Search {
        query,
        target,
        v,
        query_nodes: &query_nodes,
        candidates: &candidates,
        order: &order,
        assignment: BTreeMap::new(),
        nest_options: Vec::new(),
        out: Vec::new(),
    };
    search.descend(0);
    search.out
}

struct Search<'a> {
    query: &'a ConceptualGraph,
    target: &'a ConceptualGraph,
    v: &'a Vocabulary,
    query_nodes: &'a [&'a ConceptNode],
    candidates: &'a [Vec<&'a ConceptNode>],
    order: &'a [usize],
    assignment: BTreeMap<NodeId, NodeId>,
    /// Options for each query nesting of each assigned node, pushed in
    /// assignment order: ((query node, query nesting type), options).
    #[allow(clippy::type_complexity)]
    nest_options: Vec<((NodeId, TypeIdentifier), NestOptions)>,
    out: Vec<ProjectionMapping>,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize) {
        if depth == self.order.len() {
            self.emit();
            return;
        }
        let qi = self.order[depth];
        let q = self.query_nodes[qi];
        for t in &self.candidates[qi] {
            self.assignment.insert(q.id, t.id);
            let nests_before = self.nest_options.len();
            if self.assign_consistent(q, t) {
                self.descend(depth + 1);
            }
            self.nest_options.truncate(nests_before);
            self.assignment.remove(&q.id);
        }
    }

    /// Checks run when `q` is assigned to `t`: edge constraints that just
    /// became fully bound, and eager enumeration of nesting options.
    fn assign_consistent(&mut self, q: &ConceptNode, t: &ConceptNode) -> bool {
        for edge in self.query.edges() {
            if !edge.args.contains(&q.id) {
                continue;
            }
            let Some(mapped) = edge
                .args
                .iter()
                .map(|a| self.assignment.get(a).copied())
                .collect::<Option<Vec<NodeId>>>()
            else {
                continue; // not fully bound yet
            };
            let realized = self.target.edges().iter().any(|te| {
                te.args == mapped
                    && self.v.subsumes(edge.relation_type, te.relation_type).unwrap_or(false)
            });
            if !realized {
                return false;
            }
        }

        for (query_nesting, query_inner) in &q.nestings {
            let mut options: NestOptions = Vec::new();
            for (target_nesting, target_inner) in &t.nestings {
                if !self.v.subsumes(*query_nesting, *target_nesting).unwrap_or(false) {
                    continue;
                }
                for child in enumerate_level(query_inner, target_inner, self.v) {
                    options.push((*target_nesting, child));
                }
            }
            if options.is_empty() {
                return false;
            }
            self.nest_options.push(((q.id, *query_nesting), options));
        }
        true
    }

    /// Full assignment reached: compute canonical edge witnesses and emit
    /// the cross product of all nesting options.
    fn emit(&mut self) {
        let mut edge_map = Vec::with_capacity(self.query.edges().len());
        for edge in self.query.edges() {
            let mapped: Vec<NodeId> = edge.args.iter().map(|a| self.assignment[a]).collect();
            let witness = self
                .target
                .edges()
                .iter()
                .position(|te| {
                    te.args == mapped
                        && self.v.subsumes(edge.relation_type, te.relation_type).unwrap_or(false)
                })
                .expect("edge constraints checked during search");
            edge_map.push(witness);
        }

        let base = ProjectionMapping {
            anchor: Vec::new(),
            concept_map: self.assignment.clone(),
            edge_map,
            nested: BTreeMap::new(),
        };
        let mut combos = vec![base];
        for (key, options) in &self.nest_options {
            let mut next = Vec::with_capacity(combos.len() * options.len());
            for combo in &combos {
                for (target_nesting, child) in options {
                    let mut extended = combo.clone();
                    extended.nested.insert(*key, (*target_nesting, Box::new(child.clone())));
                    next.push(extended);
                }
            }
            combos = next;
        }
        self.out.extend(combos);
    }
}

/// Violation found by [`verify_mapping`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid mapping: {0}")]
pub struct MappingViolation(pub String);

/// Re-check every projection invariant of a mapping, independently of the
/// search. Deliberately written as a direct transcription of the rules.
pub fn verify_mapping(
    query: &ConceptualGraph,
    target: &ConceptualGraph,
    v: &Vocabulary,
    mapping: &ProjectionMapping,
) -> Result<(), MappingViolation> {
    let fail = |msg: String| Err(MappingViolation(msg));

    // Resolve the anchor level.
    let mut level = target;
    for (host, nesting_type) in &mapping.anchor {
        let Some(node) = level.node(*host) else {
            return fail(format!("anchor hop through missing node {host}"));
        };
        let Some(inner) = node.nesting(*nesting_type) else {
            return fail(format!("anchor hop through missing nesting {host}/{nesting_type}"));
        };
        level = inner;
    }

    if query.is_empty() {
        if !mapping.concept_map.is_empty() || !mapping.edge_map.is_empty() {
            return fail("empty query with non-empty mapping".into());
        }
        return Ok(());
    }

    // Concept map: total on query nodes, no extras, each pair compatible.
    for q in query.nodes() {
        let Some(t_id) = mapping.concept_map.get(&q.id) else {
            return fail(format!("query node {} is unmapped", q.id));
        };
        let Some(t) = level.node(*t_id) else {
            return fail(format!("image {t_id} is not at the anchor level"));
        };
        if !v.subsumes(q.concept_type, t.concept_type).unwrap_or(false) {
            return fail(format!(
                "type {} does not subsume image type {}",
                q.concept_type, t.concept_type
            ));
        }
        if let Referent::Individual { keyword, language, .. } = &q.referent {
            match &t.referent {
                Referent::Generic => {
                    return fail(format!("individual query node {} mapped to a generic", q.id))
                }
                Referent::Individual { keyword: tk, language: tl, .. } => {
                    if keyword != tk {
                        return fail(format!("keyword mismatch on {}", q.id));
                    }
                    if language.is_some() && language != tl {
                        return fail(format!("language mismatch on {}", q.id));
                    }
                }
            }
        }

        // Nesting constraints of this query node.
        for (query_nesting, query_inner) in &q.nestings {
            let Some((chosen, child)) = mapping.nested.get(&(q.id, *query_nesting)) else {
                return fail(format!("nesting {}/{} is unmapped", q.id, query_nesting));
            };
            if !v.subsumes(*query_nesting, *chosen).unwrap_or(false) {
                return fail(format!(
                    "nesting type {query_nesting} does not subsume chosen {chosen}"
                ));
            }
            let Some(target_inner) = t.nesting(*chosen) else {
                return fail(format!("image node {t_id} has no {chosen} nesting"));
            };
            if !child.anchor.is_empty() {
                return fail("child mapping carries an anchor".into());
            }
            verify_mapping(query_inner, target_inner, v, child)?;
        }
    }
    for q_id in mapping.concept_map.keys() {
        if query.node(*q_id).is_none() {
            return fail(format!("mapping covers {q_id}, which is not a query node"));
        }
    }
    for (q_id, query_nesting) in mapping.nested.keys() {
        let valid = query.node(*q_id).is_some_and(|q| q.nesting(*query_nesting).is_some());
        if !valid {
            return fail(format!(
                "mapping covers nesting {q_id}/{query_nesting}, which the query lacks"
            ));
        }
    }

    // Edge witnesses: one per query edge, compatible, pointwise mapped.
    if mapping.edge_map.len() != query.edges().len() {
        return fail(format!(
            "expected {} edge witnesses, found {}",
            query.edges().len(),
            mapping.edge_map.len()
        ));
    }
    for (edge, &witness) in query.edges().iter().zip(&mapping.edge_map) {
        let Some(te) = level.edges().get(witness) else {
            return fail(format!("edge witness #{witness} is out of range"));
        };
        if !v.subsumes(edge.relation_type, te.relation_type).unwrap_or(false) {
            return fail(format!(
                "relation {} does not subsume witness relation {}",
                edge.relation_type, te.relation_type
            ));
        }
        let Some(mapped) = edge
            .args
            .iter()
            .map(|a| mapping.concept_map.get(a).copied())
            .collect::<Option<Vec<NodeId>>>()
        else {
            return fail(format!("edge {edge} has an unmapped argument"));
        };
        if te.args != mapped {
            return fail(format!("witness arguments do not match for {edge}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
