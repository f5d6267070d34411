//! Shared fixtures and random generators for the integration suites.
//!
//! Generators are seeded ChaCha8 streams, so every suite is reproducible
//! from its stated seed; the bundled vocabulary is the type pool for random
//! graphs, while random vocabularies carry their own independently recorded
//! parent sets for brute-force cross-checks.
#![allow(dead_code)]

use std::collections::BTreeSet;

use pci::annotation::{
    AnnotationStore, FieldText, Keyword, KeywordKind, MediaAsset, Segment, SegmentAnnotation,
};
use pci::graph::{ConceptualGraph, GraphKind, KeywordSource, Lang, NodeId, Referent};
use pci::pci_data::{self, BundledData};
use pci::vocabulary::{TypeIdentifier, Vocabulary, VocabularyBuilder};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bundled() -> BundledData {
    pci_data::load_bundled().expect("bundled data is self-consistent")
}

pub fn lang(code: &str) -> Lang {
    Lang::new(code).expect("valid language code")
}

/// A random vocabulary plus an independent record of its parent edges,
/// kept as dense indices so brute-force reachability never touches the
/// library's closure code.
pub struct RandomVocab {
    pub vocabulary: Vocabulary,
    /// `parents[i]` holds the dense indices of theme i's parents; index 0
    /// is the root.
    pub parents: Vec<Vec<usize>>,
    /// Frozen identifier of each dense index.
    pub ids: Vec<TypeIdentifier>,
}

/// Generate a rooted DAG of up to `max_types` themes. Every non-root theme
/// picks 1 to 3 parents among the earlier themes, so acyclicity and
/// reachability hold by construction.
pub fn random_vocabulary(rng: &mut ChaCha8Rng, max_types: usize) -> RandomVocab {
    let n = rng.random_range(1..=max_types.max(1));
    let mut b = VocabularyBuilder::new("K0");
    let mut parents: Vec<Vec<usize>> = vec![Vec::new()];
    for i in 1..n {
        let want = 1 + rng.random_range(0..3usize.min(i));
        let mut picked = BTreeSet::new();
        while picked.len() < want {
            picked.insert(rng.random_range(0..i));
        }
        b.concept(&format!("K{i}"), picked.iter().map(|p| format!("K{p}")));
        parents.push(picked.into_iter().collect());
    }
    b.relation("Links", 2, Vec::<&str>::new());
    b.nesting("Topic", Vec::<&str>::new());
    let vocabulary = b.build().expect("generated DAG is rooted and acyclic");
    let ids = (0..n)
        .map(|i| vocabulary.concept_by_label(&format!("K{i}")).expect("declared above").id)
        .collect();
    RandomVocab { vocabulary, parents, ids }
}

/// Reachability along recorded parent edges, written against the dense
/// indices only.
pub fn brute_force_subsumes(parents: &[Vec<usize>], general: usize, specific: usize) -> bool {
    let mut seen = vec![false; parents.len()];
    let mut stack = vec![specific];
    while let Some(x) = stack.pop() {
        if x == general {
            return true;
        }
        if seen[x] {
            continue;
        }
        seen[x] = true;
        stack.extend(parents[x].iter().copied());
    }
    false
}

/// Type pools drawn from a vocabulary, for random graph generation.
pub struct GraphPool {
    pub themes: Vec<TypeIdentifier>,
    pub relations: Vec<TypeIdentifier>,
    pub nesting: TypeIdentifier,
}

impl GraphPool {
    pub fn from_vocabulary(v: &Vocabulary) -> GraphPool {
        GraphPool {
            themes: v.concepts().map(|c| c.id).collect(),
            relations: v.relations().map(|r| r.id).collect(),
            nesting: v.nestings().next().expect("at least one nesting type").id,
        }
    }
}

/// Small keyword and language pools keep random referents likely to collide,
/// which is what makes projection cases interesting.
pub fn random_referent(rng: &mut ChaCha8Rng) -> Referent {
    if rng.random_bool(0.5) {
        return Referent::Generic;
    }
    let keyword = *["ash", "birch", "cedar"].choose(rng).expect("non-empty");
    let language = *[None, Some("eng"), Some("fra")].choose(rng).expect("non-empty");
    Referent::Individual {
        keyword: keyword.to_string(),
        language: language.map(lang),
        source: KeywordSource::Free,
    }
}

/// A random graph over the pool: up to `max_nodes` concept nodes, a few
/// binary edges, and for `levels > 0` a chance of one nesting per node.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    pool: &GraphPool,
    kind: GraphKind,
    min_nodes: usize,
    max_nodes: usize,
    levels: usize,
) -> ConceptualGraph {
    let mut g = ConceptualGraph::new(kind);
    let n = rng.random_range(min_nodes..=max_nodes);
    let mut ids: Vec<NodeId> = Vec::new();
    for _ in 0..n {
        let theme = *pool.themes.choose(rng).expect("non-empty");
        ids.push(g.add_concept(theme, random_referent(rng)));
    }
    if !ids.is_empty() {
        for _ in 0..rng.random_range(0..=n.min(3)) {
            let relation = *pool.relations.choose(rng).expect("non-empty");
            let a = *ids.choose(rng).expect("non-empty");
            let b = *ids.choose(rng).expect("non-empty");
            g.add_relation(relation, vec![a, b]).expect("both nodes exist");
        }
    }
    if levels > 0 {
        for id in ids {
            if rng.random_bool(0.3) {
                let inner = random_graph(rng, pool, GraphKind::Topical, 1, max_nodes, levels - 1);
                g.attach_nesting(id, pool.nesting, inner).expect("first nesting on this node");
            }
        }
    }
    g
}

/// Derive a query that provably projects into `target`: pick an anchor
/// level, keep a subset of its nodes and edges, generalize kept types to
/// random ancestors and some referents to generic, and recurse into a
/// subset of the kept nodes' nestings. The inclusion mapping survives every
/// step, so the result always has at least one projection (unless the
/// subset came out empty, which still projects vacuously).
pub fn query_from_target(
    rng: &mut ChaCha8Rng,
    v: &Vocabulary,
    target: &ConceptualGraph,
) -> ConceptualGraph {
    // Descend to a random anchor level first.
    let mut level = target;
    loop {
        let inners: Vec<&ConceptualGraph> =
            level.nodes().flat_map(|n| n.nestings.iter().map(|(_, inner)| inner)).collect();
        if inners.is_empty() || rng.random_bool(0.5) {
            break;
        }
        level = inners.choose(rng).expect("non-empty");
    }
    generalize_level(rng, v, level)
}

fn generalize_level(
    rng: &mut ChaCha8Rng,
    v: &Vocabulary,
    level: &ConceptualGraph,
) -> ConceptualGraph {
    let mut g = ConceptualGraph::new(GraphKind::Topical);
    let mut image = std::collections::BTreeMap::new();
    let nodes: Vec<_> = level.nodes().collect();
    for node in &nodes {
        if !image.is_empty() && rng.random_bool(0.3) {
            continue; // drop this node, keep at least one
        }
        let concept_type = if rng.random_bool(0.5) {
            let ups = strict_ancestors(v, node.concept_type);
            ups.choose(rng).copied().unwrap_or(node.concept_type)
        } else {
            node.concept_type
        };
        let referent = match &node.referent {
            Referent::Individual { keyword, language, source } if rng.random_bool(0.6) => {
                Referent::Individual {
                    keyword: keyword.clone(),
                    language: if rng.random_bool(0.5) { None } else { *language },
                    source: source.clone(),
                }
            }
            _ => Referent::Generic,
        };
        let id = g.add_concept(concept_type, referent);
        image.insert(node.id, id);
        if rng.random_bool(0.4) {
            if let Some((nesting_type, inner)) = node.nestings.first() {
                let sub = generalize_level(rng, v, inner);
                if !sub.is_empty() {
                    g.attach_nesting(id, *nesting_type, sub).expect("first nesting on this node");
                }
            }
        }
    }
    for edge in level.edges() {
        if rng.random_bool(0.3) {
            continue;
        }
        let mapped: Option<Vec<NodeId>> = edge.args.iter().map(|a| image.get(a).copied()).collect();
        if let Some(args) = mapped {
            g.add_relation(edge.relation_type, args).expect("mapped nodes exist");
        }
    }
    g
}

/// Concept types in rebuild order: all nodes of a level in id order, then
/// each node's nestings. Pairs with [`rebuild_replacing`].
pub fn node_types_deep(g: &ConceptualGraph) -> Vec<TypeIdentifier> {
    let mut out = Vec::new();
    fn walk(g: &ConceptualGraph, out: &mut Vec<TypeIdentifier>) {
        for node in g.nodes() {
            out.push(node.concept_type);
        }
        for node in g.nodes() {
            for (_, inner) in &node.nestings {
                walk(inner, out);
            }
        }
    }
    walk(g, &mut out);
    out
}

/// Copy the graph, substituting `new_type` for the node at position `seq`
/// of the [`node_types_deep`] order.
pub fn rebuild_replacing(
    g: &ConceptualGraph,
    seq: usize,
    new_type: TypeIdentifier,
) -> ConceptualGraph {
    fn walk(
        g: &ConceptualGraph,
        counter: &mut usize,
        seq: usize,
        new_type: TypeIdentifier,
    ) -> ConceptualGraph {
        let mut out = ConceptualGraph::new(g.kind);
        for node in g.nodes() {
            let t = if *counter == seq { new_type } else { node.concept_type };
            *counter += 1;
            out.add_concept_as(node.id, t, node.referent.clone()).expect("ids stay unique");
        }
        for edge in g.edges() {
            out.add_relation(edge.relation_type, edge.args.clone()).expect("nodes exist");
        }
        for node in g.nodes() {
            for (nesting_type, inner) in &node.nestings {
                let rebuilt = walk(inner, counter, seq, new_type);
                out.attach_nesting(node.id, *nesting_type, rebuilt)
                    .expect("copied nesting types stay distinct");
            }
        }
        out
    }
    let mut counter = 0;
    walk(g, &mut counter, seq, new_type)
}

/// Every strict ancestor of a theme, in identifier order.
pub fn strict_ancestors(v: &Vocabulary, id: TypeIdentifier) -> Vec<TypeIdentifier> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<TypeIdentifier> =
        v.concept(id).expect("known theme").parents.iter().copied().collect();
    while let Some(x) = stack.pop() {
        if seen.insert(x) {
            stack.extend(v.concept(x).expect("known theme").parents.iter().copied());
        }
    }
    seen.into_iter().collect()
}

/// Type pools that only yield well-formed material: annotations are added
/// through the validating API, so store generation has to respect the
/// discourse-topic obligation, signature slots, and mark placement.
pub struct ValidPool {
    /// Themes under Discourse Type; these nodes must carry a topic nesting
    /// in a narrative configuration.
    pub discourse: Vec<TypeIdentifier>,
    /// Themes not under Discourse Type; these nodes may not.
    pub plain: Vec<TypeIdentifier>,
    /// Relations whose signature never constrains (none, or all-root slots).
    pub relations: Vec<TypeIdentifier>,
    /// Themes under Pragmatic Description, valid as pragmatic marks.
    pub marks: Vec<TypeIdentifier>,
    pub topic: TypeIdentifier,
}

impl ValidPool {
    pub fn from_vocabulary(v: &Vocabulary) -> ValidPool {
        let discourse_type = v.concept_by_label("Discourse Type").expect("bundled theme").id;
        let pragmatic = v.concept_by_label("Pragmatic Description").expect("bundled theme").id;
        let root = v.root_id();
        let under = |ancestor: TypeIdentifier, id: TypeIdentifier| {
            v.subsumes(ancestor, id).expect("same kind")
        };
        ValidPool {
            discourse: v.concepts().map(|c| c.id).filter(|&c| under(discourse_type, c)).collect(),
            plain: v.concepts().map(|c| c.id).filter(|&c| !under(discourse_type, c)).collect(),
            relations: v
                .relations()
                .filter(|r| r.signature.as_ref().is_none_or(|sig| sig.iter().all(|&s| s == root)))
                .map(|r| r.id)
                .collect(),
            marks: v.concepts().map(|c| c.id).filter(|&c| under(pragmatic, c)).collect(),
            topic: v.nesting_by_label("Discourse Topic").expect("bundled nesting").id,
        }
    }
}

/// A topical graph that passes well-formedness: free-keyword referents,
/// unconstraining relations, and deeper nestings only on Discourse-Type
/// nodes.
pub fn random_valid_topic(
    rng: &mut ChaCha8Rng,
    pool: &ValidPool,
    levels: usize,
) -> ConceptualGraph {
    let mut g = ConceptualGraph::new(GraphKind::Topical);
    let mut ids = Vec::new();
    for _ in 0..rng.random_range(1..=4) {
        let deepen = levels > 0 && rng.random_bool(0.2);
        let theme = if deepen {
            *pool.discourse.choose(rng).expect("non-empty")
        } else {
            *pool.plain.choose(rng).expect("non-empty")
        };
        let id = g.add_concept(theme, random_referent(rng));
        if deepen {
            let inner = random_valid_topic(rng, pool, levels - 1);
            g.attach_nesting(id, pool.topic, inner).expect("first nesting on this node");
        }
        ids.push(id);
    }
    for _ in 0..rng.random_range(0..=2) {
        let relation = *pool.relations.choose(rng).expect("non-empty");
        let a = *ids.choose(rng).expect("non-empty");
        let b = *ids.choose(rng).expect("non-empty");
        g.add_relation(relation, vec![a, b]).expect("both nodes exist");
    }
    g
}

/// A narrative graph that passes well-formedness: every Discourse-Type node
/// carries a topic, no other node does.
pub fn random_valid_narrative(rng: &mut ChaCha8Rng, pool: &ValidPool) -> ConceptualGraph {
    let mut g = ConceptualGraph::new(GraphKind::Narrative);
    let mut ids = Vec::new();
    for _ in 0..rng.random_range(1..=3) {
        if rng.random_bool(0.6) {
            let theme = *pool.discourse.choose(rng).expect("non-empty");
            let id = g.add_concept(theme, Referent::Generic);
            let inner = random_valid_topic(rng, pool, 1);
            g.attach_nesting(id, pool.topic, inner).expect("first nesting on this node");
            ids.push(id);
        } else {
            let theme = *pool.plain.choose(rng).expect("non-empty");
            ids.push(g.add_concept(theme, random_referent(rng)));
        }
    }
    for _ in 0..rng.random_range(0..=2) {
        let relation = *pool.relations.choose(rng).expect("non-empty");
        let a = *ids.choose(rng).expect("non-empty");
        let b = *ids.choose(rng).expect("non-empty");
        g.add_relation(relation, vec![a, b]).expect("both nodes exist");
    }
    g
}

/// A random store of valid annotations over the bundled data, inserted
/// through the validating API.
pub fn random_store(
    rng: &mut ChaCha8Rng,
    pool: &ValidPool,
    vocabulary: &Vocabulary,
    catalog: &pci::annotation::CvCatalog,
) -> AnnotationStore {
    let mut store = AnnotationStore::new();
    let assets = rng.random_range(1..=2);
    for a in 0..assets {
        let duration = 60_000 * rng.random_range(1..=20u64);
        let mut asset =
            MediaAsset::new(&format!("asset{a}"), &format!("media/asset{a}.mkv"), duration);
        if rng.random_bool(0.5) {
            asset.languages = vec![lang("eng"), lang("sme")];
        }
        store.add_asset(asset).expect("fresh id");
    }
    for i in 0..rng.random_range(0..=4) {
        let asset_id = format!("asset{}", rng.random_range(0..assets));
        let duration = store.asset(&asset_id).expect("added above").duration_ms;
        let start = rng.random_range(0..duration);
        let end = rng.random_range(start + 1..=duration);
        let graph = random_valid_narrative(rng, pool);
        let mut annotation =
            SegmentAnnotation::new(&format!("r{i:02}"), Segment::new(&asset_id, start, end), graph);
        if rng.random_bool(0.5) {
            annotation.set_field(lang("eng"), Some("A title"), Some("A \"summary\" line."));
        }
        if rng.random_bool(0.4) {
            annotation.keywords.push(Keyword::free(
                "herding",
                lang("eng"),
                KeywordKind::ExtractedTerm,
            ));
        }
        if rng.random_bool(0.4) {
            annotation.keywords.push(Keyword::controlled(
                "sami",
                lang("eng"),
                KeywordKind::Paraphrase,
                "peoples",
            ));
        }
        if rng.random_bool(0.3) {
            annotation.pragmatic_marks.push(*pool.marks.choose(rng).expect("non-empty"));
        }
        store
            .add_annotation(annotation, vocabulary, catalog)
            .expect("generated annotations are valid");
    }
    store
}

// FieldText is re-exported for suites that inspect parsed stores directly.
pub type Field = FieldText;
