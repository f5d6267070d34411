use super::*;
use crate::graph::{ConceptualGraph, GraphKind, Lang, Referent};
use crate::vocabulary::Vocabulary;

fn vocab() -> Vocabulary {
    Vocabulary::parse(concat!(
        "root \"Top\"\n",
        "concept \"Actor\" parent=T-1\n",
        "concept \"Social Group\" parent=\"Actor\"\n",
        "concept \"Indigenous People\" parent=\"Social Group\"\n",
        "concept \"Minority\" parent=\"Social Group\"\n",
        "concept \"Discourse Type\" parent=T-1\n",
        "concept \"Work\" parent=T-1\n",
        "relation \"Relates\" arity=2\n",
        "relation \"Acts On\" arity=2 signature=\"Actor\",T-1 parent=\"Relates\"\n",
        "relation \"Temporal\" arity=2 parent=\"Relates\"\n",
        "nesting \"Discourse Topic\"\n",
        "nesting \"Subtopic\" parent=\"Discourse Topic\"\n",
    ))
    .unwrap()
}

fn tid(v: &Vocabulary, label: &str) -> TypeIdentifier {
    v.concept_by_label(label)
        .map(|c| c.id)
        .or_else(|| v.relation_by_label(label).map(|r| r.id))
        .or_else(|| v.nesting_by_label(label).map(|n| n.id))
        .unwrap_or_else(|| panic!("\"{label}\" not in test vocabulary"))
}

fn lang(code: &str) -> Lang {
    Lang::new(code).unwrap()
}

/// project, oracle, and verify_mapping must agree on every test case.
fn checked_project(
    query: &ConceptualGraph,
    target: &ConceptualGraph,
    v: &Vocabulary,
) -> Vec<ProjectionMapping> {
    let mappings = project(query, target, v).expect("projection failed");
    let count = count_projections_oracle(query, target, v).expect("oracle failed");
    assert_eq!(mappings.len() as u64, count, "search disagrees with oracle");
    for m in &mappings {
        verify_mapping(query, target, v, m)
            .unwrap_or_else(|e| panic!("search produced an invalid mapping: {e}"));
    }
    mappings
}

#[test]
fn empty_query_yields_exactly_one_vacuous_mapping() {
    let v = vocab();
    let query = ConceptualGraph::new(GraphKind::Topical);

    let mut target = ConceptualGraph::new(GraphKind::Narrative);
    let host = target.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut inner = ConceptualGraph::new(GraphKind::Topical);
    inner.add_concept(tid(&v, "Minority"), Referent::individual("walachians"));
    target.attach_nesting(host, tid(&v, "Discourse Topic"), inner).unwrap();

    let mappings = checked_project(&query, &target, &v);
    assert_eq!(mappings.len(), 1);
    assert!(mappings[0].concept_map.is_empty());
    assert!(mappings[0].edge_map.is_empty());
    assert!(mappings[0].anchor.is_empty());

    // Also one mapping into the empty target.
    let empty_target = ConceptualGraph::new(GraphKind::Narrative);
    assert_eq!(checked_project(&query, &empty_target, &v).len(), 1);
}

#[test]
fn generic_query_matches_specialized_individual() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Topical);
    let q = query.add_concept(tid(&v, "Social Group"), Referent::Generic);

    let mut target = ConceptualGraph::new(GraphKind::Topical);
    let t = target.add_concept(tid(&v, "Minority"), Referent::individual("walachians"));

    let mappings = checked_project(&query, &target, &v);
    assert_eq!(mappings.len(), 1);
    assert_eq!(mappings[0].concept_map.get(&q), Some(&t));
}

#[test]
fn individual_query_rejects_generic_target() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Topical);
    query.add_concept(tid(&v, "Minority"), Referent::individual("walachians"));

    let mut target = ConceptualGraph::new(GraphKind::Topical);
    target.add_concept(tid(&v, "Minority"), Referent::Generic);

    assert!(checked_project(&query, &target, &v).is_empty());
}

#[test]
fn individual_query_requires_equal_keyword() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Topical);
    query.add_concept(tid(&v, "Minority"), Referent::individual("walachians"));

    let mut target = ConceptualGraph::new(GraphKind::Topical);
    target.add_concept(tid(&v, "Minority"), Referent::individual("huarpes"));

    assert!(checked_project(&query, &target, &v).is_empty());
}

#[test]
fn subsumption_is_directional() {
    let v = vocab();
    let mut general = ConceptualGraph::new(GraphKind::Topical);
    general.add_concept(tid(&v, "Actor"), Referent::Generic);
    let mut specific = ConceptualGraph::new(GraphKind::Topical);
    specific.add_concept(tid(&v, "Minority"), Referent::Generic);

    assert_eq!(checked_project(&general, &specific, &v).len(), 1);
    assert!(checked_project(&specific, &general, &v).is_empty());
}

#[test]
fn two_generics_over_three_candidates_give_nine_mappings() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Topical);
    query.add_concept(tid(&v, "Actor"), Referent::Generic);
    query.add_concept(tid(&v, "Actor"), Referent::Generic);

    let mut target = ConceptualGraph::new(GraphKind::Topical);
    target.add_concept(tid(&v, "Actor"), Referent::Generic);
    target.add_concept(tid(&v, "Social Group"), Referent::individual("huarpes"));
    target.add_concept(tid(&v, "Minority"), Referent::Generic);
    // A non-candidate must not contribute.
    target.add_concept(tid(&v, "Work"), Referent::Generic);

    assert_eq!(checked_project(&query, &target, &v).len(), 9);
}

#[test]
fn language_tags_untagged_matches_any_tagged_requires_equality() {
    let v = vocab();
    let mut tagged_target = ConceptualGraph::new(GraphKind::Topical);
    tagged_target
        .add_concept(tid(&v, "Minority"), Referent::individual_tagged("walachians", lang("fra")));
    let mut untagged_target = ConceptualGraph::new(GraphKind::Topical);
    untagged_target.add_concept(tid(&v, "Minority"), Referent::individual("walachians"));

    let build_query = |referent: Referent| {
        let mut q = ConceptualGraph::new(GraphKind::Topical);
        q.add_concept(tid(&v, "Minority"), referent);
        q
    };
    let untagged = build_query(Referent::individual("walachians"));
    let fra = build_query(Referent::individual_tagged("walachians", lang("fra")));
    let eng = build_query(Referent::individual_tagged("walachians", lang("eng")));

    assert_eq!(checked_project(&untagged, &tagged_target, &v).len(), 1);
    assert_eq!(checked_project(&fra, &tagged_target, &v).len(), 1);
    assert!(checked_project(&eng, &tagged_target, &v).is_empty());
    assert!(checked_project(&fra, &untagged_target, &v).is_empty());
    assert_eq!(checked_project(&untagged, &untagged_target, &v).len(), 1);
}

#[test]
fn edges_need_a_subsumed_witness_with_mapped_arguments() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Topical);
    let qa = query.add_concept(tid(&v, "Actor"), Referent::Generic);
    let qw = query.add_concept(tid(&v, "Work"), Referent::Generic);
    query.add_relation(tid(&v, "Relates"), vec![qa, qw]).unwrap();

    let mut target = ConceptualGraph::new(GraphKind::Topical);
    let ta = target.add_concept(tid(&v, "Minority"), Referent::individual("walachians"));
    let tw = target.add_concept(tid(&v, "Work"), Referent::individual("basketry"));
    target.add_relation(tid(&v, "Acts On"), vec![ta, tw]).unwrap();

    let mappings = checked_project(&query, &target, &v);
    assert_eq!(mappings.len(), 1);
    assert_eq!(mappings[0].edge_map, vec![0]);

    // Reversed argument order: no witness.
    let mut reversed = ConceptualGraph::new(GraphKind::Topical);
    let ra = reversed.add_concept(tid(&v, "Minority"), Referent::Generic);
    let rw = reversed.add_concept(tid(&v, "Work"), Referent::Generic);
    reversed.add_relation(tid(&v, "Acts On"), vec![rw, ra]).unwrap();
    assert!(checked_project(&query, &reversed, &v).is_empty());
}

#[test]
fn relation_subsumption_is_directional() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Topical);
    let qa = query.add_concept(tid(&v, "Actor"), Referent::Generic);
    let qw = query.add_concept(tid(&v, "Work"), Referent::Generic);
    query.add_relation(tid(&v, "Acts On"), vec![qa, qw]).unwrap();

    let mut target = ConceptualGraph::new(GraphKind::Topical);
    let ta = target.add_concept(tid(&v, "Actor"), Referent::Generic);
    let tw = target.add_concept(tid(&v, "Work"), Referent::Generic);
    target.add_relation(tid(&v, "Relates"), vec![ta, tw]).unwrap();

    // The generic relation does not specialize to the specific query edge.
    assert!(checked_project(&query, &target, &v).is_empty());
}

#[test]
fn homomorphism_may_merge_query_nodes() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Topical);
    let a = query.add_concept(tid(&v, "Actor"), Referent::Generic);
    let b = query.add_concept(tid(&v, "Actor"), Referent::Generic);
    query.add_relation(tid(&v, "Relates"), vec![a, b]).unwrap();

    let mut target = ConceptualGraph::new(GraphKind::Topical);
    let t = target.add_concept(tid(&v, "Minority"), Referent::Generic);
    target.add_relation(tid(&v, "Relates"), vec![t, t]).unwrap();

    let mappings = checked_project(&query, &target, &v);
    assert_eq!(mappings.len(), 1);
    assert_eq!(mappings[0].concept_map.get(&a), Some(&t));
    assert_eq!(mappings[0].concept_map.get(&b), Some(&t));
}

#[test]
fn query_anchors_inside_nestings() {
    let v = vocab();
    let mut target = ConceptualGraph::new(GraphKind::Narrative);
    let host = target.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut inner = ConceptualGraph::new(GraphKind::Topical);
    inner.add_concept(tid(&v, "Minority"), Referent::individual("walachians"));
    target.attach_nesting(host, tid(&v, "Discourse Topic"), inner).unwrap();

    let mut group_query = ConceptualGraph::new(GraphKind::Topical);
    group_query.add_concept(tid(&v, "Social Group"), Referent::Generic);
    let mappings = checked_project(&group_query, &target, &v);
    assert_eq!(mappings.len(), 1);
    assert_eq!(mappings[0].anchor, vec![(host, tid(&v, "Discourse Topic"))]);
    assert_eq!(mappings[0].anchor_path(), "n1/C-1");

    // A query generic enough to match both levels matches once per level.
    let mut top_query = ConceptualGraph::new(GraphKind::Topical);
    top_query.add_concept(tid(&v, "Top"), Referent::Generic);
    let mappings = checked_project(&top_query, &target, &v);
    assert_eq!(mappings.len(), 2);
    assert!(mappings[0].anchor.is_empty());
    assert_eq!(mappings[1].anchor_path(), "n1/C-1");
}

#[test]
fn project_at_stays_on_one_level() {
    let v = vocab();
    let mut target = ConceptualGraph::new(GraphKind::Narrative);
    let host = target.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut inner = ConceptualGraph::new(GraphKind::Topical);
    inner.add_concept(tid(&v, "Minority"), Referent::Generic);
    target.attach_nesting(host, tid(&v, "Discourse Topic"), inner).unwrap();

    let mut query = ConceptualGraph::new(GraphKind::Topical);
    query.add_concept(tid(&v, "Minority"), Referent::Generic);

    assert_eq!(project(&query, &target, &v).unwrap().len(), 1);
    assert!(project_at(&query, &target, &v).unwrap().is_empty());
}

#[test]
fn query_nestings_are_mirrored_below_the_anchor() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Narrative);
    let qh = query.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut q_inner = ConceptualGraph::new(GraphKind::Topical);
    let q_nested = q_inner.add_concept(tid(&v, "Social Group"), Referent::Generic);
    query.attach_nesting(qh, tid(&v, "Discourse Topic"), q_inner).unwrap();

    // Satisfying target: the nested level holds a subsumed node.
    let mut good = ConceptualGraph::new(GraphKind::Narrative);
    let gh = good.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut g_inner = ConceptualGraph::new(GraphKind::Topical);
    let g_minority = g_inner.add_concept(tid(&v, "Minority"), Referent::individual("walachians"));
    g_inner.add_concept(tid(&v, "Work"), Referent::Generic);
    good.attach_nesting(gh, tid(&v, "Discourse Topic"), g_inner).unwrap();

    let mappings = checked_project(&query, &good, &v);
    assert_eq!(mappings.len(), 1);
    let (chosen, child) = &mappings[0].nested[&(qh, tid(&v, "Discourse Topic"))];
    assert_eq!(*chosen, tid(&v, "Discourse Topic"));
    assert_eq!(child.concept_map.get(&q_nested), Some(&g_minority));

    // Host node without the nesting: no mapping.
    let mut bare = ConceptualGraph::new(GraphKind::Narrative);
    bare.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    assert!(checked_project(&query, &bare, &v).is_empty());

    // Nesting present but without a subsumed node: no mapping.
    let mut off_topic = ConceptualGraph::new(GraphKind::Narrative);
    let oh = off_topic.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut o_inner = ConceptualGraph::new(GraphKind::Topical);
    o_inner.add_concept(tid(&v, "Work"), Referent::Generic);
    off_topic.attach_nesting(oh, tid(&v, "Discourse Topic"), o_inner).unwrap();
    assert!(checked_project(&query, &off_topic, &v).is_empty());
}

#[test]
fn nesting_types_match_by_subsumption() {
    let v = vocab();
    let build_query = |nesting: &str| {
        let mut q = ConceptualGraph::new(GraphKind::Narrative);
        let qh = q.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
        let mut inner = ConceptualGraph::new(GraphKind::Topical);
        inner.add_concept(tid(&v, "Social Group"), Referent::Generic);
        q.attach_nesting(qh, tid(&v, nesting), inner).unwrap();
        q
    };
    let build_target = |nesting: &str| {
        let mut t = ConceptualGraph::new(GraphKind::Narrative);
        let th = t.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
        let mut inner = ConceptualGraph::new(GraphKind::Topical);
        inner.add_concept(tid(&v, "Minority"), Referent::Generic);
        t.attach_nesting(th, tid(&v, nesting), inner).unwrap();
        t
    };

    // General query nesting accepts the specialized target nesting.
    let mappings = checked_project(&build_query("Discourse Topic"), &build_target("Subtopic"), &v);
    assert_eq!(mappings.len(), 1);
    let (chosen, _child) = mappings[0].nested.values().next().unwrap();
    assert_eq!(*chosen, tid(&v, "Subtopic"));

    // Specialized query nesting rejects the general target nesting.
    assert!(
        checked_project(&build_query("Subtopic"), &build_target("Discourse Topic"), &v).is_empty()
    );
}

#[test]
fn query_nesting_depth_is_exact() {
    let v = vocab();
    // Query: a discourse node whose topic holds a social group.
    let mut query = ConceptualGraph::new(GraphKind::Narrative);
    let qh = query.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut q_inner = ConceptualGraph::new(GraphKind::Topical);
    q_inner.add_concept(tid(&v, "Social Group"), Referent::Generic);
    query.attach_nesting(qh, tid(&v, "Discourse Topic"), q_inner).unwrap();

    // Target: the group sits two levels down, under an intermediate
    // discourse node. The outer anchor fails, the nested anchor matches.
    let mut deepest = ConceptualGraph::new(GraphKind::Topical);
    deepest.add_concept(tid(&v, "Minority"), Referent::Generic);
    let mut middle = ConceptualGraph::new(GraphKind::Topical);
    let mh = middle.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    middle.attach_nesting(mh, tid(&v, "Discourse Topic"), deepest).unwrap();
    let mut target = ConceptualGraph::new(GraphKind::Narrative);
    let th = target.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    target.attach_nesting(th, tid(&v, "Discourse Topic"), middle).unwrap();

    let mappings = checked_project(&query, &target, &v);
    assert_eq!(mappings.len(), 1);
    assert_eq!(mappings[0].anchor, vec![(th, tid(&v, "Discourse Topic"))]);
}

#[test]
fn alternative_target_nestings_multiply_mappings() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Narrative);
    let qh = query.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut q_inner = ConceptualGraph::new(GraphKind::Topical);
    q_inner.add_concept(tid(&v, "Social Group"), Referent::Generic);
    query.attach_nesting(qh, tid(&v, "Discourse Topic"), q_inner).unwrap();

    let mut target = ConceptualGraph::new(GraphKind::Narrative);
    let th = target.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut first = ConceptualGraph::new(GraphKind::Topical);
    first.add_concept(tid(&v, "Minority"), Referent::Generic);
    target.attach_nesting(th, tid(&v, "Discourse Topic"), first).unwrap();
    let mut second = ConceptualGraph::new(GraphKind::Topical);
    second.add_concept(tid(&v, "Indigenous People"), Referent::Generic);
    target.attach_nesting(th, tid(&v, "Subtopic"), second).unwrap();

    // Both target nestings are compatible choices for the query topic.
    let mappings = checked_project(&query, &target, &v);
    assert_eq!(mappings.len(), 2);
    let choices: Vec<TypeIdentifier> =
        mappings.iter().map(|m| m.nested.values().next().unwrap().0).collect();
    assert_eq!(choices, vec![tid(&v, "Discourse Topic"), tid(&v, "Subtopic")]);
}

#[test]
fn empty_query_nesting_requires_a_compatible_nesting() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Narrative);
    let qh = query.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    query
        .attach_nesting(qh, tid(&v, "Discourse Topic"), ConceptualGraph::new(GraphKind::Topical))
        .unwrap();

    let mut bare = ConceptualGraph::new(GraphKind::Narrative);
    bare.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    assert!(checked_project(&query, &bare, &v).is_empty());

    let mut hosted = ConceptualGraph::new(GraphKind::Narrative);
    let hh = hosted.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut inner = ConceptualGraph::new(GraphKind::Topical);
    inner.add_concept(tid(&v, "Work"), Referent::Generic);
    hosted.attach_nesting(hh, tid(&v, "Discourse Topic"), inner).unwrap();
    let mappings = checked_project(&query, &hosted, &v);
    assert_eq!(mappings.len(), 1);
    let (_, child) = &mappings[0].nested[&(qh, tid(&v, "Discourse Topic"))];
    assert!(child.concept_map.is_empty());
}

#[test]
fn oracle_refuses_oversized_levels() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Topical);
    query.add_concept(tid(&v, "Actor"), Referent::Generic);

    let mut target = ConceptualGraph::new(GraphKind::Topical);
    for _ in 0..ORACLE_NODE_LIMIT + 1 {
        target.add_concept(tid(&v, "Actor"), Referent::Generic);
    }
    let err = count_projections_oracle(&query, &target, &v).unwrap_err();
    assert!(matches!(err, ProjectionError::TooLarge { nodes: 9, limit: 8 }));
    assert!(err.to_string().contains("size limit exceeded"));

    // The limit applies per level, including nested ones.
    let mut nested_target = ConceptualGraph::new(GraphKind::Narrative);
    let host = nested_target.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut inner = ConceptualGraph::new(GraphKind::Topical);
    for _ in 0..ORACLE_NODE_LIMIT + 1 {
        inner.add_concept(tid(&v, "Actor"), Referent::Generic);
    }
    nested_target.attach_nesting(host, tid(&v, "Discourse Topic"), inner).unwrap();
    assert!(count_projections_oracle(&query, &nested_target, &v).is_err());

    // The search itself has no such limit.
    assert_eq!(project(&query, &target, &v).unwrap().len(), 9);
}

#[test]
fn unknown_types_are_rejected() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Topical);
    query.add_concept(TypeIdentifier::theme(99), Referent::Generic);
    let target = ConceptualGraph::new(GraphKind::Topical);
    assert!(matches!(
        project(&query, &target, &v),
        Err(ProjectionError::UnknownType(id)) if id == TypeIdentifier::theme(99)
    ));

    // A relation identifier in a concept position is a kind mismatch.
    let mut mistyped = ConceptualGraph::new(GraphKind::Topical);
    mistyped.add_concept(tid(&v, "Relates"), Referent::Generic);
    assert!(project(&mistyped, &target, &v).is_err());

    // Unknown types inside the target are rejected too.
    let mut ok_query = ConceptualGraph::new(GraphKind::Topical);
    ok_query.add_concept(tid(&v, "Actor"), Referent::Generic);
    let mut bad_target = ConceptualGraph::new(GraphKind::Topical);
    let a = bad_target.add_concept(tid(&v, "Actor"), Referent::Generic);
    let b = bad_target.add_concept(tid(&v, "Actor"), Referent::Generic);
    bad_target.add_relation(TypeIdentifier::relation(40), vec![a, b]).unwrap();
    assert!(project(&ok_query, &bad_target, &v).is_err());
}

#[test]
fn results_are_sorted_and_deterministic() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Topical);
    query.add_concept(tid(&v, "Actor"), Referent::Generic);
    query.add_concept(tid(&v, "Social Group"), Referent::Generic);

    let mut target = ConceptualGraph::new(GraphKind::Narrative);
    let host = target.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut inner = ConceptualGraph::new(GraphKind::Topical);
    inner.add_concept(tid(&v, "Minority"), Referent::Generic);
    inner.add_concept(tid(&v, "Social Group"), Referent::Generic);
    inner.add_concept(tid(&v, "Indigenous People"), Referent::Generic);
    target.attach_nesting(host, tid(&v, "Discourse Topic"), inner).unwrap();

    let first = checked_project(&query, &target, &v);
    let second = checked_project(&query, &target, &v);
    assert_eq!(first, second);
    assert!(first.windows(2).all(|w| w[0] < w[1]), "sorted without duplicates");
    assert_eq!(first.len(), 9);
}

#[test]
fn verify_mapping_rejects_tampering() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Narrative);
    let qa = query.add_concept(tid(&v, "Actor"), Referent::Generic);
    let qw = query.add_concept(tid(&v, "Work"), Referent::Generic);
    query.add_relation(tid(&v, "Relates"), vec![qa, qw]).unwrap();
    let mut q_inner = ConceptualGraph::new(GraphKind::Topical);
    q_inner.add_concept(tid(&v, "Social Group"), Referent::Generic);
    query.attach_nesting(qa, tid(&v, "Discourse Topic"), q_inner).unwrap();

    let mut target = ConceptualGraph::new(GraphKind::Narrative);
    let ta = target.add_concept(tid(&v, "Minority"), Referent::Generic);
    let tw = target.add_concept(tid(&v, "Work"), Referent::Generic);
    target.add_relation(tid(&v, "Acts On"), vec![ta, tw]).unwrap();
    target.add_relation(tid(&v, "Temporal"), vec![tw, ta]).unwrap();
    let mut t_inner = ConceptualGraph::new(GraphKind::Topical);
    t_inner.add_concept(tid(&v, "Minority"), Referent::Generic);
    target.attach_nesting(ta, tid(&v, "Discourse Topic"), t_inner).unwrap();

    let mappings = checked_project(&query, &target, &v);
    assert_eq!(mappings.len(), 1);
    let good = &mappings[0];

    let mut wrong_image = good.clone();
    wrong_image.concept_map.insert(qa, tw);
    assert!(verify_mapping(&query, &target, &v, &wrong_image).is_err());

    let mut wrong_witness = good.clone();
    wrong_witness.edge_map = vec![1];
    assert!(verify_mapping(&query, &target, &v, &wrong_witness).is_err());

    let mut missing_nest = good.clone();
    missing_nest.nested.clear();
    assert!(verify_mapping(&query, &target, &v, &missing_nest).is_err());

    let mut missing_node = good.clone();
    missing_node.concept_map.remove(&qw);
    assert!(verify_mapping(&query, &target, &v, &missing_node).is_err());

    let mut phantom = good.clone();
    phantom.concept_map.insert(NodeId::new(9), tw);
    assert!(verify_mapping(&query, &target, &v, &phantom).is_err());

    let mut wrong_anchor = good.clone();
    wrong_anchor.anchor = vec![(ta, tid(&v, "Discourse Topic"))];
    assert!(verify_mapping(&query, &target, &v, &wrong_anchor).is_err());
}

#[test]
fn mapping_display_names_anchor_and_pairs() {
    let v = vocab();
    let mut query = ConceptualGraph::new(GraphKind::Topical);
    query.add_concept(tid(&v, "Social Group"), Referent::Generic);

    let mut target = ConceptualGraph::new(GraphKind::Narrative);
    let host = target.add_concept(tid(&v, "Discourse Type"), Referent::Generic);
    let mut inner = ConceptualGraph::new(GraphKind::Topical);
    inner.add_concept(tid(&v, "Minority"), Referent::Generic);
    target.attach_nesting(host, tid(&v, "Discourse Topic"), inner).unwrap();

    let mappings = checked_project(&query, &target, &v);
    assert_eq!(mappings[0].to_string(), "at n1/C-1: n1->n1");
    assert_eq!(ProjectionMapping::default().to_string(), "at outer: (empty)");
}
