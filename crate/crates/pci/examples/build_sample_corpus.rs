//! Deterministic generator for the sample corpus shipped under
//! `data/sample/corpus.pci`: three media assets and twenty-four segment
//! annotations spanning all four discourse-topic groups, plus a handful of
//! segments that belong to no group at all.
//!
//! Rerunning the generator rewrites the file byte-identically; the corpus is
//! pure data derived from the bundled templates, so it never drifts unless
//! the templates or this program change.
//!
//! Run with: `cargo run -p pci --example build_sample_corpus`

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use pci::annotation::{
    catalog, AnnotationStore, CvCatalog, Filler, Keyword, KeywordKind, MediaAsset, Segment,
    SegmentAnnotation, Template,
};
use pci::graph::{ConceptualGraph, GraphKind, Lang, Referent};
use pci::pci_data;
use pci::projection::answer_query;
use pci::vocabulary::Vocabulary;

fn lang(code: &str) -> Lang {
    Lang::new(code).expect("valid language code")
}

fn tid(v: &Vocabulary, label: &str) -> pci::TypeIdentifier {
    v.concept_by_label(label).expect("bundled theme").id
}

fn rid(v: &Vocabulary, label: &str) -> pci::TypeIdentifier {
    v.relation_by_label(label).expect("bundled relation").id
}

/// Fill a template: every entry is `slot -> keyword`, with group slots
/// resolved against the `peoples` vocabulary and language slots against
/// `iso639_2`; everything else stays a free keyword.
fn instance(template: &Template, catalog: &CvCatalog, fills: &[(&str, Filler)]) -> ConceptualGraph {
    let fillers: BTreeMap<String, Filler> =
        fills.iter().map(|(slot, f)| (slot.to_string(), f.clone())).collect();
    pci::annotation::instantiate_template(template, &fillers, catalog)
        .expect("bundled templates instantiate")
}

fn people(name: &str) -> Filler {
    Filler::controlled(name, Some(lang("eng")), "peoples")
}

fn language(name: &str) -> Filler {
    Filler::controlled(name, Some(lang("eng")), "iso639_2")
}

fn free(keyword: &str) -> Filler {
    Filler::free(keyword)
}

fn main() {
    let data = pci_data::load_bundled().expect("bundled data loads");
    let v = &data.vocabulary;
    let mut cvs = CvCatalog::new();
    for cv in &data.controlled {
        cvs.add(cv.clone()).expect("distinct controlled vocabularies");
    }
    let by_id = |id: &str| -> &Template {
        data.templates.iter().find(|t| t.template_id == id).expect("bundled template")
    };
    let essentials = by_id("essentials");
    let intangible = by_id("intangible-heritage");
    let practical = by_id("practical-knowledge");
    let cultural = by_id("cultural-identity");

    let mut store = AnnotationStore::new();
    let mut asset = |id: &str, duration_ms: u64, langs: &[&str]| {
        let mut a = MediaAsset::new(id, &format!("media/{id}.mkv"), duration_ms);
        a.languages = langs.iter().map(|c| lang(c)).collect();
        store.add_asset(a).expect("fresh asset");
    };
    asset("huarpe-interviews", 3_600_000, &["spa", "eng"]);
    asset("walachians-fieldwork", 5_400_000, &["ron"]);
    asset("sami-crafts", 2_400_000, &["sme"]);

    // Per-asset segment grids; every annotation gets its own window.
    let segment = |asset_id: &str, k: u64| -> Segment {
        let (stride, len) = match asset_id {
            "huarpe-interviews" => (400_000, 300_000),
            "walachians-fieldwork" => (600_000, 450_000),
            _ => (300_000, 240_000),
        };
        Segment::new(asset_id, k * stride, k * stride + len)
    };

    // Hand-built graphs for the segments that fit no template.
    let topic_only =
        |outer: &str, topics: &[(&str, Referent)], edge: Option<(&str, usize, usize)>| {
            let mut g = ConceptualGraph::new(GraphKind::Narrative);
            let host = g.add_concept(tid(v, outer), Referent::Generic);
            let mut inner = ConceptualGraph::new(GraphKind::Topical);
            let mut ids = Vec::new();
            for (label, referent) in topics {
                ids.push(inner.add_concept(tid(v, label), referent.clone()));
            }
            if let Some((relation, a, b)) = edge {
                inner
                    .add_relation_checked(v, rid(v, relation), vec![ids[a], ids[b]])
                    .expect("valid edge");
            }
            let topic = v.nesting_by_label("Discourse Topic").expect("bundled nesting").id;
            g.attach_nesting(host, topic, inner).expect("fresh nesting");
            g
        };

    struct Entry<'a> {
        id: &'a str,
        asset: &'a str,
        slot: u64,
        graph: ConceptualGraph,
        title: &'a str,
        keywords: Vec<Keyword>,
        marks: Vec<&'a str>,
    }
    let entry = |id, asset, slot, graph, title| Entry {
        id,
        asset,
        slot,
        graph,
        title,
        keywords: Vec::new(),
        marks: Vec::new(),
    };

    let mut entries = vec![
        // huarpe-interviews: Andean material.
        entry(
            "a01",
            "huarpe-interviews",
            0,
            instance(
                essentials,
                &cvs,
                &[("group", people("huarpes")), ("environment", free("Cuyo"))],
            ),
            "Huarpe lifeways",
        ),
        entry(
            "a02",
            "huarpe-interviews",
            1,
            instance(
                practical,
                &cvs,
                &[
                    ("group", people("huarpes")),
                    ("activity", free("canal irrigation")),
                    ("product", free("acequia")),
                ],
            ),
            "Keeping the acequias alive",
        ),
        entry(
            "a03",
            "huarpe-interviews",
            2,
            instance(
                intangible,
                &cvs,
                &[
                    ("group", people("huarpes")),
                    ("work", free("folk song")),
                    ("language", language("Spanish")),
                ],
            ),
            "Songs of the dry lands",
        ),
        entry(
            "a04",
            "huarpe-interviews",
            3,
            instance(
                cultural,
                &cvs,
                &[
                    ("group", people("huarpes")),
                    ("other", people("quechua")),
                    ("territory", free("Cuyo")),
                ],
            ),
            "Neighbours across the puna",
        ),
        entry(
            "a05",
            "huarpe-interviews",
            4,
            instance(
                essentials,
                &cvs,
                &[("group", people("quechua")), ("environment", free("altiplano"))],
            ),
            "Quechua highland life",
        ),
        entry(
            "a06",
            "huarpe-interviews",
            5,
            instance(
                practical,
                &cvs,
                &[
                    ("group", people("quechua")),
                    ("activity", free("weaving")),
                    ("product", free("poncho")),
                ],
            ),
            "A poncho takes shape",
        ),
        entry(
            "a07",
            "huarpe-interviews",
            6,
            instance(
                intangible,
                &cvs,
                &[
                    ("group", people("quechua")),
                    ("work", free("textile pattern")),
                    ("language", language("Quechua")),
                ],
            ),
            "Patterns that speak",
        ),
        entry(
            "a08",
            "huarpe-interviews",
            7,
            topic_only(
                "Narration",
                &[
                    ("Fauna", Referent::individual("guanaco")),
                    ("Natural Environment", Referent::individual("puna")),
                ],
                Some(("Spatial Relation", 0, 1)),
            ),
            "Guanacos on the puna",
        ),
        // walachians-fieldwork: Balkan material.
        entry(
            "a09",
            "walachians-fieldwork",
            0,
            instance(
                essentials,
                &cvs,
                &[("group", people("walachians")), ("environment", free("Carpathians"))],
            ),
            "Walachian shepherd villages",
        ),
        entry(
            "a10",
            "walachians-fieldwork",
            1,
            instance(
                essentials,
                &cvs,
                &[("group", people("walachians")), ("environment", free("Pindus"))],
            ),
            "Southern Walachian settlements",
        ),
        entry(
            "a11",
            "walachians-fieldwork",
            2,
            instance(
                practical,
                &cvs,
                &[
                    ("group", people("romani")),
                    ("activity", free("coppersmithing")),
                    ("product", free("copper kettle")),
                ],
            ),
            "The coppersmith's yard",
        ),
        entry(
            "a12",
            "walachians-fieldwork",
            3,
            instance(
                intangible,
                &cvs,
                &[
                    ("group", people("romani")),
                    ("work", free("fiddle tune")),
                    ("language", language("Romani")),
                ],
            ),
            "Fiddle tunes at dusk",
        ),
        entry(
            "a13",
            "walachians-fieldwork",
            4,
            instance(
                cultural,
                &cvs,
                &[
                    ("group", people("romani")),
                    ("other", people("sorbs")),
                    ("territory", free("Banat")),
                ],
            ),
            "Two communities, one plain",
        ),
        entry(
            "a14",
            "walachians-fieldwork",
            5,
            instance(
                practical,
                &cvs,
                &[
                    ("group", people("sorbs")),
                    ("activity", free("easter egg decorating")),
                    ("product", free("painted egg")),
                ],
            ),
            "Wax and dye",
        ),
        entry(
            "a15",
            "walachians-fieldwork",
            6,
            topic_only("Summary", &[("Minority", Referent::individual("walachians"))], None),
            "Field notes in brief",
        ),
        entry(
            "a16",
            "walachians-fieldwork",
            7,
            topic_only(
                "Chronology",
                &[("Period", Referent::individual("iron age")), ("Evolution", Referent::Generic)],
                Some(("Temporal Relation", 0, 1)),
            ),
            "Layers under the pasture",
        ),
        // sami-crafts: Arctic material.
        entry(
            "a17",
            "sami-crafts",
            0,
            instance(
                essentials,
                &cvs,
                &[
                    ("group", people("sami")),
                    ("organisation", free("siida")),
                    ("environment", free("tundra")),
                ],
            ),
            "The siida and its lands",
        ),
        entry(
            "a18",
            "sami-crafts",
            1,
            instance(
                essentials,
                &cvs,
                &[("group", people("inuit")), ("environment", free("arctic coast"))],
            ),
            "Life along the floe edge",
        ),
        entry(
            "a19",
            "sami-crafts",
            2,
            instance(
                intangible,
                &cvs,
                &[
                    ("group", people("sami")),
                    ("work", free("joik")),
                    ("language", language("Northern Sami")),
                ],
            ),
            "A joik for the herd",
        ),
        entry(
            "a20",
            "sami-crafts",
            3,
            instance(
                intangible,
                &cvs,
                &[
                    ("group", people("ainu")),
                    ("work", free("yukar")),
                    ("language", language("Ainu")),
                ],
            ),
            "Reciting the yukar",
        ),
        entry(
            "a21",
            "sami-crafts",
            4,
            instance(
                practical,
                &cvs,
                &[
                    ("group", people("sami")),
                    ("activity", free("antler carving")),
                    ("product", free("knife handle")),
                ],
            ),
            "Carving the antler",
        ),
        entry(
            "a22",
            "sami-crafts",
            5,
            instance(
                cultural,
                &cvs,
                &[
                    ("group", people("inuit")),
                    ("other", people("ainu")),
                    ("territory", free("north pacific rim")),
                ],
            ),
            "Coastal crossings",
        ),
        entry(
            "a23",
            "sami-crafts",
            6,
            instance(
                cultural,
                &cvs,
                &[
                    ("group", people("sami")),
                    ("other", people("inuit")),
                    ("territory", free("Sapmi")),
                ],
            ),
            "North of the treeline",
        ),
        entry(
            "a24",
            "sami-crafts",
            7,
            topic_only(
                "Appreciation",
                &[
                    ("Arts Work", Referent::individual("rock carving")),
                    ("Inanimate Matter", Referent::individual("slate")),
                ],
                Some(("Partonymic Relation", 0, 1)),
            ),
            "Figures in the slate",
        ),
    ];

    // Texture: a few keywords and pragmatic marks.
    let extracted = |e: &mut Entry, text: &str, code: &str| {
        e.keywords.push(Keyword::free(text, lang(code), KeywordKind::ExtractedTerm));
    };
    let controlled = |e: &mut Entry, text: &str| {
        e.keywords.push(Keyword::controlled(text, lang("eng"), KeywordKind::Paraphrase, "peoples"));
    };
    extracted(&mut entries[0], "irrigation", "eng");
    controlled(&mut entries[2], "huarpes");
    controlled(&mut entries[8], "walachians");
    extracted(&mut entries[18], "joik", "sme");
    extracted(&mut entries[15], "stratigraphy", "eng");
    entries[0].marks = vec!["Research"];
    entries[1].marks = vec!["Pedagogical Folder"];
    entries[2].marks = vec!["Education"];
    entries[8].marks = vec!["Research", "Education"];
    entries[14].marks = vec!["Thematic Folder"];
    entries[18].marks = vec!["Cultural Policy Making"];
    entries[23].marks = vec!["Video Lexicon"];

    for e in entries {
        let mut a = SegmentAnnotation::new(e.id, segment(e.asset, e.slot), e.graph);
        a.set_field(lang("eng"), Some(e.title), None);
        a.keywords = e.keywords;
        a.pragmatic_marks = e.marks.iter().map(|label| tid(v, label)).collect();
        store.add_annotation(a, v, &cvs).expect("corpus annotation validates");
    }

    let report = store.validate(v, &cvs);
    assert!(!report.has_errors(), "corpus must validate:\n{report}");

    let out = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample/corpus.pci");
    fs::create_dir_all(out.parent().unwrap()).expect("sample directory");
    fs::write(&out, store.serialize()).expect("corpus written");
    println!(
        "wrote {} ({} assets, {} annotations)",
        out.display(),
        store.asset_count(),
        store.annotation_count()
    );

    // Cross-checks, printed so drifts are easy to spot by rerunning.
    let mut social_group = ConceptualGraph::new(GraphKind::Topical);
    social_group.add_concept(tid(v, "Social Group"), Referent::Generic);
    let hits = answer_query(&social_group, &store, v).expect("query runs");
    let ids: Vec<&str> = hits.iter().map(|r| r.annotation_id.as_str()).collect();
    println!("[Social Group: *] matches {} annotations: {}", ids.len(), ids.join(" "));

    let mut walachians = ConceptualGraph::new(GraphKind::Topical);
    walachians.add_concept(tid(v, "Minority"), Referent::individual("walachians"));
    let hits = answer_query(&walachians, &store, v).expect("query runs");
    let ids: Vec<&str> = hits.iter().map(|r| r.annotation_id.as_str()).collect();
    println!("[Minority: walachians] matches: {}", ids.join(" "));

    let summary = catalog(&store, v, &data.templates);
    println!("total {}", summary.total);
    for (group, count) in &summary.groups {
        println!("group {} {count}", group.keyword());
    }
    for (id, label, count) in &summary.themes {
        println!("theme {id} {label}: {count}");
    }
}
