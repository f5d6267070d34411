//! Time-coded annotation of audiovisual material: media assets, segments,
//! segment annotations carrying narrative conceptual graphs, controlled
//! vocabularies, indexing templates, and the annotation store with its
//! canonical text format.
//!
//! Concurrency model: a loaded store is an immutable snapshot; mutation
//! needs `&mut`, so the borrow rules enforce one writer or many readers.
//! Saving rewrites the whole file in canonical form.

mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{
    ConceptNode, ConceptualGraph, CvLookup, GraphError, GraphKind, KeywordSource, Lang, NodeId,
    Referent,
};
use crate::report::{Finding, ValidationReport};
use crate::vocabulary::{nfc, TypeIdentifier, TypeKind, Vocabulary};

/// Theme label that scopes pragmatic marks.
pub(crate) const PRAGMATIC_LABEL: &str = "Pragmatic Description";
/// Theme label whose children partition the catalog's theme counts.
pub(crate) const WORLD_LABEL: &str = "World_PCI";

/// Identifier syntax shared by assets, annotations, templates, slots, and
/// controlled-vocabulary names: ASCII letters, digits, `-`, `_`, `.`.
pub(crate) fn valid_id(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

/// One audiovisual asset under annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MediaAsset {
    pub asset_id: String,
    pub uri: String,
    /// Total duration, in milliseconds; always positive.
    pub duration_ms: u64,
    /// Languages spoken in the material, as ISO 639-2 codes.
    pub languages: Vec<Lang>,
}

impl MediaAsset {
    pub fn new(asset_id: &str, uri: &str, duration_ms: u64) -> MediaAsset {
        MediaAsset {
            asset_id: asset_id.to_string(),
            uri: uri.to_string(),
            duration_ms,
            languages: Vec::new(),
        }
    }
}

/// A time range inside one asset; bounds are `0 <= start < end <= duration`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub asset_id: String,
    pub start_ms: u64,
    pub end_ms: u64,
}

impl Segment {
    pub fn new(asset_id: &str, start_ms: u64, end_ms: u64) -> Segment {
        Segment { asset_id: asset_id.to_string(), start_ms, end_ms }
    }
}

/// How an indexing keyword was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeywordKind {
    /// Term extracted from the segment's speech or text.
    ExtractedTerm,
    /// Free paraphrase of the segment's content.
    Paraphrase,
}

impl KeywordKind {
    pub fn keyword(self) -> &'static str {
        match self {
            KeywordKind::ExtractedTerm => "extracted",
            KeywordKind::Paraphrase => "paraphrase",
        }
    }
}

impl fmt::Display for KeywordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for KeywordKind {
    type Err = String;

    fn from_str(s: &str) -> Result<KeywordKind, String> {
        match s {
            "extracted" => Ok(KeywordKind::ExtractedTerm),
            "paraphrase" => Ok(KeywordKind::Paraphrase),
            other => Err(format!("unknown keyword kind {other:?} (extracted or paraphrase)")),
        }
    }
}

/// One indexing keyword attached to a segment annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Keyword {
    pub text: String,
    pub language: Lang,
    pub kind: KeywordKind,
    pub source: KeywordSource,
}

impl Keyword {
    pub fn free(text: &str, language: Lang, kind: KeywordKind) -> Keyword {
        Keyword { text: nfc(text), language, kind, source: KeywordSource::Free }
    }

    pub fn controlled(text: &str, language: Lang, kind: KeywordKind, vocabulary: &str) -> Keyword {
        Keyword {
            text: nfc(text),
            language,
            kind,
            source: KeywordSource::Controlled(vocabulary.to_string()),
        }
    }
}

/// Per-language descriptive text of a segment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FieldText {
    pub title: Option<String>,
    pub summary: Option<String>,
}

/// One indexed segment: descriptive fields, keywords, the narrative
/// conceptual graph, and flat pragmatic marks.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentAnnotation {
    pub annotation_id: String,
    pub segment: Segment,
    pub fields: BTreeMap<Lang, FieldText>,
    pub keywords: Vec<Keyword>,
    pub graph: ConceptualGraph,
    /// Provisional usage marks: themes under Pragmatic Description.
    pub pragmatic_marks: Vec<TypeIdentifier>,
}

impl SegmentAnnotation {
    pub fn new(annotation_id: &str, segment: Segment, graph: ConceptualGraph) -> SegmentAnnotation {
        SegmentAnnotation {
            annotation_id: annotation_id.to_string(),
            segment,
            fields: BTreeMap::new(),
            keywords: Vec::new(),
            graph,
            pragmatic_marks: Vec::new(),
        }
    }

    pub fn set_field(&mut self, language: Lang, title: Option<&str>, summary: Option<&str>) {
        let entry = self.fields.entry(language).or_default();
        if let Some(t) = title {
            entry.title = Some(t.to_string());
        }
        if let Some(s) = summary {
            entry.summary = Some(s.to_string());
        }
    }
}

/// Errors from controlled-vocabulary construction and parsing.
#[derive(Debug, Error)]
pub enum CvError {
    #[error("controlled-vocabulary name {0:?} is not a valid identifier")]
    BadName(String),
    #[error("controlled vocabulary {0:?} is already in the catalog")]
    Duplicate(String),
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// A named list of admissible terms; entries are (term, language) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlledVocabulary {
    name: String,
    source_note: String,
    entries: BTreeSet<(String, Lang)>,
}

impl ControlledVocabulary {
    pub fn new(name: &str, source_note: &str) -> Result<ControlledVocabulary, CvError> {
        if !valid_id(name) {
            return Err(CvError::BadName(name.to_string()));
        }
        Ok(ControlledVocabulary {
            name: name.to_string(),
            source_note: source_note.to_string(),
            entries: BTreeSet::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source_note(&self) -> &str {
        &self.source_note
    }

    /// Insert a term; it is NFC-normalized first. Empty terms are never
    /// stored. Returns whether the entry is new.
    pub fn insert(&mut self, term: &str, language: Lang) -> bool {
        let term = nfc(term);
        if term.is_empty() {
            return false;
        }
        self.entries.insert((term, language))
    }

    /// Found iff the NFC-normalized term is stored under this language.
    pub fn contains(&self, term: &str, language: Lang) -> bool {
        self.entries.contains(&(nfc(term), language))
    }

    /// Found iff the NFC-normalized term is stored under any language;
    /// used to resolve keywords that carry no language tag.
    pub fn contains_any_language(&self, term: &str) -> bool {
        let term = nfc(term);
        self.entries.iter().any(|(t, _)| *t == term)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in canonical order (term, then language).
    pub fn entries(&self) -> impl Iterator<Item = (&str, Lang)> {
        self.entries.iter().map(|(t, l)| (t.as_str(), *l))
    }

    pub fn parse(input: &str) -> Result<ControlledVocabulary, CvError> {
        text::parse_cv(input)
    }

    pub fn serialize(&self) -> String {
        text::serialize_cv(self)
    }
}

/// Found iff the (NFC term, language) pair is an entry of the vocabulary.
pub fn lookup_keyword(cv: &ControlledVocabulary, term: &str, language: Lang) -> bool {
    cv.contains(term, language)
}

/// The controlled vocabularies available to validation and instantiation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CvCatalog {
    vocabularies: BTreeMap<String, ControlledVocabulary>,
}

impl CvCatalog {
    pub fn new() -> CvCatalog {
        CvCatalog::default()
    }

    pub fn add(&mut self, cv: ControlledVocabulary) -> Result<(), CvError> {
        if self.vocabularies.contains_key(cv.name()) {
            return Err(CvError::Duplicate(cv.name().to_string()));
        }
        self.vocabularies.insert(cv.name().to_string(), cv);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ControlledVocabulary> {
        self.vocabularies.get(name)
    }

    /// Vocabularies in name order.
    pub fn iter(&self) -> impl Iterator<Item = &ControlledVocabulary> {
        self.vocabularies.values()
    }

    pub fn len(&self) -> usize {
        self.vocabularies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocabularies.is_empty()
    }

    /// Resolve a controlled keyword. An untagged keyword is present when
    /// its term appears under any language of the named vocabulary.
    pub fn lookup(&self, vocabulary: &str, term: &str, language: Option<Lang>) -> CvLookup {
        let Some(cv) = self.vocabularies.get(vocabulary) else {
            return CvLookup::UnknownVocabulary;
        };
        let hit = match language {
            Some(lang) => cv.contains(term, lang),
            None => cv.contains_any_language(term),
        };
        if hit {
            CvLookup::Present
        } else {
            CvLookup::Missing
        }
    }
}

/// The four discourse-topic groups the template catalogue covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemplateGroup {
    Essentials,
    IntangibleHeritage,
    PracticalKnowledge,
    CulturalIdentity,
}

impl TemplateGroup {
    pub const ALL: [TemplateGroup; 4] = [
        TemplateGroup::Essentials,
        TemplateGroup::IntangibleHeritage,
        TemplateGroup::PracticalKnowledge,
        TemplateGroup::CulturalIdentity,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            TemplateGroup::Essentials => "essentials",
            TemplateGroup::IntangibleHeritage => "intangible-heritage",
            TemplateGroup::PracticalKnowledge => "practical-knowledge",
            TemplateGroup::CulturalIdentity => "cultural-identity",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            TemplateGroup::Essentials => {
                "Essentials of the culture and life world of a social group"
            }
            TemplateGroup::IntangibleHeritage => "The intangible heritage of a social group",
            TemplateGroup::PracticalKnowledge => {
                "The practical knowledge and traditional know how of a social group"
            }
            TemplateGroup::CulturalIdentity => {
                "Investigations in the cultural identity of a social group"
            }
        }
    }
}

impl fmt::Display for TemplateGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for TemplateGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<TemplateGroup, String> {
        TemplateGroup::ALL
            .into_iter()
            .find(|g| g.keyword() == s)
            .ok_or_else(|| format!("unknown template group {s:?}"))
    }
}

/// Errors from template operations and parsing.
#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("template has no slot named {0:?}")]
    UnknownSlot(String),
    #[error("slot {slot:?} is invalid: {reason}")]
    BadSlot { slot: String, reason: String },
    #[error("slot path {0:?} is malformed (expected n<k> or n<k>/C-<m>/n<k>/...)")]
    BadSlotPath(String),
    #[error("no controlled vocabulary named {0:?} is available")]
    UnknownVocabulary(String),
    #[error("term {term:?} is not in controlled vocabulary {vocabulary:?}")]
    TermMiss { vocabulary: String, term: String },
    #[error("filler keyword is empty")]
    EmptyKeyword,
    #[error("identifier {0:?} is not valid (letters, digits, '-', '_', '.')")]
    BadId(String),
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Path from a graph's outer level to one node, descending through
/// nestings: `n1` or `n1/C-1/n2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SlotPath {
    /// (host node, nesting type) hops, outermost first.
    pub hops: Vec<(NodeId, TypeIdentifier)>,
    /// The node reached at the final level.
    pub node: NodeId,
}

impl SlotPath {
    pub fn outer(node: NodeId) -> SlotPath {
        SlotPath { hops: Vec::new(), node }
    }

    pub fn nested(hops: Vec<(NodeId, TypeIdentifier)>, node: NodeId) -> SlotPath {
        SlotPath { hops, node }
    }

    pub fn resolve<'g>(&self, graph: &'g ConceptualGraph) -> Option<&'g ConceptNode> {
        let mut level = graph;
        for (host, nesting_type) in &self.hops {
            level = level.node(*host)?.nesting(*nesting_type)?;
        }
        level.node(self.node)
    }

    fn resolve_mut<'g>(&self, graph: &'g mut ConceptualGraph) -> Option<&'g mut ConceptNode> {
        let mut level = graph;
        for (host, nesting_type) in &self.hops {
            level = level.node_mut(*host)?.nesting_mut(*nesting_type)?;
        }
        level.node_mut(self.node)
    }
}

impl fmt::Display for SlotPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (host, nesting_type) in &self.hops {
            write!(f, "{host}/{nesting_type}/")?;
        }
        write!(f, "{}", self.node)
    }
}

impl FromStr for SlotPath {
    type Err = TemplateError;

    fn from_str(s: &str) -> Result<SlotPath, TemplateError> {
        let bad = || TemplateError::BadSlotPath(s.to_string());
        let parts: Vec<&str> = s.split('/').collect();
        if parts.len().is_multiple_of(2) {
            return Err(bad());
        }
        let node = NodeId::from_str(parts[parts.len() - 1]).map_err(|_| bad())?;
        let mut hops = Vec::new();
        for pair in parts[..parts.len() - 1].chunks(2) {
            let host = NodeId::from_str(pair[0]).map_err(|_| bad())?;
            let nesting_type = TypeIdentifier::from_str(pair[1]).map_err(|_| bad())?;
            if nesting_type.kind() != TypeKind::Nesting {
                return Err(bad());
            }
            hops.push((host, nesting_type));
        }
        Ok(SlotPath { hops, node })
    }
}

/// A reusable indexing pattern: a graph with generic slots that fillers
/// specialize into individuals.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub template_id: String,
    pub name: String,
    pub group: TemplateGroup,
    pub graph: ConceptualGraph,
    /// Fillable nodes by slot name; each path must reach a generic node.
    pub slots: BTreeMap<String, SlotPath>,
}

impl Template {
    /// Structural invariants: valid identifiers and every slot path
    /// reaching a generic node of the template graph.
    pub fn validate(&self) -> Result<(), TemplateError> {
        if !valid_id(&self.template_id) {
            return Err(TemplateError::BadId(self.template_id.clone()));
        }
        for (name, path) in &self.slots {
            if !valid_id(name) {
                return Err(TemplateError::BadId(name.clone()));
            }
            let Some(node) = path.resolve(&self.graph) else {
                return Err(TemplateError::BadSlot {
                    slot: name.clone(),
                    reason: format!("path {path} does not reach a node"),
                });
            };
            if !node.referent.is_generic() {
                return Err(TemplateError::BadSlot {
                    slot: name.clone(),
                    reason: format!("node at {path} is not generic"),
                });
            }
        }
        Ok(())
    }

    pub fn parse(input: &str) -> Result<Template, TemplateError> {
        let template = text::parse_template(input)?;
        template.validate()?;
        Ok(template)
    }

    pub fn serialize(&self) -> String {
        text::serialize_template(self)
    }
}

/// A value for one template slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filler {
    pub keyword: String,
    pub language: Option<Lang>,
    pub source: KeywordSource,
}

impl Filler {
    pub fn free(keyword: &str) -> Filler {
        Filler { keyword: keyword.to_string(), language: None, source: KeywordSource::Free }
    }

    pub fn tagged(keyword: &str, language: Lang) -> Filler {
        Filler {
            keyword: keyword.to_string(),
            language: Some(language),
            source: KeywordSource::Free,
        }
    }

    pub fn controlled(keyword: &str, language: Option<Lang>, vocabulary: &str) -> Filler {
        Filler {
            keyword: keyword.to_string(),
            language,
            source: KeywordSource::Controlled(vocabulary.to_string()),
        }
    }
}

/// Copy the template graph, specializing each filled slot from generic to
/// the given individual. Unfilled slots stay generic. Controlled fillers
/// must resolve in their vocabulary.
pub fn instantiate_template(
    template: &Template,
    fillers: &BTreeMap<String, Filler>,
    catalog: &CvCatalog,
) -> Result<ConceptualGraph, TemplateError> {
    template.validate()?;
    let mut graph = template.graph.clone();
    for (name, filler) in fillers {
        let Some(path) = template.slots.get(name) else {
            return Err(TemplateError::UnknownSlot(name.clone()));
        };
        let keyword = nfc(&filler.keyword);
        if keyword.is_empty() {
            return Err(TemplateError::EmptyKeyword);
        }
        if let KeywordSource::Controlled(cv_name) = &filler.source {
            match catalog.lookup(cv_name, &keyword, filler.language) {
                CvLookup::Present | CvLookup::Unchecked => {}
                CvLookup::UnknownVocabulary => {
                    return Err(TemplateError::UnknownVocabulary(cv_name.clone()));
                }
                CvLookup::Missing => {
                    return Err(TemplateError::TermMiss {
                        vocabulary: cv_name.clone(),
                        term: keyword,
                    });
                }
            }
        }
        let node =
            path.resolve_mut(&mut graph).expect("slot paths were validated against this graph");
        node.referent = Referent::individual_full(&keyword, filler.language, filler.source.clone());
    }
    Ok(graph)
}

/// Errors from store operations and the store file format.
#[derive(Debug, Error)]
pub enum StoreError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("identifier {0:?} is not valid (letters, digits, '-', '_', '.')")]
    BadId(String),
    #[error("asset {0:?} is already registered")]
    DuplicateAsset(String),
    #[error("asset duration must be positive")]
    BadDuration,
    #[error("annotation {0:?} already exists")]
    DuplicateAnnotation(String),
    #[error("annotation references unknown asset {0:?}")]
    UnknownAsset(String),
    #[error("segment {start_ms}..{end_ms} is outside the asset's 0..{duration_ms}")]
    SegmentBounds { start_ms: u64, end_ms: u64, duration_ms: u64 },
    #[error("annotation {id} failed validation:\n{report}")]
    Invalid { id: String, report: ValidationReport },
}

/// The set of assets and segment annotations of one archive.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationStore {
    assets: BTreeMap<String, MediaAsset>,
    annotations: BTreeMap<String, SegmentAnnotation>,
}

impl AnnotationStore {
    pub fn new() -> AnnotationStore {
        AnnotationStore::default()
    }

    pub fn add_asset(&mut self, asset: MediaAsset) -> Result<(), StoreError> {
        if !valid_id(&asset.asset_id) {
            return Err(StoreError::BadId(asset.asset_id));
        }
        if asset.duration_ms == 0 {
            return Err(StoreError::BadDuration);
        }
        if self.assets.contains_key(&asset.asset_id) {
            return Err(StoreError::DuplicateAsset(asset.asset_id));
        }
        self.assets.insert(asset.asset_id.clone(), asset);
        Ok(())
    }

    pub fn asset(&self, asset_id: &str) -> Option<&MediaAsset> {
        self.assets.get(asset_id)
    }

    /// Assets in id order.
    pub fn assets(&self) -> impl Iterator<Item = &MediaAsset> {
        self.assets.values()
    }

    pub fn asset_count(&self) -> usize {
        self.assets.len()
    }

    /// Validate and persist an annotation; returns its id. The annotation's
    /// graph must be a narrative configuration that re-validates with zero
    /// errors, pragmatic marks must sit under Pragmatic Description, and
    /// controlled keywords must resolve in the catalog.
    pub fn add_annotation(
        &mut self,
        annotation: SegmentAnnotation,
        vocabulary: &Vocabulary,
        catalog: &CvCatalog,
    ) -> Result<String, StoreError> {
        if !valid_id(&annotation.annotation_id) {
            return Err(StoreError::BadId(annotation.annotation_id));
        }
        if self.annotations.contains_key(&annotation.annotation_id) {
            return Err(StoreError::DuplicateAnnotation(annotation.annotation_id));
        }
        let Some(asset) = self.assets.get(&annotation.segment.asset_id) else {
            return Err(StoreError::UnknownAsset(annotation.segment.asset_id.clone()));
        };
        check_segment(&annotation.segment, asset)?;

        let mut annotation = annotation;
        annotation.pragmatic_marks.sort();
        annotation.pragmatic_marks.dedup();

        let report = annotation_findings(&annotation, vocabulary, catalog);
        if report.has_errors() {
            return Err(StoreError::Invalid { id: annotation.annotation_id, report });
        }
        let id = annotation.annotation_id.clone();
        self.annotations.insert(id.clone(), annotation);
        Ok(id)
    }

    pub fn annotation(&self, annotation_id: &str) -> Option<&SegmentAnnotation> {
        self.annotations.get(annotation_id)
    }

    /// Annotations in id order.
    pub fn annotations(&self) -> impl Iterator<Item = &SegmentAnnotation> {
        self.annotations.values()
    }

    pub fn annotation_count(&self) -> usize {
        self.annotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assets.is_empty() && self.annotations.is_empty()
    }

    /// Re-validate every annotation, prefixing finding subjects with the
    /// annotation id. Loading checks only structure, so content checks on
    /// a loaded store happen here.
    pub fn validate(&self, vocabulary: &Vocabulary, catalog: &CvCatalog) -> ValidationReport {
        let mut report = ValidationReport::new();
        for annotation in self.annotations.values() {
            match self.assets.get(&annotation.segment.asset_id) {
                None => report.error(
                    annotation.annotation_id.clone(),
                    format!("references unknown asset {:?}", annotation.segment.asset_id),
                ),
                Some(asset) => {
                    if let Err(e) = check_segment(&annotation.segment, asset) {
                        report.error(annotation.annotation_id.clone(), e.to_string());
                    }
                }
            }
            report.extend(annotation_findings(annotation, vocabulary, catalog));
        }
        report.finish()
    }

    /// Parse the canonical store format; structural checks only (syntax,
    /// identifier rules, duplicate ids, asset references, segment bounds).
    pub fn parse(input: &str) -> Result<AnnotationStore, StoreError> {
        text::parse_store(input)
    }

    pub fn serialize(&self) -> String {
        text::serialize_store(self)
    }
}

fn check_segment(segment: &Segment, asset: &MediaAsset) -> Result<(), StoreError> {
    if segment.start_ms < segment.end_ms && segment.end_ms <= asset.duration_ms {
        Ok(())
    } else {
        Err(StoreError::SegmentBounds {
            start_ms: segment.start_ms,
            end_ms: segment.end_ms,
            duration_ms: asset.duration_ms,
        })
    }
}

/// Content findings of one annotation: graph well-formedness under the
/// vocabulary and catalog, pragmatic-mark scoping, and keyword checks.
fn annotation_findings(
    annotation: &SegmentAnnotation,
    vocabulary: &Vocabulary,
    catalog: &CvCatalog,
) -> ValidationReport {
    let id = &annotation.annotation_id;
    let mut report = ValidationReport::new();

    if annotation.graph.kind != GraphKind::Narrative {
        report.error(
            id.clone(),
            format!("annotation graph must be narrative, found {}", annotation.graph.kind),
        );
    }
    let graph_report = annotation
        .graph
        .check_well_formed_with(vocabulary, &|cv, term, lang| catalog.lookup(cv, term, lang));
    for finding in graph_report.findings() {
        let subject = if finding.subject.is_empty() {
            id.clone()
        } else {
            format!("{id}/{}", finding.subject)
        };
        report.push(Finding {
            severity: finding.severity,
            subject,
            message: finding.message.clone(),
        });
    }

    if !annotation.pragmatic_marks.is_empty() {
        let pragmatic = vocabulary.concept_by_label(PRAGMATIC_LABEL);
        if pragmatic.is_none() {
            report.error(
                id.clone(),
                format!("vocabulary has no {PRAGMATIC_LABEL} taxeme to scope pragmatic marks"),
            );
        }
        for mark in &annotation.pragmatic_marks {
            if mark.kind() != TypeKind::Theme || !vocabulary.contains(*mark) {
                report.error(id.clone(), format!("pragmatic mark {mark} is not a known theme"));
                continue;
            }
            if let Some(pragmatic) = pragmatic {
                if !vocabulary.subsumes(pragmatic.id, *mark).unwrap_or(false) {
                    report.error(
                        id.clone(),
                        format!("pragmatic mark {mark} is not subsumed by {PRAGMATIC_LABEL}"),
                    );
                }
            }
        }
    }

    for keyword in &annotation.keywords {
        if keyword.text.is_empty() {
            report.error(id.clone(), "keyword term is empty".to_string());
            continue;
        }
        if let KeywordSource::Controlled(cv_name) = &keyword.source {
            match catalog.lookup(cv_name, &keyword.text, Some(keyword.language)) {
                CvLookup::Present | CvLookup::Unchecked => {}
                CvLookup::UnknownVocabulary => report.error(
                    id.clone(),
                    format!(
                        "keyword {:?} names unknown controlled vocabulary {cv_name:?}",
                        keyword.text
                    ),
                ),
                CvLookup::Missing => report.error(
                    id.clone(),
                    format!(
                        "keyword {:?}@{} is not in controlled vocabulary {cv_name:?}",
                        keyword.text, keyword.language
                    ),
                ),
            }
        }
    }
    report.finish()
}

/// Read a store file.
pub fn load_store(path: impl AsRef<Path>) -> Result<AnnotationStore, StoreError> {
    let text = std::fs::read_to_string(path)?;
    AnnotationStore::parse(&text)
}

/// Write the store in canonical form.
pub fn save_store(store: &AnnotationStore, path: impl AsRef<Path>) -> Result<(), StoreError> {
    std::fs::write(path, store.serialize())?;
    Ok(())
}

/// Corpus summary: template-group coverage and topical theme spread.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogSummary {
    pub total: u64,
    /// Annotation count per discourse-topic group, in group order. An
    /// annotation counts toward the first group whose template projects
    /// into its graph, so the group counts sum to at most `total`.
    pub groups: Vec<(TemplateGroup, u64)>,
    /// For each top-level World_PCI theme (id order): annotations whose
    /// topic graphs contain a node of a subsumed type.
    pub themes: Vec<(TypeIdentifier, String, u64)>,
}

/// Summarize a store against the template catalogue. Annotations whose
/// graphs reference unknown types match no group and no theme.
pub fn catalog(
    store: &AnnotationStore,
    vocabulary: &Vocabulary,
    templates: &[Template],
) -> CatalogSummary {
    let mut groups: Vec<(TemplateGroup, u64)> =
        TemplateGroup::ALL.iter().map(|g| (*g, 0)).collect();
    for annotation in store.annotations() {
        let matched = TemplateGroup::ALL.iter().position(|group| {
            templates.iter().any(|t| {
                t.group == *group
                    && crate::projection::project(&t.graph, &annotation.graph, vocabulary)
                        .map(|m| !m.is_empty())
                        .unwrap_or(false)
            })
        });
        if let Some(index) = matched {
            groups[index].1 += 1;
        }
    }

    let mut themes = Vec::new();
    if let Some(world) = vocabulary.concept_by_label(WORLD_LABEL) {
        if let Ok(children) = vocabulary.children(world.id) {
            for child in children {
                let label = vocabulary.concept(child).map(|c| c.label.clone()).unwrap_or_default();
                let count = store
                    .annotations()
                    .filter(|a| {
                        let mut types = Vec::new();
                        collect_topic_types(&a.graph, &mut types);
                        types.iter().any(|t| vocabulary.subsumes(child, *t).unwrap_or(false))
                    })
                    .count() as u64;
                themes.push((child, label, count));
            }
        }
    }

    CatalogSummary { total: store.annotation_count() as u64, groups, themes }
}

/// Concept types inside nestings (at any depth), not the outer level.
fn collect_topic_types(level: &ConceptualGraph, out: &mut Vec<TypeIdentifier>) {
    for node in level.nodes() {
        for (_, inner) in &node.nestings {
            collect_types(inner, out);
        }
    }
}

fn collect_types(level: &ConceptualGraph, out: &mut Vec<TypeIdentifier>) {
    for node in level.nodes() {
        out.push(node.concept_type);
        for (_, inner) in &node.nestings {
            collect_types(inner, out);
        }
    }
}
