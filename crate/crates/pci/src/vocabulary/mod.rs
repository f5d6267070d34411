//! Type hierarchies: themes (concept types), relations, and nesting contexts.
//!
//! A [`Vocabulary`] holds three rooted DAGs, one per [`TypeKind`]. Multiple
//! inheritance is permitted; validation enforces acyclicity and rootedness,
//! not tree shape. Labels are NFC-normalized on construction and compared
//! case-sensitively. Every loaded vocabulary carries a precomputed
//! subsumption index, so [`Vocabulary::subsumes`] is a constant-time bit test.
//!
//! Identifiers render as `T-<n>` (themes), `R-<n>` (relations) and `C-<n>`
//! (nesting contexts). Fresh types are numbered by a deterministic rule:
//! depth-first from the root, children visited in ascending label order, each
//! unnumbered type taking the smallest unused integer. The concept root is
//! declared by the `root "<label>"` document line, which carries no
//! identifier slot; the root therefore always receives the smallest theme
//! number not claimed by an explicit declaration.

mod lint;
mod text;

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::num::NonZeroU32;
use std::str::FromStr;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::report::ValidationReport;

/// Which of the three hierarchies a type belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeKind {
    Theme,
    Relation,
    Nesting,
}

impl TypeKind {
    /// Identifier prefix letter.
    pub fn prefix(self) -> char {
        match self {
            TypeKind::Theme => 'T',
            TypeKind::Relation => 'R',
            TypeKind::Nesting => 'C',
        }
    }

    /// Declaration keyword in vocabulary documents.
    pub fn keyword(self) -> &'static str {
        match self {
            TypeKind::Theme => "concept",
            TypeKind::Relation => "relation",
            TypeKind::Nesting => "nesting",
        }
    }
}

impl fmt::Display for TypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A typed identifier such as `T-12`, `R-3` or `C-1`.
///
/// Numbers are positive and unique within their kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeIdentifier {
    kind: TypeKind,
    number: NonZeroU32,
}

impl TypeIdentifier {
    pub fn new(kind: TypeKind, number: u32) -> Option<Self> {
        NonZeroU32::new(number).map(|number| TypeIdentifier { kind, number })
    }

    pub fn theme(number: u32) -> Self {
        Self::new(TypeKind::Theme, number).expect("theme number must be positive")
    }

    pub fn relation(number: u32) -> Self {
        Self::new(TypeKind::Relation, number).expect("relation number must be positive")
    }

    pub fn nesting(number: u32) -> Self {
        Self::new(TypeKind::Nesting, number).expect("nesting number must be positive")
    }

    pub fn kind(self) -> TypeKind {
        self.kind
    }

    pub fn number(self) -> u32 {
        self.number.get()
    }
}

impl fmt::Display for TypeIdentifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.kind.prefix(), self.number)
    }
}

impl FromStr for TypeIdentifier {
    type Err = ParseIdError;

    fn from_str(s: &str) -> Result<Self, ParseIdError> {
        let (prefix, rest) = s.split_once('-').ok_or(ParseIdError)?;
        let kind = match prefix {
            "T" => TypeKind::Theme,
            "R" => TypeKind::Relation,
            "C" => TypeKind::Nesting,
            _ => return Err(ParseIdError),
        };
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseIdError);
        }
        let number: u32 = rest.parse().map_err(|_| ParseIdError)?;
        TypeIdentifier::new(kind, number).ok_or(ParseIdError)
    }
}

/// Error for malformed identifier text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("malformed type identifier (expected T-<n>, R-<n> or C-<n>)")]
pub struct ParseIdError;

/// A theme: a concept type in the conceptual vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptType {
    pub id: TypeIdentifier,
    pub label: String,
    pub parents: BTreeSet<TypeIdentifier>,
    /// Free-text provenance or scope note; optional.
    pub note: Option<String>,
}

/// A relation type. All slots of the signature are theme identifiers;
/// an absent signature means every slot accepts the concept root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationType {
    pub id: TypeIdentifier,
    pub label: String,
    pub arity: u32,
    pub signature: Option<Vec<TypeIdentifier>>,
    pub parents: BTreeSet<TypeIdentifier>,
}

/// A nesting context type (for example the topic context).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestingType {
    pub id: TypeIdentifier,
    pub label: String,
    pub parents: BTreeSet<TypeIdentifier>,
}

/// Knobs for structural validation.
#[derive(Debug, Clone)]
pub struct ValidationOptions {
    /// When true (default), a relation whose declared signature generalizes
    /// its parent's signature is an error; when false it is downgraded to a
    /// warning.
    pub enforce_covariance: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions { enforce_covariance: true }
    }
}

/// Errors raised by vocabulary operations.
#[derive(Debug, Error)]
pub enum VocabError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("vocabulary is invalid:\n{0}")]
    Invalid(ValidationReport),
    #[error("unknown type identifier {0}")]
    UnknownId(TypeIdentifier),
    #[error("kind mismatch between {0} and {1}")]
    KindMismatch(TypeIdentifier, TypeIdentifier),
}

/// Reference to a type that may not be numbered yet: by identifier or label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeRef {
    Id(TypeIdentifier),
    Label(String),
}

impl From<TypeIdentifier> for TypeRef {
    fn from(id: TypeIdentifier) -> Self {
        TypeRef::Id(id)
    }
}

impl From<&str> for TypeRef {
    fn from(label: &str) -> Self {
        TypeRef::Label(nfc(label))
    }
}

impl From<String> for TypeRef {
    fn from(label: String) -> Self {
        TypeRef::Label(nfc(&label))
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Id(id) => write!(f, "{id}"),
            TypeRef::Label(l) => write!(f, "\"{l}\""),
        }
    }
}

pub(crate) fn nfc(s: &str) -> String {
    s.nfc().collect()
}

#[derive(Debug, Clone)]
struct ConceptDecl {
    id: Option<TypeIdentifier>,
    label: String,
    parents: Vec<TypeRef>,
    note: Option<String>,
}

#[derive(Debug, Clone)]
struct RelationDecl {
    id: Option<TypeIdentifier>,
    label: String,
    arity: u32,
    signature: Option<Vec<TypeRef>>,
    parents: Vec<TypeRef>,
}

#[derive(Debug, Clone)]
struct NestingDecl {
    id: Option<TypeIdentifier>,
    label: String,
    parents: Vec<TypeRef>,
}

/// Incrementally assembled vocabulary. Declarations may reference parents by
/// identifier or by label; identifiers may be left out and are assigned
/// deterministically by [`VocabularyBuilder::build`].
#[derive(Debug, Clone)]
pub struct VocabularyBuilder {
    root_label: String,
    concepts: Vec<ConceptDecl>,
    relations: Vec<RelationDecl>,
    nestings: Vec<NestingDecl>,
}

impl VocabularyBuilder {
    pub fn new(root_label: &str) -> Self {
        VocabularyBuilder {
            root_label: nfc(root_label),
            concepts: Vec::new(),
            relations: Vec::new(),
            nestings: Vec::new(),
        }
    }

    /// Parse a document into a builder without freezing it. Syntax errors
    /// fail; semantic problems (cycles, unknown parents) are deferred so
    /// [`validate`](Self::validate) can report all of them at once.
    pub fn parse(text: &str) -> Result<VocabularyBuilder, VocabError> {
        text::parse(text)
    }

    /// Declare a theme with parents and no preassigned identifier.
    pub fn concept<R: Into<TypeRef>>(&mut self, label: &str, parents: impl IntoIterator<Item = R>) {
        self.concept_full(None, label, parents, None);
    }

    pub fn concept_full<R: Into<TypeRef>>(
        &mut self,
        id: Option<TypeIdentifier>,
        label: &str,
        parents: impl IntoIterator<Item = R>,
        note: Option<&str>,
    ) {
        self.concepts.push(ConceptDecl {
            id,
            label: nfc(label),
            parents: parents.into_iter().map(Into::into).collect(),
            note: note.map(nfc),
        });
    }

    /// Declare a relation. An empty parent list declares the relation root.
    pub fn relation<R: Into<TypeRef>>(
        &mut self,
        label: &str,
        arity: u32,
        parents: impl IntoIterator<Item = R>,
    ) {
        self.relation_full(None, label, arity, None, parents);
    }

    pub fn relation_full<R: Into<TypeRef>>(
        &mut self,
        id: Option<TypeIdentifier>,
        label: &str,
        arity: u32,
        signature: Option<Vec<TypeRef>>,
        parents: impl IntoIterator<Item = R>,
    ) {
        self.relations.push(RelationDecl {
            id,
            label: nfc(label),
            arity,
            signature,
            parents: parents.into_iter().map(Into::into).collect(),
        });
    }

    /// Declare a nesting context. An empty parent list declares the nesting root.
    pub fn nesting<R: Into<TypeRef>>(&mut self, label: &str, parents: impl IntoIterator<Item = R>) {
        self.nesting_full(None, label, parents);
    }

    pub fn nesting_full<R: Into<TypeRef>>(
        &mut self,
        id: Option<TypeIdentifier>,
        label: &str,
        parents: impl IntoIterator<Item = R>,
    ) {
        self.nestings.push(NestingDecl {
            id,
            label: nfc(label),
            parents: parents.into_iter().map(Into::into).collect(),
        });
    }

    /// The theme number the root will receive: the smallest positive integer
    /// not claimed by an explicit concept declaration.
    pub fn root_number(&self) -> u32 {
        let used: BTreeSet<u32> =
            self.concepts.iter().filter_map(|c| c.id.map(|id| id.number())).collect();
        smallest_unused(&used)
    }

    /// Structural validation without consuming the builder. Returns every
    /// finding; an empty error set means [`build`](Self::build) will succeed.
    pub fn validate(&self) -> ValidationReport {
        self.validate_with(&ValidationOptions::default())
    }

    pub fn validate_with(&self, options: &ValidationOptions) -> ValidationReport {
        match Resolved::new(self) {
            Ok(resolved) => resolved.check(self, options),
            Err(report) => report,
        }
        .finish()
    }

    /// Assign identifiers to every unnumbered declaration, in place.
    ///
    /// Deterministic rule: depth-first from each hierarchy's root, children
    /// visited in ascending label order, each unnumbered type taking the
    /// smallest unused integer of its kind. Already-numbered types are left
    /// untouched, so the operation is idempotent.
    pub fn assign_identifiers(&mut self) -> Result<(), VocabError> {
        let report = self.validate();
        if report.has_errors() {
            return Err(VocabError::Invalid(report));
        }
        let resolved = Resolved::new(self).expect("validated builder resolves");
        let assignment = resolved.assign(self);
        for (slot, id) in assignment {
            match slot {
                Slot::Concept(i) => self.concepts[i].id = Some(id),
                Slot::Relation(i) => self.relations[i].id = Some(id),
                Slot::Nesting(i) => self.nestings[i].id = Some(id),
            }
        }
        Ok(())
    }

    /// Validate, number, and freeze into an immutable [`Vocabulary`] with its
    /// subsumption index built.
    pub fn build(self) -> Result<Vocabulary, VocabError> {
        self.build_with(&ValidationOptions::default())
    }

    pub fn build_with(mut self, options: &ValidationOptions) -> Result<Vocabulary, VocabError> {
        let report = self.validate_with(options);
        if report.has_errors() {
            return Err(VocabError::Invalid(report));
        }
        let resolved = Resolved::new(&self).expect("validated builder resolves");
        for (slot, id) in resolved.assign(&self) {
            match slot {
                Slot::Concept(i) => self.concepts[i].id = Some(id),
                Slot::Relation(i) => self.relations[i].id = Some(id),
                Slot::Nesting(i) => self.nestings[i].id = Some(id),
            }
        }
        Ok(resolved.freeze(&self))
    }
}

fn smallest_unused(used: &BTreeSet<u32>) -> u32 {
    let mut n = 1;
    while used.contains(&n) {
        n += 1;
    }
    n
}

/// Internal node address inside a builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Concept(usize),
    Relation(usize),
    Nesting(usize),
}

/// Node index space per kind: concepts use 0 for the root and i+1 for
/// declaration i; relations and nestings use declaration indices directly.
struct Resolved {
    root_number: u32,
    concept_parents: Vec<Vec<usize>>,
    relation_parents: Vec<Vec<usize>>,
    nesting_parents: Vec<Vec<usize>>,
    /// Relation signatures resolved to concept node indices.
    signatures: Vec<Option<Vec<usize>>>,
}

impl Resolved {
    /// Resolve all references. Reference failures (unknown ids or labels,
    /// kind mismatches, duplicate ids or labels) are reported; structural
    /// checks run afterwards in [`Resolved::check`].
    fn new(b: &VocabularyBuilder) -> Result<Resolved, ValidationReport> {
        let mut report = ValidationReport::new();

        let mut concept_ids: BTreeMap<TypeIdentifier, usize> = BTreeMap::new();
        let mut concept_labels: BTreeMap<&str, usize> = BTreeMap::new();
        concept_labels.insert(b.root_label.as_str(), 0);
        if b.root_label.is_empty() {
            report.error("-", "root label is empty");
        }
        for (i, c) in b.concepts.iter().enumerate() {
            let node = i + 1;
            if let Some(id) = c.id {
                if id.kind() != TypeKind::Theme {
                    report.error(id.to_string(), "concept declared with a non-theme identifier");
                } else if concept_ids.insert(id, node).is_some() {
                    report.error(id.to_string(), "duplicate identifier");
                }
            }
            if c.label.is_empty() {
                report.error(subject_of(c.id, &c.label), "empty label");
            } else if let Some(&prev) = concept_labels.get(c.label.as_str()) {
                let prev_desc =
                    if prev == 0 { "the root".to_string() } else { format!("declaration {prev}") };
                report.error(
                    subject_of(c.id, &c.label),
                    format!("duplicate label \"{}\" (also {prev_desc})", c.label),
                );
            } else {
                concept_labels.insert(c.label.as_str(), node);
            }
        }
        let root_number = b.root_number();
        let root_id = TypeIdentifier::theme(root_number);

        let mut relation_ids: BTreeMap<TypeIdentifier, usize> = BTreeMap::new();
        let mut relation_labels: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, r) in b.relations.iter().enumerate() {
            if let Some(id) = r.id {
                if id.kind() != TypeKind::Relation {
                    report
                        .error(id.to_string(), "relation declared with a non-relation identifier");
                } else if relation_ids.insert(id, i).is_some() {
                    report.error(id.to_string(), "duplicate identifier");
                }
            }
            if r.label.is_empty() {
                report.error(subject_of(r.id, &r.label), "empty label");
            } else if relation_labels.insert(r.label.as_str(), i).is_some() {
                report
                    .error(subject_of(r.id, &r.label), format!("duplicate label \"{}\"", r.label));
            }
        }

        let mut nesting_ids: BTreeMap<TypeIdentifier, usize> = BTreeMap::new();
        let mut nesting_labels: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, n) in b.nestings.iter().enumerate() {
            if let Some(id) = n.id {
                if id.kind() != TypeKind::Nesting {
                    report.error(id.to_string(), "nesting declared with a non-nesting identifier");
                } else if nesting_ids.insert(id, i).is_some() {
                    report.error(id.to_string(), "duplicate identifier");
                }
            }
            if n.label.is_empty() {
                report.error(subject_of(n.id, &n.label), "empty label");
            } else if nesting_labels.insert(n.label.as_str(), i).is_some() {
                report
                    .error(subject_of(n.id, &n.label), format!("duplicate label \"{}\"", n.label));
            }
        }

        let resolve_concept = |r: &TypeRef| -> Option<usize> {
            match r {
                TypeRef::Id(id) if *id == root_id => Some(0),
                TypeRef::Id(id) => concept_ids.get(id).copied(),
                TypeRef::Label(l) => concept_labels.get(l.as_str()).copied(),
            }
        };

        let mut concept_parents = vec![Vec::new()];
        for c in &b.concepts {
            let mut parents = Vec::new();
            // Local rootedness check: only the root line lacks parents.
            if c.parents.is_empty() {
                report.error(
                    subject_of(c.id, &c.label),
                    "missing parent (only the root declaration has no parent)",
                );
            }
            for p in &c.parents {
                match p {
                    TypeRef::Id(id) if id.kind() != TypeKind::Theme => {
                        report.error(
                            subject_of(c.id, &c.label),
                            format!("parent {id} is not a theme identifier"),
                        );
                    }
                    _ => match resolve_concept(p) {
                        Some(node) => parents.push(node),
                        None => {
                            report.error(subject_of(c.id, &c.label), format!("unknown parent {p}"))
                        }
                    },
                }
            }
            concept_parents.push(parents);
        }

        let mut relation_parents = Vec::new();
        let mut signatures = Vec::new();
        for r in &b.relations {
            let mut parents = Vec::new();
            for p in &r.parents {
                let resolved = match p {
                    TypeRef::Id(id) => {
                        if id.kind() != TypeKind::Relation {
                            report.error(
                                subject_of(r.id, &r.label),
                                format!("parent {id} is not a relation identifier"),
                            );
                            continue;
                        }
                        relation_ids.get(id).copied()
                    }
                    TypeRef::Label(l) => relation_labels.get(l.as_str()).copied(),
                };
                match resolved {
                    Some(node) => parents.push(node),
                    None => report.error(subject_of(r.id, &r.label), format!("unknown parent {p}")),
                }
            }
            relation_parents.push(parents);

            let mut sig = None;
            if let Some(slots) = &r.signature {
                let mut resolved_slots = Vec::new();
                for s in slots {
                    match s {
                        TypeRef::Id(id) if id.kind() != TypeKind::Theme => {
                            report.error(
                                subject_of(r.id, &r.label),
                                format!("signature slot {id} is not a theme identifier"),
                            );
                        }
                        _ => match resolve_concept(s) {
                            Some(node) => resolved_slots.push(node),
                            None => report.error(
                                subject_of(r.id, &r.label),
                                format!("unknown signature slot {s}"),
                            ),
                        },
                    }
                }
                if resolved_slots.len() == slots.len() {
                    sig = Some(resolved_slots);
                }
            }
            signatures.push(sig);
        }

        let mut nesting_parents = Vec::new();
        for n in &b.nestings {
            let mut parents = Vec::new();
            for p in &n.parents {
                let resolved = match p {
                    TypeRef::Id(id) => {
                        if id.kind() != TypeKind::Nesting {
                            report.error(
                                subject_of(n.id, &n.label),
                                format!("parent {id} is not a nesting identifier"),
                            );
                            continue;
                        }
                        nesting_ids.get(id).copied()
                    }
                    TypeRef::Label(l) => nesting_labels.get(l.as_str()).copied(),
                };
                match resolved {
                    Some(node) => parents.push(node),
                    None => report.error(subject_of(n.id, &n.label), format!("unknown parent {p}")),
                }
            }
            nesting_parents.push(parents);
        }

        if report.has_errors() {
            return Err(report);
        }
        Ok(Resolved { root_number, concept_parents, relation_parents, nesting_parents, signatures })
    }

    /// Structural checks over resolved references.
    fn check(&self, b: &VocabularyBuilder, options: &ValidationOptions) -> ValidationReport {
        let mut report = ValidationReport::new();

        let concept_subject = |node: usize| -> String { concept_subject_text(b, node) };

        check_single_root(
            &mut report,
            self.relation_parents.iter().map(Vec::as_slice),
            |i| subject_of(b.relations[i].id, &b.relations[i].label),
            "relation",
            !b.relations.is_empty(),
        );
        check_single_root(
            &mut report,
            self.nesting_parents.iter().map(Vec::as_slice),
            |i| subject_of(b.nestings[i].id, &b.nestings[i].label),
            "nesting",
            !b.nestings.is_empty(),
        );

        // Acyclicity, per kind.
        if let Some(node) = find_cycle(&self.concept_parents) {
            report.error(concept_subject(node), "cycle detected through parent links");
        }
        if let Some(node) = find_cycle(&self.relation_parents) {
            report.error(
                subject_of(b.relations[node].id, &b.relations[node].label),
                "cycle detected through parent links",
            );
        }
        if let Some(node) = find_cycle(&self.nesting_parents) {
            report.error(
                subject_of(b.nestings[node].id, &b.nestings[node].label),
                "cycle detected through parent links",
            );
        }
        if report.has_errors() {
            // Arity and covariance checks need an acyclic, rooted structure.
            return report;
        }

        // Arity rules.
        for (i, r) in b.relations.iter().enumerate() {
            if r.arity == 0 {
                report.error(subject_of(r.id, &r.label), "arity must be at least 1");
                continue;
            }
            for &p in &self.relation_parents[i] {
                let parent = &b.relations[p];
                if parent.arity != 0 && parent.arity != r.arity {
                    report.error(
                        subject_of(r.id, &r.label),
                        format!(
                            "arity {} differs from parent \"{}\" arity {}",
                            r.arity, parent.label, parent.arity
                        ),
                    );
                }
            }
            if let Some(sig) = &r.signature {
                if sig.len() as u32 != r.arity {
                    report.error(
                        subject_of(r.id, &r.label),
                        format!("signature has {} slots but arity is {}", sig.len(), r.arity),
                    );
                }
            }
        }
        if report.has_errors() {
            return report;
        }

        // Signature covariance: where both child and parent declare
        // signatures, each child slot must specialize the parent slot.
        let closure = closure_of(&self.concept_parents);
        for (i, r) in b.relations.iter().enumerate() {
            let Some(sig) = &self.signatures[i] else { continue };
            for &p in &self.relation_parents[i] {
                let Some(parent_sig) = &self.signatures[p] else { continue };
                if parent_sig.len() != sig.len() {
                    continue; // already reported as an arity problem
                }
                for (slot, (&child_slot, &parent_slot)) in sig.iter().zip(parent_sig).enumerate() {
                    if !closure[child_slot].contains(&parent_slot) {
                        let message = format!(
                            "signature slot {} ({}) generalizes parent \"{}\" slot ({})",
                            slot + 1,
                            concept_subject_text(b, child_slot),
                            b.relations[p].label,
                            concept_subject_text(b, parent_slot),
                        );
                        if options.enforce_covariance {
                            report.error(subject_of(r.id, &r.label), message);
                        } else {
                            report.warning(subject_of(r.id, &r.label), message);
                        }
                    }
                }
            }
        }

        report
    }

    /// Deterministic identifier assignment. Returns the slots to fill.
    fn assign(&self, b: &VocabularyBuilder) -> Vec<(Slot, TypeIdentifier)> {
        let mut out = Vec::new();

        // Concepts: the root (node 0) always takes `root_number`.
        {
            let explicit: Vec<Option<u32>> = std::iter::once(Some(self.root_number))
                .chain(b.concepts.iter().map(|c| c.id.map(|id| id.number())))
                .collect();
            let labels: Vec<&str> = std::iter::once(b.root_label.as_str())
                .chain(b.concepts.iter().map(|c| c.label.as_str()))
                .collect();
            for (node, number) in dfs_numbering(&self.concept_parents, &explicit, &labels, 0) {
                out.push((Slot::Concept(node - 1), TypeIdentifier::theme(number)));
            }
        }

        // Relations and nestings: rooted at their sole parentless type.
        if let Some(root) = parentless(&self.relation_parents) {
            let explicit: Vec<Option<u32>> =
                b.relations.iter().map(|r| r.id.map(|id| id.number())).collect();
            let labels: Vec<&str> = b.relations.iter().map(|r| r.label.as_str()).collect();
            for (node, number) in dfs_numbering(&self.relation_parents, &explicit, &labels, root) {
                out.push((Slot::Relation(node), TypeIdentifier::relation(number)));
            }
        }
        if let Some(root) = parentless(&self.nesting_parents) {
            let explicit: Vec<Option<u32>> =
                b.nestings.iter().map(|n| n.id.map(|id| id.number())).collect();
            let labels: Vec<&str> = b.nestings.iter().map(|n| n.label.as_str()).collect();
            for (node, number) in dfs_numbering(&self.nesting_parents, &explicit, &labels, root) {
                out.push((Slot::Nesting(node), TypeIdentifier::nesting(number)));
            }
        }
        out
    }

    /// Freeze a fully numbered, validated builder into a `Vocabulary`.
    fn freeze(&self, b: &VocabularyBuilder) -> Vocabulary {
        let root_id = TypeIdentifier::theme(self.root_number);
        let concept_id = |node: usize| -> TypeIdentifier {
            if node == 0 {
                root_id
            } else {
                b.concepts[node - 1].id.expect("numbered")
            }
        };

        let mut concepts = BTreeMap::new();
        concepts.insert(
            root_id,
            ConceptType {
                id: root_id,
                label: b.root_label.clone(),
                parents: BTreeSet::new(),
                note: None,
            },
        );
        for (i, c) in b.concepts.iter().enumerate() {
            let id = c.id.expect("numbered");
            concepts.insert(
                id,
                ConceptType {
                    id,
                    label: c.label.clone(),
                    parents: self.concept_parents[i + 1].iter().map(|&p| concept_id(p)).collect(),
                    note: c.note.clone(),
                },
            );
        }

        let mut relations = BTreeMap::new();
        for (i, r) in b.relations.iter().enumerate() {
            let id = r.id.expect("numbered");
            relations.insert(
                id,
                RelationType {
                    id,
                    label: r.label.clone(),
                    arity: r.arity,
                    signature: self.signatures[i]
                        .as_ref()
                        .map(|sig| sig.iter().map(|&s| concept_id(s)).collect()),
                    parents: self.relation_parents[i]
                        .iter()
                        .map(|&p| b.relations[p].id.expect("numbered"))
                        .collect(),
                },
            );
        }

        let mut nestings = BTreeMap::new();
        for (i, n) in b.nestings.iter().enumerate() {
            let id = n.id.expect("numbered");
            nestings.insert(
                id,
                NestingType {
                    id,
                    label: n.label.clone(),
                    parents: self.nesting_parents[i]
                        .iter()
                        .map(|&p| b.nestings[p].id.expect("numbered"))
                        .collect(),
                },
            );
        }

        Vocabulary::assemble(b.root_label.clone(), root_id, concepts, relations, nestings)
    }
}

fn subject_of(id: Option<TypeIdentifier>, label: &str) -> String {
    match id {
        Some(id) => id.to_string(),
        None => format!("\"{label}\""),
    }
}

fn concept_subject_text(b: &VocabularyBuilder, node: usize) -> String {
    if node == 0 {
        format!("\"{}\"", b.root_label)
    } else {
        let c = &b.concepts[node - 1];
        subject_of(c.id, &c.label)
    }
}

fn check_single_root<'a>(
    report: &mut ValidationReport,
    parents: impl Iterator<Item = &'a [usize]>,
    subject: impl Fn(usize) -> String,
    kind: &str,
    any: bool,
) {
    let roots: Vec<usize> = parents
        .enumerate()
        .filter_map(|(i, p)| if p.is_empty() { Some(i) } else { None })
        .collect();
    if !any {
        return;
    }
    if roots.is_empty() {
        report.error("-", format!("{kind} hierarchy has no root (every type has a parent)"));
    } else if roots.len() > 1 {
        for &r in &roots {
            report.error(
                subject(r),
                format!("{kind} hierarchy has {} parentless types, expected one root", roots.len()),
            );
        }
    }
}

/// Returns some node on a parent-link cycle, if any.
fn find_cycle(parents: &[Vec<usize>]) -> Option<usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    fn visit(node: usize, parents: &[Vec<usize>], marks: &mut [Mark]) -> Option<usize> {
        match marks[node] {
            Mark::Black => return None,
            Mark::Grey => return Some(node),
            Mark::White => {}
        }
        marks[node] = Mark::Grey;
        for &p in &parents[node] {
            if let Some(hit) = visit(p, parents, marks) {
                return Some(hit);
            }
        }
        marks[node] = Mark::Black;
        None
    }
    let mut marks = vec![Mark::White; parents.len()];
    (0..parents.len()).find_map(|n| visit(n, parents, &mut marks))
}

fn parentless(parents: &[Vec<usize>]) -> Option<usize> {
    parents.iter().position(Vec::is_empty)
}

/// Ancestor sets (including self) over builder node indices.
fn closure_of(parents: &[Vec<usize>]) -> Vec<BTreeSet<usize>> {
    fn anc(
        node: usize,
        parents: &[Vec<usize>],
        memo: &mut Vec<Option<BTreeSet<usize>>>,
    ) -> BTreeSet<usize> {
        if let Some(done) = &memo[node] {
            return done.clone();
        }
        let mut set = BTreeSet::new();
        set.insert(node);
        for &p in &parents[node] {
            set.extend(anc(p, parents, memo));
        }
        memo[node] = Some(set.clone());
        set
    }
    let mut memo = vec![None; parents.len()];
    (0..parents.len()).map(|n| anc(n, parents, &mut memo)).collect()
}

/// Depth-first numbering from `root`. `parents` is the child-to-parent edge
/// list; traversal follows the reversed edges. Returns assignments for
/// unnumbered nodes only.
fn dfs_numbering(
    parents: &[Vec<usize>],
    explicit: &[Option<u32>],
    labels: &[&str],
    root: usize,
) -> Vec<(usize, u32)> {
    let n = parents.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (child, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(child);
        }
    }
    for list in &mut children {
        list.sort_by(|&a, &b| labels[a].as_bytes().cmp(labels[b].as_bytes()));
        list.dedup();
    }

    let mut used: BTreeSet<u32> = explicit.iter().flatten().copied().collect();
    let mut out = Vec::new();
    let mut visited = vec![false; n];
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        if visited[node] {
            continue;
        }
        visited[node] = true;
        if explicit[node].is_none() {
            let number = smallest_unused(&used);
            used.insert(number);
            out.push((node, number));
        }
        // Push children in reverse so the ascending-label child is visited first.
        for &c in children[node].iter().rev() {
            if !visited[c] {
                stack.push(c);
            }
        }
    }
    out
}

/// Dense ancestor bitsets for one kind; `rows` is row-major, one row of
/// `words` u64 words per type, bit set for every ancestor including self.
#[derive(Debug, Clone, Default)]
struct KindClosure {
    index: BTreeMap<TypeIdentifier, u32>,
    ids: Vec<TypeIdentifier>,
    words: usize,
    rows: Vec<u64>,
}

impl KindClosure {
    fn build(types: impl Iterator<Item = (TypeIdentifier, BTreeSet<TypeIdentifier>)>) -> Self {
        let entries: Vec<(TypeIdentifier, BTreeSet<TypeIdentifier>)> = types.collect();
        let ids: Vec<TypeIdentifier> = entries.iter().map(|(id, _)| *id).collect();
        let index: BTreeMap<TypeIdentifier, u32> =
            ids.iter().enumerate().map(|(i, id)| (*id, i as u32)).collect();
        let n = ids.len();
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];

        // Memoized ancestor computation over dense indices.
        fn fill(
            i: usize,
            parents: &[Vec<usize>],
            words: usize,
            rows: &mut Vec<u64>,
            done: &mut [bool],
        ) {
            if done[i] {
                return;
            }
            done[i] = true;
            rows[i * words + i / 64] |= 1u64 << (i % 64);
            let ps = parents[i].clone();
            for p in ps {
                fill(p, parents, words, rows, done);
                for w in 0..words {
                    let parent_word = rows[p * words + w];
                    rows[i * words + w] |= parent_word;
                }
            }
        }

        let parents: Vec<Vec<usize>> =
            entries.iter().map(|(_, ps)| ps.iter().map(|p| index[p] as usize).collect()).collect();
        let mut done = vec![false; n];
        for i in 0..n {
            fill(i, &parents, words, &mut rows, &mut done);
        }
        KindClosure { index, ids, words, rows }
    }

    fn dense(&self, id: TypeIdentifier) -> Option<usize> {
        self.index.get(&id).map(|&i| i as usize)
    }

    fn bit(&self, row: usize, col: usize) -> bool {
        self.rows[row * self.words + col / 64] >> (col % 64) & 1 == 1
    }

    /// Is `general` an ancestor-or-self of `specific`?
    fn subsumes(&self, general: usize, specific: usize) -> bool {
        self.bit(specific, general)
    }

    /// Minimal common ancestors of `a` and `b`.
    fn lcs(&self, a: usize, b: usize) -> Vec<TypeIdentifier> {
        let common: Vec<usize> =
            (0..self.ids.len()).filter(|&c| self.bit(a, c) && self.bit(b, c)).collect();
        common
            .iter()
            .copied()
            .filter(|&c| !common.iter().any(|&d| d != c && self.subsumes(c, d)))
            .map(|c| self.ids[c])
            .collect()
    }
}

/// An immutable, validated vocabulary with its subsumption index.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    root_label: String,
    root_id: TypeIdentifier,
    concepts: BTreeMap<TypeIdentifier, ConceptType>,
    relations: BTreeMap<TypeIdentifier, RelationType>,
    nestings: BTreeMap<TypeIdentifier, NestingType>,
    concept_labels: BTreeMap<String, TypeIdentifier>,
    relation_labels: BTreeMap<String, TypeIdentifier>,
    nesting_labels: BTreeMap<String, TypeIdentifier>,
    theme_closure: KindClosure,
    relation_closure: KindClosure,
    nesting_closure: KindClosure,
}

impl Vocabulary {
    fn assemble(
        root_label: String,
        root_id: TypeIdentifier,
        concepts: BTreeMap<TypeIdentifier, ConceptType>,
        relations: BTreeMap<TypeIdentifier, RelationType>,
        nestings: BTreeMap<TypeIdentifier, NestingType>,
    ) -> Vocabulary {
        let theme_closure =
            KindClosure::build(concepts.values().map(|c| (c.id, c.parents.clone())));
        let relation_closure =
            KindClosure::build(relations.values().map(|r| (r.id, r.parents.clone())));
        let nesting_closure =
            KindClosure::build(nestings.values().map(|n| (n.id, n.parents.clone())));
        Vocabulary {
            concept_labels: concepts.values().map(|c| (c.label.clone(), c.id)).collect(),
            relation_labels: relations.values().map(|r| (r.label.clone(), r.id)).collect(),
            nesting_labels: nestings.values().map(|n| (n.label.clone(), n.id)).collect(),
            root_label,
            root_id,
            concepts,
            relations,
            nestings,
            theme_closure,
            relation_closure,
            nesting_closure,
        }
    }

    /// Parse a vocabulary document. Missing identifiers are completed by the
    /// deterministic numbering rule; the result always validates cleanly.
    pub fn parse(text: &str) -> Result<Vocabulary, VocabError> {
        Self::parse_with(text, &ValidationOptions::default())
    }

    pub fn parse_with(text: &str, options: &ValidationOptions) -> Result<Vocabulary, VocabError> {
        text::parse(text)?.build_with(options)
    }

    /// Canonical document form: root line, then declarations in identifier
    /// order within each kind, fields in declared order, single spaces.
    /// Bit-exact: `parse(serialize(v))` reproduces `serialize(v)`.
    pub fn serialize(&self) -> String {
        text::serialize(self)
    }

    pub fn root_label(&self) -> &str {
        &self.root_label
    }

    pub fn root_id(&self) -> TypeIdentifier {
        self.root_id
    }

    pub fn root(&self) -> &ConceptType {
        &self.concepts[&self.root_id]
    }

    pub fn concept(&self, id: TypeIdentifier) -> Option<&ConceptType> {
        self.concepts.get(&id)
    }

    pub fn relation(&self, id: TypeIdentifier) -> Option<&RelationType> {
        self.relations.get(&id)
    }

    pub fn nesting(&self, id: TypeIdentifier) -> Option<&NestingType> {
        self.nestings.get(&id)
    }

    /// Does the vocabulary define this identifier (of whatever kind)?
    pub fn contains(&self, id: TypeIdentifier) -> bool {
        match id.kind() {
            TypeKind::Theme => self.concepts.contains_key(&id),
            TypeKind::Relation => self.relations.contains_key(&id),
            TypeKind::Nesting => self.nestings.contains_key(&id),
        }
    }

    pub fn concept_by_label(&self, label: &str) -> Option<&ConceptType> {
        self.concept_labels.get(&nfc(label)).map(|id| &self.concepts[id])
    }

    pub fn relation_by_label(&self, label: &str) -> Option<&RelationType> {
        self.relation_labels.get(&nfc(label)).map(|id| &self.relations[id])
    }

    pub fn nesting_by_label(&self, label: &str) -> Option<&NestingType> {
        self.nesting_labels.get(&nfc(label)).map(|id| &self.nestings[id])
    }

    /// Concepts in identifier order.
    pub fn concepts(&self) -> impl Iterator<Item = &ConceptType> {
        self.concepts.values()
    }

    pub fn relations(&self) -> impl Iterator<Item = &RelationType> {
        self.relations.values()
    }

    pub fn nestings(&self) -> impl Iterator<Item = &NestingType> {
        self.nestings.values()
    }

    /// Direct children of a type, ascending by identifier.
    pub fn children(&self, id: TypeIdentifier) -> Result<Vec<TypeIdentifier>, VocabError> {
        if !self.contains(id) {
            return Err(VocabError::UnknownId(id));
        }
        Ok(match id.kind() {
            TypeKind::Theme => {
                self.concepts.values().filter(|c| c.parents.contains(&id)).map(|c| c.id).collect()
            }
            TypeKind::Relation => {
                self.relations.values().filter(|r| r.parents.contains(&id)).map(|r| r.id).collect()
            }
            TypeKind::Nesting => {
                self.nestings.values().filter(|n| n.parents.contains(&id)).map(|n| n.id).collect()
            }
        })
    }

    fn closure(&self, kind: TypeKind) -> &KindClosure {
        match kind {
            TypeKind::Theme => &self.theme_closure,
            TypeKind::Relation => &self.relation_closure,
            TypeKind::Nesting => &self.nesting_closure,
        }
    }

    /// Reflexive subsumption test: does `general` subsume `specific`?
    ///
    /// `subsumes(a, b)` holds when `b` reaches `a` through parent links
    /// (including `a == b`). The two identifiers must share a kind.
    pub fn subsumes(
        &self,
        general: TypeIdentifier,
        specific: TypeIdentifier,
    ) -> Result<bool, VocabError> {
        if general.kind() != specific.kind() {
            return Err(VocabError::KindMismatch(general, specific));
        }
        let closure = self.closure(general.kind());
        let g = closure.dense(general).ok_or(VocabError::UnknownId(general))?;
        let s = closure.dense(specific).ok_or(VocabError::UnknownId(specific))?;
        Ok(closure.subsumes(g, s))
    }

    /// The minimal common subsumers of `a` and `b`: every common ancestor
    /// not strictly subsuming another common ancestor. Never empty for
    /// same-kind inputs (the kind's root subsumes everything). Ascending by
    /// identifier.
    pub fn least_common_subsumers(
        &self,
        a: TypeIdentifier,
        b: TypeIdentifier,
    ) -> Result<Vec<TypeIdentifier>, VocabError> {
        if a.kind() != b.kind() {
            return Err(VocabError::KindMismatch(a, b));
        }
        let closure = self.closure(a.kind());
        let da = closure.dense(a).ok_or(VocabError::UnknownId(a))?;
        let db = closure.dense(b).ok_or(VocabError::UnknownId(b))?;
        let mut out = closure.lcs(da, db);
        out.sort();
        Ok(out)
    }

    /// Re-run every structural invariant over the frozen vocabulary.
    /// Loaded vocabularies pass by construction; this is the regression
    /// surface for hand-edited data and the `validate` subcommand.
    pub fn validate(&self) -> ValidationReport {
        self.validate_with(&ValidationOptions::default())
    }

    pub fn validate_with(&self, options: &ValidationOptions) -> ValidationReport {
        self.to_builder().validate_with(options)
    }

    /// Style diagnostics for labels; all findings are warnings.
    pub fn lint_labels(&self) -> ValidationReport {
        lint::lint_labels(self)
    }

    /// Decompose back into a builder (lossless).
    pub fn to_builder(&self) -> VocabularyBuilder {
        let mut b = VocabularyBuilder::new(&self.root_label);
        for c in self.concepts.values() {
            if c.id == self.root_id {
                continue;
            }
            b.concept_full(
                Some(c.id),
                &c.label,
                c.parents.iter().copied().map(TypeRef::Id),
                c.note.as_deref(),
            );
        }
        for r in self.relations.values() {
            b.relation_full(
                Some(r.id),
                &r.label,
                r.arity,
                r.signature.as_ref().map(|s| s.iter().copied().map(TypeRef::Id).collect()),
                r.parents.iter().copied().map(TypeRef::Id),
            );
        }
        for n in self.nestings.values() {
            b.nesting_full(Some(n.id), &n.label, n.parents.iter().copied().map(TypeRef::Id));
        }
        b
    }
}
