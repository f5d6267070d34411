//! Conceptual graphs: concept nodes with referents, ordered relation edges,
//! and nesting boxes holding inner graphs.
//!
//! A graph is one *level* of nodes and edges. A node may carry nestings:
//! inner graphs stored under a nesting-context type, each an independent
//! level with its own node-id scope. Edges never cross levels; the inner
//! graph is a closed unit serving as the node's extended referent.
//!
//! Construction is permissive: types are not resolved against a
//! [`Vocabulary`] until [`ConceptualGraph::check_well_formed`], so graphs can
//! be assembled before or independently of vocabulary loading. Checking is
//! non-destructive and returns a [`ValidationReport`].

mod check;
mod merge;
mod text;

pub(crate) use text::quote;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::report::ValidationReport;
use crate::vocabulary::{TypeIdentifier, Vocabulary};

pub use check::CvLookup;

/// ISO 639-2 language code: exactly three lowercase ASCII letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lang([u8; 3]);

impl Lang {
    pub fn new(code: &str) -> Option<Lang> {
        let bytes = code.as_bytes();
        if bytes.len() == 3 && bytes.iter().all(|b| b.is_ascii_lowercase()) {
            Some(Lang([bytes[0], bytes[1], bytes[2]]))
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("lowercase ASCII")
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Lang {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Lang, GraphError> {
        Lang::new(s).ok_or_else(|| GraphError::BadLanguage(s.to_string()))
    }
}

/// Where an individual keyword came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KeywordSource {
    /// Free text chosen by the annotator.
    Free,
    /// Member of the named controlled vocabulary.
    Controlled(String),
}

/// The referent of a concept node: an unspecified instance (`*`) or an
/// individual named by a keyword.
///
/// Keywords are NFC-normalized at construction and compared exactly,
/// case-sensitively; the language tag participates in identity. The source
/// does not: a free keyword and a controlled one spelling the same word in
/// the same language denote the same individual.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Referent {
    Generic,
    Individual { keyword: String, language: Option<Lang>, source: KeywordSource },
}

impl Referent {
    /// Free individual keyword with no language tag.
    pub fn individual(keyword: &str) -> Referent {
        Referent::individual_full(keyword, None, KeywordSource::Free)
    }

    pub fn individual_tagged(keyword: &str, language: Lang) -> Referent {
        Referent::individual_full(keyword, Some(language), KeywordSource::Free)
    }

    pub fn individual_full(
        keyword: &str,
        language: Option<Lang>,
        source: KeywordSource,
    ) -> Referent {
        Referent::Individual { keyword: crate::vocabulary::nfc(keyword), language, source }
    }

    pub fn is_generic(&self) -> bool {
        matches!(self, Referent::Generic)
    }

    /// Identity for coreference and query matching: keyword and language,
    /// source excluded. `None` for generics (each generic is a distinct
    /// existential).
    pub fn identity(&self) -> Option<(&str, Option<Lang>)> {
        match self {
            Referent::Generic => None,
            Referent::Individual { keyword, language, .. } => Some((keyword.as_str(), *language)),
        }
    }
}

impl fmt::Display for Referent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Referent::Generic => f.write_str("*"),
            Referent::Individual { keyword, language, source } => {
                write!(f, "{}", text::quote(keyword))?;
                if let Some(lang) = language {
                    write!(f, "@{lang}")?;
                }
                if let KeywordSource::Controlled(name) = source {
                    write!(f, "!{name}")?;
                }
                Ok(())
            }
        }
    }
}

/// Node identifier, local to one graph level; rendered `n<k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(number: u32) -> NodeId {
        NodeId(number)
    }

    pub fn number(self) -> u32 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl FromStr for NodeId {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<NodeId, GraphError> {
        let bad = || GraphError::BadNodeId(s.to_string());
        let digits = s.strip_prefix('n').ok_or_else(bad)?;
        if digits.is_empty()
            || digits.starts_with('0')
            || !digits.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        digits.parse().map(NodeId).map_err(|_| bad())
    }
}

/// A concept node: type, referent, and any nesting boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptNode {
    pub id: NodeId,
    pub concept_type: TypeIdentifier,
    pub referent: Referent,
    /// Inner graphs by nesting-context type, ascending by type identifier;
    /// at most one per type.
    pub nestings: Vec<(TypeIdentifier, ConceptualGraph)>,
}

impl ConceptNode {
    pub fn nesting(&self, nesting_type: TypeIdentifier) -> Option<&ConceptualGraph> {
        self.nestings.iter().find(|(t, _)| *t == nesting_type).map(|(_, g)| g)
    }

    pub(crate) fn nesting_mut(
        &mut self,
        nesting_type: TypeIdentifier,
    ) -> Option<&mut ConceptualGraph> {
        self.nestings.iter_mut().find(|(t, _)| *t == nesting_type).map(|(_, g)| g)
    }
}

impl fmt::Display for ConceptNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}: {}]", self.concept_type, self.referent)
    }
}

/// An ordered relation edge. Arguments reference nodes of the same level;
/// repeats are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationEdge {
    pub relation_type: TypeIdentifier,
    pub args: Vec<NodeId>,
}

impl fmt::Display for RelationEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}: ", self.relation_type)?;
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{arg}")?;
        }
        f.write_str(")")
    }
}

/// Configuration role of a graph. Advisory metadata, except that
/// `Narrative` strengthens the discourse-topic obligation to an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GraphKind {
    Topical,
    Narrative,
    Pragmatic,
    #[default]
    Unspecified,
}

impl GraphKind {
    pub fn keyword(self) -> &'static str {
        match self {
            GraphKind::Topical => "topical",
            GraphKind::Narrative => "narrative",
            GraphKind::Pragmatic => "pragmatic",
            GraphKind::Unspecified => "unspecified",
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for GraphKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<GraphKind, GraphError> {
        match s {
            "topical" => Ok(GraphKind::Topical),
            "narrative" => Ok(GraphKind::Narrative),
            "pragmatic" => Ok(GraphKind::Pragmatic),
            "unspecified" => Ok(GraphKind::Unspecified),
            other => Err(GraphError::BadKind(other.to_string())),
        }
    }
}

/// Errors from graph construction and parsing.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("duplicate node id {id} at line {line}")]
    DuplicateNode { line: usize, id: NodeId },
    #[error("edge {edge} at line {line} references unknown node {arg}")]
    DanglingArg { line: usize, edge: String, arg: NodeId },
    #[error("node {0} already exists at this level")]
    NodeExists(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {node} already has a {nesting} nesting")]
    DuplicateNesting { node: NodeId, nesting: TypeIdentifier },
    #[error("unknown relation type {0}")]
    UnknownRelation(TypeIdentifier),
    #[error("relation {relation} takes {expected} arguments, got {given}")]
    ArityMismatch { relation: TypeIdentifier, expected: u32, given: usize },
    #[error("malformed node id {0:?} (expected n<positive integer>)")]
    BadNodeId(String),
    #[error("malformed graph kind {0:?}")]
    BadKind(String),
    #[error("malformed language tag {0:?} (expected three lowercase letters)")]
    BadLanguage(String),
}

/// One level of a conceptual graph.
///
/// Nodes are held in ascending id order; edges in insertion order. Both
/// orders are part of the graph's identity and of its canonical text form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConceptualGraph {
    pub kind: GraphKind,
    nodes: BTreeMap<NodeId, ConceptNode>,
    edges: Vec<RelationEdge>,
}

impl ConceptualGraph {
    pub fn new(kind: GraphKind) -> ConceptualGraph {
        ConceptualGraph { kind, nodes: BTreeMap::new(), edges: Vec::new() }
    }

    /// Append a concept node under a fresh id (`n<k>`, one past the
    /// largest id in use at this level).
    pub fn add_concept(&mut self, concept_type: TypeIdentifier, referent: Referent) -> NodeId {
        let id = NodeId(self.nodes.keys().last().map_or(0, |n| n.0) + 1);
        self.nodes.insert(id, ConceptNode { id, concept_type, referent, nestings: Vec::new() });
        id
    }

    /// Append a concept node under a caller-chosen id.
    pub fn add_concept_as(
        &mut self,
        id: NodeId,
        concept_type: TypeIdentifier,
        referent: Referent,
    ) -> Result<NodeId, GraphError> {
        if self.nodes.contains_key(&id) {
            return Err(GraphError::NodeExists(id));
        }
        self.nodes.insert(id, ConceptNode { id, concept_type, referent, nestings: Vec::new() });
        Ok(id)
    }

    /// Append an ordered relation edge; returns its index. Argument arity
    /// against the vocabulary is deferred to well-formedness checking (see
    /// [`add_relation_checked`](Self::add_relation_checked)).
    pub fn add_relation(
        &mut self,
        relation_type: TypeIdentifier,
        args: Vec<NodeId>,
    ) -> Result<usize, GraphError> {
        for arg in &args {
            if !self.nodes.contains_key(arg) {
                return Err(GraphError::UnknownNode(*arg));
            }
        }
        self.edges.push(RelationEdge { relation_type, args });
        Ok(self.edges.len() - 1)
    }

    /// Append an edge, additionally enforcing the declared arity now.
    pub fn add_relation_checked(
        &mut self,
        vocabulary: &Vocabulary,
        relation_type: TypeIdentifier,
        args: Vec<NodeId>,
    ) -> Result<usize, GraphError> {
        let declared =
            vocabulary.relation(relation_type).ok_or(GraphError::UnknownRelation(relation_type))?;
        if declared.arity as usize != args.len() {
            return Err(GraphError::ArityMismatch {
                relation: relation_type,
                expected: declared.arity,
                given: args.len(),
            });
        }
        self.add_relation(relation_type, args)
    }

    /// Store `inner` as the node's nesting of the given context type.
    ///
    /// Inner graphs are topical configurations by definition; the stored
    /// graph's kind is set to [`GraphKind::Topical`]. At most one nesting
    /// per context type per node.
    pub fn attach_nesting(
        &mut self,
        node: NodeId,
        nesting_type: TypeIdentifier,
        mut inner: ConceptualGraph,
    ) -> Result<(), GraphError> {
        let Some(entry) = self.nodes.get_mut(&node) else {
            return Err(GraphError::UnknownNode(node));
        };
        if entry.nestings.iter().any(|(t, _)| *t == nesting_type) {
            return Err(GraphError::DuplicateNesting { node, nesting: nesting_type });
        }
        inner.kind = GraphKind::Topical;
        let at = entry.nestings.partition_point(|(t, _)| *t < nesting_type);
        entry.nestings.insert(at, (nesting_type, inner));
        Ok(())
    }

    pub fn node(&self, id: NodeId) -> Option<&ConceptNode> {
        self.nodes.get(&id)
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> Option<&mut ConceptNode> {
        self.nodes.get_mut(&id)
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = &ConceptNode> {
        self.nodes.values()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edges(&self) -> &[RelationEdge] {
        &self.edges
    }

    /// Total node count including all nesting levels.
    pub fn deep_node_count(&self) -> usize {
        self.nodes.len()
            + self
                .nodes
                .values()
                .flat_map(|n| &n.nestings)
                .map(|(_, g)| g.deep_node_count())
                .sum::<usize>()
    }

    /// Check every well-formedness rule against a vocabulary. Controlled
    /// keywords are not resolved (no catalog given); see
    /// [`check_well_formed_with`](Self::check_well_formed_with).
    pub fn check_well_formed(&self, vocabulary: &Vocabulary) -> ValidationReport {
        self.check_well_formed_with(vocabulary, &|_, _, _| CvLookup::Unchecked)
    }

    /// Check well-formedness, resolving controlled keywords through
    /// `resolve(vocab_name, keyword, language)`.
    pub fn check_well_formed_with(
        &self,
        vocabulary: &Vocabulary,
        resolve: &dyn Fn(&str, &str, Option<Lang>) -> CvLookup,
    ) -> ValidationReport {
        check::check(self, vocabulary, resolve)
    }

    /// Normalize by merging coreferent nodes: at each level, nodes with the
    /// same type, keyword and language collapse into the earliest such node,
    /// provided their nesting-context types are disjoint. Edges are
    /// rewritten; generics never merge. Idempotent.
    pub fn merge_coreferent(&self) -> ConceptualGraph {
        merge::merge(self)
    }

    /// Canonical text form. Bit-exact: parsing the output and serializing
    /// again reproduces it.
    pub fn serialize(&self) -> String {
        text::serialize(self)
    }

    /// Parse a graph document produced by [`serialize`](Self::serialize) or
    /// written by hand in the same grammar.
    pub fn parse(input: &str) -> Result<ConceptualGraph, GraphError> {
        text::parse(input)
    }

    /// Parse a graph body (no `graph <kind>` header) from pre-split lines.
    /// `first_line` is the 1-based document line number of `lines[0]`, for
    /// error reporting. Used by embedding formats.
    pub(crate) fn parse_body_lines(
        kind: GraphKind,
        lines: &[&str],
        first_line: usize,
    ) -> Result<ConceptualGraph, GraphError> {
        text::parse_body_lines(kind, lines, first_line)
    }

    /// Serialize only the body lines (no header), appending to `out`.
    pub(crate) fn write_body(&self, out: &mut String) {
        text::write_body(self, out)
    }
}
