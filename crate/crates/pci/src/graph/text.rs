//! Plain-text graph documents.
//!
//! ```text
//! graph narrative
//! node n1 [T-11: *]
//! node n2 [T-34: "walachians"@fra!peoples]
//! rel (R-21: n1,n2)
//! nest n1 C-1 {
//! node n1 [T-45: *]
//! }
//! ```
//!
//! Header `graph <kind>`, then one line per element: `node <nid> [<TypeId>:
//! <referent>]` where the referent is `*` or `"<keyword>"[@<lang>][!<name>]`,
//! `rel (<RelId>: <nid>,<nid>,...)`, and nesting blocks `nest <nid> <C-id> {`
//! closed by `}` on its own line. Nest bodies are full graph bodies without a
//! header; nested graphs are topical configurations. Blank lines and `#`
//! comments are ignored when parsing and never emitted.
//!
//! Canonical order: node lines ascending by id, `rel` lines in insertion
//! order, `nest` blocks ascending by (node id, nesting id). Quoted keywords
//! escape `"` as `\"` and `\` as `\\`. Serialization is bit-exact under
//! reparsing.

use std::str::FromStr;

use crate::vocabulary::{nfc, TypeIdentifier, TypeKind};

use super::{
    ConceptualGraph, GraphError, GraphKind, KeywordSource, Lang, NodeId, Referent, RelationEdge,
};

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub(super) fn serialize(g: &ConceptualGraph) -> String {
    let mut out = format!("graph {}\n", g.kind);
    write_body(g, &mut out);
    out
}

pub(super) fn write_body(g: &ConceptualGraph, out: &mut String) {
    for node in g.nodes() {
        out.push_str(&format!("node {} {}\n", node.id, node));
    }
    for edge in g.edges() {
        out.push_str(&format!("rel {edge}\n"));
    }
    for node in g.nodes() {
        for (nesting_type, inner) in &node.nestings {
            out.push_str(&format!("nest {} {} {{\n", node.id, nesting_type));
            write_body(inner, out);
            out.push_str("}\n");
        }
    }
}

pub(super) fn parse(input: &str) -> Result<ConceptualGraph, GraphError> {
    let lines: Vec<&str> = input.lines().map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
    let mut parser = Parser { lines: &lines, pos: 0, offset: 0 };

    let Some((line_no, header)) = parser.next_significant() else {
        return Err(GraphError::Syntax {
            line: 1,
            column: 1,
            message: "document has no graph header".into(),
        });
    };
    let mut cursor = Cursor::new(header, line_no);
    let keyword = cursor.word()?;
    if keyword != "graph" {
        return Err(cursor.err_at_start("expected the graph <kind> header"));
    }
    cursor.require_space()?;
    let kind_word = cursor.word()?;
    let kind =
        GraphKind::from_str(kind_word).map_err(|e| cursor.err_behind(kind_word, &e.to_string()))?;
    cursor.end()?;

    parser.parse_level(kind, false)
}

pub(super) fn parse_body_lines(
    kind: GraphKind,
    lines: &[&str],
    first_line: usize,
) -> Result<ConceptualGraph, GraphError> {
    let mut parser = Parser { lines, pos: 0, offset: first_line.saturating_sub(1) };
    parser.parse_level(kind, false)
}

struct Parser<'a> {
    lines: &'a [&'a str],
    pos: usize,
    offset: usize,
}

/// An edge or nesting pending resolution at level close.
struct PendingEdge {
    line: usize,
    edge: RelationEdge,
}

struct PendingNest {
    line: usize,
    node: NodeId,
    nesting_type: TypeIdentifier,
    inner: ConceptualGraph,
}

impl<'a> Parser<'a> {
    fn line_no(&self) -> usize {
        self.offset + self.pos
    }

    /// Advance to the next non-blank, non-comment line and consume it.
    fn next_significant(&mut self) -> Option<(usize, &'a str)> {
        while self.pos < self.lines.len() {
            let line = self.lines[self.pos];
            self.pos += 1;
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            return Some((self.line_no(), line));
        }
        None
    }

    /// Parse one level. `closed` levels end at `}` (consumed); open levels
    /// end at end of input.
    fn parse_level(
        &mut self,
        kind: GraphKind,
        closed: bool,
    ) -> Result<ConceptualGraph, GraphError> {
        let mut graph = ConceptualGraph::new(kind);
        let mut edges: Vec<PendingEdge> = Vec::new();
        let mut nests: Vec<PendingNest> = Vec::new();

        loop {
            let Some((line_no, line)) = self.next_significant() else {
                if closed {
                    return Err(GraphError::Syntax {
                        line: self.line_no(),
                        column: 1,
                        message: "nesting block is not closed (missing })".into(),
                    });
                }
                break;
            };
            let mut cursor = Cursor::new(line, line_no);
            let keyword = cursor.word()?;
            match keyword {
                "node" => {
                    let (id, node_type, referent) = parse_node_line(&mut cursor)?;
                    if graph.add_concept_as(id, node_type, referent).is_err() {
                        return Err(GraphError::DuplicateNode { line: line_no, id });
                    }
                }
                "rel" => {
                    let edge = parse_rel_line(&mut cursor)?;
                    edges.push(PendingEdge { line: line_no, edge });
                }
                "nest" => {
                    let (node, nesting_type) = parse_nest_open(&mut cursor)?;
                    let inner = self.parse_level(GraphKind::Topical, true)?;
                    nests.push(PendingNest { line: line_no, node, nesting_type, inner });
                }
                "}" => {
                    cursor.end()?;
                    if closed {
                        break;
                    }
                    return Err(cursor.err_at_start("unexpected } outside a nesting block"));
                }
                "graph" => {
                    return Err(cursor.err_at_start("unexpected second graph header"));
                }
                other => {
                    return Err(cursor.err_at_start(&format!(
                        "unknown keyword \"{other}\" (expected node, rel, nest or }})"
                    )));
                }
            }
        }

        for PendingEdge { line, edge } in edges {
            for arg in &edge.args {
                if graph.node(*arg).is_none() {
                    return Err(GraphError::DanglingArg {
                        line,
                        edge: edge.to_string(),
                        arg: *arg,
                    });
                }
            }
            graph.add_relation(edge.relation_type, edge.args).expect("args just checked");
        }
        for PendingNest { line, node, nesting_type, inner } in nests {
            graph.attach_nesting(node, nesting_type, inner).map_err(|e| GraphError::Syntax {
                line,
                column: 1,
                message: e.to_string(),
            })?;
        }
        Ok(graph)
    }
}

/// `<nid> [<TypeId>: <referent>]` after the `node` keyword.
fn parse_node_line(
    cursor: &mut Cursor<'_>,
) -> Result<(NodeId, TypeIdentifier, Referent), GraphError> {
    cursor.require_space()?;
    let id = cursor.node_id()?;
    cursor.require_space()?;
    cursor.expect('[')?;
    let node_type = cursor.type_id()?;
    cursor.expect(':')?;
    cursor.expect(' ')?;
    let referent = parse_referent(cursor)?;
    cursor.expect(']')?;
    cursor.end()?;
    Ok((id, node_type, referent))
}

/// `*` or `"<keyword>"[@<lang>][!<name>]`, up to (not including) `]`.
fn parse_referent(cursor: &mut Cursor<'_>) -> Result<Referent, GraphError> {
    if cursor.peek() == Some('*') {
        cursor.bump();
        return Ok(Referent::Generic);
    }
    let keyword = cursor.quoted()?;
    let mut language = None;
    if cursor.peek() == Some('@') {
        cursor.bump();
        let tag = cursor.take_while(|c| c != '!' && c != ']' && c != ' ' && c != '\t');
        language = Some(Lang::new(tag).ok_or_else(|| {
            cursor.err_behind(tag, &GraphError::BadLanguage(tag.to_string()).to_string())
        })?);
    }
    let mut source = KeywordSource::Free;
    if cursor.peek() == Some('!') {
        cursor.bump();
        let name = cursor.take_while(|c| c != ']' && c != ' ' && c != '\t');
        if name.is_empty() {
            return Err(cursor.err("expected a controlled-vocabulary name after '!'"));
        }
        source = KeywordSource::Controlled(nfc(name));
    }
    Ok(Referent::Individual { keyword: nfc(&keyword), language, source })
}

/// `(<RelId>: <nid>,<nid>,...)` after the `rel` keyword.
fn parse_rel_line(cursor: &mut Cursor<'_>) -> Result<RelationEdge, GraphError> {
    cursor.require_space()?;
    cursor.expect('(')?;
    let relation_type = cursor.type_id()?;
    cursor.expect(':')?;
    cursor.expect(' ')?;
    let mut args = Vec::new();
    loop {
        args.push(cursor.node_id()?);
        if cursor.peek() == Some(',') {
            cursor.bump();
        } else {
            break;
        }
    }
    cursor.expect(')')?;
    cursor.end()?;
    Ok(RelationEdge { relation_type, args })
}

/// `<nid> <C-id> {` after the `nest` keyword.
fn parse_nest_open(cursor: &mut Cursor<'_>) -> Result<(NodeId, TypeIdentifier), GraphError> {
    cursor.require_space()?;
    let node = cursor.node_id()?;
    cursor.require_space()?;
    let nesting_type = cursor.type_id_word()?;
    if nesting_type.kind() != TypeKind::Nesting {
        return Err(
            cursor.err(&format!("expected a nesting-context identifier, got {nesting_type}"))
        );
    }
    cursor.require_space()?;
    cursor.expect('{')?;
    cursor.end()?;
    Ok((node, nesting_type))
}

/// Single-line scanner with 1-based character columns.
struct Cursor<'a> {
    line: &'a str,
    pos: usize,
    line_no: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: &'a str, line_no: usize) -> Self {
        Cursor { line, pos: 0, line_no }
    }

    fn column_at(&self, byte_pos: usize) -> usize {
        self.line[..byte_pos].chars().count() + 1
    }

    fn err(&self, message: &str) -> GraphError {
        GraphError::Syntax {
            line: self.line_no,
            column: self.column_at(self.pos),
            message: message.to_string(),
        }
    }

    fn err_at_start(&self, message: &str) -> GraphError {
        GraphError::Syntax { line: self.line_no, column: 1, message: message.to_string() }
    }

    fn err_behind(&self, consumed: &str, message: &str) -> GraphError {
        GraphError::Syntax {
            line: self.line_no,
            column: self.column_at(self.pos - consumed.len()),
            message: message.to_string(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.line[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn expect(&mut self, wanted: char) -> Result<(), GraphError> {
        if self.peek() == Some(wanted) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&format!("expected '{wanted}'")))
        }
    }

    fn require_space(&mut self) -> Result<(), GraphError> {
        let before = self.pos;
        while matches!(self.peek(), Some(' ') | Some('\t')) {
            self.bump();
        }
        if self.pos == before {
            return Err(self.err("expected a space"));
        }
        Ok(())
    }

    fn take_while(&mut self, keep: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !keep(c) {
                break;
            }
            self.bump();
        }
        &self.line[start..self.pos]
    }

    /// A run of characters up to whitespace, `"`, or a structural character.
    fn word(&mut self) -> Result<&'a str, GraphError> {
        let word = self.take_while(|c| !matches!(c, ' ' | '\t' | '"'));
        if word.is_empty() {
            return Err(self.err("expected a word"));
        }
        Ok(word)
    }

    fn node_id(&mut self) -> Result<NodeId, GraphError> {
        let word = self.take_while(|c| c.is_ascii_alphanumeric());
        NodeId::from_str(word).map_err(|e| self.err_behind(word, &e.to_string()))
    }

    /// Type identifier up to `:` (inside brackets).
    fn type_id(&mut self) -> Result<TypeIdentifier, GraphError> {
        let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
        TypeIdentifier::from_str(word).map_err(|e| self.err_behind(word, &e.to_string()))
    }

    /// Type identifier as a standalone word.
    fn type_id_word(&mut self) -> Result<TypeIdentifier, GraphError> {
        self.type_id()
    }

    fn quoted(&mut self) -> Result<String, GraphError> {
        if self.peek() != Some('"') {
            return Err(self.err("expected an opening quote"));
        }
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err("unterminated quoted string")),
                Some('"') => break,
                Some('\\') => match self.bump() {
                    Some('"') => out.push('"'),
                    Some('\\') => out.push('\\'),
                    _ => return Err(self.err("invalid escape (only \\\" and \\\\ are allowed)")),
                },
                Some(c) => out.push(c),
            }
        }
        Ok(out)
    }

    fn end(&mut self) -> Result<(), GraphError> {
        if self.rest().trim_end().is_empty() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing text"))
        }
    }
}
