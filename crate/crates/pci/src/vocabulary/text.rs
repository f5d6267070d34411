//! Plain-text vocabulary document format.
//!
//! ```text
//! root "ESCoM_PCI_201206"
//! concept T-2 "Discourse Description" parent=T-1
//! relation R-11 "Actantial Relation" arity=2 signature=T-31,T-1 parent=R-10
//! nesting C-1 "Discourse Topic"
//! ```
//!
//! One declaration per line. Blank lines and lines whose first non-space
//! character is `#` are ignored. The first significant line must be the
//! `root` line. Identifiers are optional on declarations; parents and
//! signature slots may be given as identifiers or as quoted labels. Quoted
//! strings escape `"` as `\"` and `\` as `\\`.
//!
//! Serialization is canonical and bit-exact: root line first, then concepts,
//! relations and nestings each in ascending identifier order, fields in fixed
//! order (`parent`, `note` for concepts; `arity`, `signature`, `parent` for
//! relations), single spaces between tokens, parent lists ascending by
//! identifier, and a trailing newline.

use std::str::FromStr;

use super::{nfc, TypeIdentifier, TypeKind, TypeRef, VocabError, Vocabulary, VocabularyBuilder};

pub(super) fn parse(text: &str) -> Result<VocabularyBuilder, VocabError> {
    let mut builder: Option<VocabularyBuilder> = None;

    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }

        let mut scan = Scan::new(line, line_no);
        let keyword = scan.word()?;
        match keyword {
            "root" => {
                if builder.is_some() {
                    return Err(scan.err("duplicate root line"));
                }
                scan.require_space()?;
                let label = scan.quoted()?;
                scan.end()?;
                builder = Some(VocabularyBuilder::new(&label));
            }
            "concept" | "relation" | "nesting" => {
                let Some(b) = builder.as_mut() else {
                    return Err(VocabError::Syntax {
                        line: line_no,
                        column: 1,
                        message: "expected the root line before any declaration".into(),
                    });
                };
                let kind = match keyword {
                    "concept" => TypeKind::Theme,
                    "relation" => TypeKind::Relation,
                    _ => TypeKind::Nesting,
                };
                parse_declaration(&mut scan, kind, b)?;
            }
            other => {
                return Err(VocabError::Syntax {
                    line: line_no,
                    column: 1,
                    message: format!(
                        "unknown keyword \"{other}\" (expected root, concept, relation or nesting)"
                    ),
                });
            }
        }
    }

    builder.ok_or(VocabError::Syntax {
        line: 1,
        column: 1,
        message: "document has no root line".into(),
    })
}

fn parse_declaration(
    scan: &mut Scan<'_>,
    kind: TypeKind,
    b: &mut VocabularyBuilder,
) -> Result<(), VocabError> {
    scan.require_space()?;

    // Optional identifier, then the quoted label.
    let id = if scan.peek() == Some('"') {
        None
    } else {
        let word = scan.word()?;
        let id = TypeIdentifier::from_str(word)
            .map_err(|e| scan.err_at_last_word(word, &e.to_string()))?;
        if id.kind() != kind {
            return Err(scan.err_at_last_word(
                word,
                &format!("identifier {id} does not match the {} keyword", kind.keyword()),
            ));
        }
        scan.require_space()?;
        Some(id)
    };
    let label = scan.quoted()?;

    // Fields, each at most once.
    let mut parents: Option<Vec<TypeRef>> = None;
    let mut note: Option<String> = None;
    let mut arity: Option<u32> = None;
    let mut signature: Option<Vec<TypeRef>> = None;
    while !scan.at_end() {
        scan.require_space()?;
        if scan.at_end_of_text() {
            break;
        }
        let name = scan.field_name()?;
        let fresh = match name.as_str() {
            "parent" => parents.replace(scan.refs()?).is_none(),
            "note" if kind == TypeKind::Theme => note.replace(scan.quoted()?).is_none(),
            "arity" if kind == TypeKind::Relation => arity.replace(scan.integer()?).is_none(),
            "signature" if kind == TypeKind::Relation => signature.replace(scan.refs()?).is_none(),
            _ => {
                return Err(scan.err(&format!(
                    "field \"{name}\" is not valid in a {} declaration",
                    kind.keyword()
                )))
            }
        };
        if !fresh {
            return Err(scan.err(&format!("duplicate field \"{name}\"")));
        }
    }

    let parents = parents.unwrap_or_default();
    match kind {
        TypeKind::Theme => b.concept_full(id, &label, parents, note.as_deref()),
        TypeKind::Relation => {
            let Some(arity) = arity else {
                return Err(scan.err("relation declaration requires arity=<n>"));
            };
            b.relation_full(id, &label, arity, signature, parents);
        }
        TypeKind::Nesting => b.nesting_full(id, &label, parents),
    }
    Ok(())
}

/// Single-line scanner with 1-based character columns for error reports.
struct Scan<'a> {
    line: &'a str,
    pos: usize,
    line_no: usize,
}

impl<'a> Scan<'a> {
    fn new(line: &'a str, line_no: usize) -> Self {
        Scan { line, pos: 0, line_no }
    }

    fn column(&self) -> usize {
        self.line[..self.pos].chars().count() + 1
    }

    fn err(&self, message: &str) -> VocabError {
        VocabError::Syntax {
            line: self.line_no,
            column: self.column(),
            message: message.to_string(),
        }
    }

    fn err_at_last_word(&self, word: &str, message: &str) -> VocabError {
        let start = self.pos - word.len();
        VocabError::Syntax {
            line: self.line_no,
            column: self.line[..start].chars().count() + 1,
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

    /// True when only trailing whitespace remains (does not consume it).
    fn at_end(&self) -> bool {
        self.rest().trim_end().is_empty()
    }

    fn at_end_of_text(&self) -> bool {
        self.rest().is_empty()
    }

    /// Consume exactly one run of spaces or tabs.
    fn require_space(&mut self) -> Result<(), VocabError> {
        let before = self.pos;
        while matches!(self.peek(), Some(' ') | Some('\t')) {
            self.bump();
        }
        if self.pos == before && !self.at_end_of_text() {
            return Err(self.err("expected a space"));
        }
        Ok(())
    }

    /// A run of characters up to whitespace or a quote.
    fn word(&mut self) -> Result<&'a str, VocabError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == ' ' || c == '\t' || c == '"' {
                break;
            }
            self.bump();
        }
        if self.pos == start {
            return Err(self.err("expected a word"));
        }
        Ok(&self.line[start..self.pos])
    }

    /// Field name up to and including `=`.
    fn field_name(&mut self) -> Result<String, VocabError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == '=' {
                let name = self.line[start..self.pos].to_string();
                self.bump();
                if name.is_empty() {
                    return Err(self.err("expected a field name before '='"));
                }
                return Ok(name);
            }
            if c == ' ' || c == '\t' || c == '"' {
                break;
            }
            self.bump();
        }
        Err(self.err("expected a field of the form name=value"))
    }

    /// Quoted string with `\"` and `\\` escapes; NFC-normalized.
    fn quoted(&mut self) -> Result<String, VocabError> {
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
        Ok(nfc(&out))
    }

    /// Comma-separated references: identifiers or quoted labels, no spaces.
    fn refs(&mut self) -> Result<Vec<TypeRef>, VocabError> {
        let mut out = Vec::new();
        loop {
            if self.peek() == Some('"') {
                out.push(TypeRef::Label(self.quoted()?));
            } else {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c == ' ' || c == '\t' || c == '"' || c == ',' {
                        break;
                    }
                    self.bump();
                }
                let word = &self.line[start..self.pos];
                if word.is_empty() {
                    return Err(self.err("expected a type identifier or quoted label"));
                }
                let id = TypeIdentifier::from_str(word)
                    .map_err(|e| self.err_at_last_word(word, &e.to_string()))?;
                out.push(TypeRef::Id(id));
            }
            if self.peek() == Some(',') {
                self.bump();
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn integer(&mut self) -> Result<u32, VocabError> {
        let word = self.word()?;
        word.parse().map_err(|_| self.err_at_last_word(word, "expected a non-negative integer"))
    }

    fn end(&mut self) -> Result<(), VocabError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing text"))
        }
    }
}

fn quote(s: &str) -> String {
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

fn push_refs(out: &mut String, ids: impl IntoIterator<Item = TypeIdentifier>) {
    let mut first = true;
    for id in ids {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str(&id.to_string());
    }
}

pub(super) fn serialize(v: &Vocabulary) -> String {
    let mut out = String::new();
    out.push_str("root ");
    out.push_str(&quote(v.root_label()));
    out.push('\n');

    for c in v.concepts() {
        if c.id == v.root_id() {
            continue;
        }
        out.push_str("concept ");
        out.push_str(&c.id.to_string());
        out.push(' ');
        out.push_str(&quote(&c.label));
        out.push_str(" parent=");
        push_refs(&mut out, c.parents.iter().copied());
        if let Some(note) = &c.note {
            out.push_str(" note=");
            out.push_str(&quote(note));
        }
        out.push('\n');
    }

    for r in v.relations() {
        out.push_str("relation ");
        out.push_str(&r.id.to_string());
        out.push(' ');
        out.push_str(&quote(&r.label));
        out.push_str(&format!(" arity={}", r.arity));
        if let Some(sig) = &r.signature {
            out.push_str(" signature=");
            push_refs(&mut out, sig.iter().copied());
        }
        if !r.parents.is_empty() {
            out.push_str(" parent=");
            push_refs(&mut out, r.parents.iter().copied());
        }
        out.push('\n');
    }

    for n in v.nestings() {
        out.push_str("nesting ");
        out.push_str(&n.id.to_string());
        out.push(' ');
        out.push_str(&quote(&n.label));
        if !n.parents.is_empty() {
            out.push_str(" parent=");
            push_refs(&mut out, n.parents.iter().copied());
        }
        out.push('\n');
    }

    out
}
