//! Canonical text formats: the annotation store (`pci-store v1`),
//! controlled-vocabulary files, and template files. All three are
//! line-oriented UTF-8; blank lines and `#` comments are skipped, leading
//! whitespace is insignificant, and serialization is canonical (skipped
//! trivia is never re-emitted).

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::graph::{quote, ConceptualGraph, GraphKind, KeywordSource, Lang};
use crate::vocabulary::{nfc, TypeIdentifier};

use super::{
    valid_id, AnnotationStore, ControlledVocabulary, CvError, FieldText, Keyword, KeywordKind,
    MediaAsset, Segment, SegmentAnnotation, SlotPath, StoreError, Template, TemplateError,
    TemplateGroup,
};

pub(super) struct ScanError {
    line: usize,
    message: String,
}

impl From<ScanError> for StoreError {
    fn from(e: ScanError) -> StoreError {
        StoreError::Syntax { line: e.line, message: e.message }
    }
}

impl From<ScanError> for CvError {
    fn from(e: ScanError) -> CvError {
        CvError::Syntax { line: e.line, message: e.message }
    }
}

impl From<ScanError> for TemplateError {
    fn from(e: ScanError) -> TemplateError {
        TemplateError::Syntax { line: e.line, message: e.message }
    }
}

/// Token scanner over one trimmed line.
struct Scan<'a> {
    line: &'a str,
    pos: usize,
    line_no: usize,
}

impl<'a> Scan<'a> {
    fn new(line: &'a str, line_no: usize) -> Scan<'a> {
        Scan { line, pos: 0, line_no }
    }

    fn fail(&self, message: impl Into<String>) -> ScanError {
        ScanError { line: self.line_no, message: message.into() }
    }

    fn skip_ws(&mut self) {
        let rest = &self.line[self.pos..];
        let trimmed = rest.trim_start_matches([' ', '\t']);
        self.pos += rest.len() - trimmed.len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.line.len()
    }

    fn end(&mut self) -> Result<(), ScanError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.fail("unexpected trailing text"))
        }
    }

    fn word(&mut self) -> Result<&'a str, ScanError> {
        self.skip_ws();
        let rest = &self.line[self.pos..];
        let len = rest.find([' ', '\t', '"']).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.fail("expected a word"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn number(&mut self) -> Result<u64, ScanError> {
        let word = self.word()?;
        word.parse::<u64>().map_err(|_| self.fail(format!("expected a number, found {word:?}")))
    }

    fn lang(&mut self) -> Result<Lang, ScanError> {
        let word = self.word()?;
        Lang::new(word).ok_or_else(|| {
            self.fail(format!("expected a three-letter lowercase language code, found {word:?}"))
        })
    }

    fn type_id(&mut self) -> Result<TypeIdentifier, ScanError> {
        let word = self.word()?;
        TypeIdentifier::from_str(word).map_err(|e| self.fail(e.to_string()))
    }

    fn quoted(&mut self) -> Result<String, ScanError> {
        self.skip_ws();
        if !self.line[self.pos..].starts_with('"') {
            return Err(self.fail("expected a quoted string"));
        }
        self.pos += 1;
        let mut out = String::new();
        let mut chars = self.line[self.pos..].char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, '"')) => out.push('"'),
                    Some((_, '\\')) => out.push('\\'),
                    Some((_, other)) => {
                        return Err(self.fail(format!("unknown escape sequence \\{other}")))
                    }
                    None => break,
                },
                c => out.push(c),
            }
        }
        Err(self.fail("unterminated string"))
    }
}

/// Significant-line iteration: skips blanks and `#` comments, yields
/// (1-based line number, trimmed text).
fn significant<'a>(lines: &[&'a str], idx: &mut usize) -> Option<(usize, &'a str)> {
    while *idx < lines.len() {
        let line = lines[*idx];
        *idx += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        return Some((*idx, trimmed));
    }
    None
}

fn split_lines(input: &str) -> Vec<&str> {
    input.lines().map(|l| l.strip_suffix('\r').unwrap_or(l)).collect()
}

/// Capture the raw lines of a `graph ... endgraph` block, starting at the
/// current position; returns (trimmed body lines, first body line number).
fn capture_graph_body<'a>(
    lines: &[&'a str],
    idx: &mut usize,
) -> Result<(Vec<&'a str>, usize), ScanError> {
    let first_body = *idx + 1;
    let mut body = Vec::new();
    while *idx < lines.len() {
        let raw = lines[*idx];
        *idx += 1;
        if raw.trim() == "endgraph" {
            return Ok((body, first_body));
        }
        body.push(raw.trim());
    }
    Err(ScanError {
        line: lines.len().max(1),
        message: "graph block is not closed (missing endgraph)".into(),
    })
}

pub(super) fn serialize_store(store: &AnnotationStore) -> String {
    let mut out = String::from("pci-store v1\n");
    for asset in store.assets.values() {
        out.push_str(&format!(
            "asset {} {} {}",
            asset.asset_id,
            asset.duration_ms,
            quote(&asset.uri)
        ));
        if !asset.languages.is_empty() {
            let codes: Vec<&str> = asset.languages.iter().map(|l| l.as_str()).collect();
            out.push_str(&format!(" langs={}", codes.join(",")));
        }
        out.push('\n');
    }
    for a in store.annotations.values() {
        out.push_str(&format!(
            "annotation {} {} {} {}\n",
            a.annotation_id, a.segment.asset_id, a.segment.start_ms, a.segment.end_ms
        ));
        for (lang, field) in &a.fields {
            if let Some(title) = &field.title {
                out.push_str(&format!("  field {lang} title {}\n", quote(title)));
            }
            if let Some(summary) = &field.summary {
                out.push_str(&format!("  field {lang} summary {}\n", quote(summary)));
            }
        }
        for keyword in &a.keywords {
            let source = match &keyword.source {
                KeywordSource::Free => "free".to_string(),
                KeywordSource::Controlled(name) => format!("ctrl:{name}"),
            };
            out.push_str(&format!(
                "  keyword {} {} {source} {}\n",
                keyword.language,
                keyword.kind,
                quote(&keyword.text)
            ));
        }
        let mut marks = a.pragmatic_marks.clone();
        marks.sort();
        marks.dedup();
        for mark in marks {
            out.push_str(&format!("  mark {mark}\n"));
        }
        out.push_str(&format!("  graph {}\n", a.graph.kind));
        let mut body = String::new();
        a.graph.write_body(&mut body);
        for line in body.lines() {
            out.push_str("    ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("  endgraph\n");
    }
    out
}

pub(super) fn parse_store(input: &str) -> Result<AnnotationStore, StoreError> {
    let lines = split_lines(input);
    let mut idx = 0;

    let Some((line_no, header)) = significant(&lines, &mut idx) else {
        return Err(StoreError::Syntax { line: 1, message: "missing pci-store v1 header".into() });
    };
    if header != "pci-store v1" {
        return Err(StoreError::Syntax {
            line: line_no,
            message: format!("expected the pci-store v1 header, found {header:?}"),
        });
    }

    let mut store = AnnotationStore::new();
    let mut pending = significant(&lines, &mut idx);
    while let Some((line_no, line)) = pending {
        let mut scan = Scan::new(line, line_no);
        match scan.word()? {
            "asset" => {
                let asset = parse_asset_line(&mut scan)?;
                store.add_asset(asset)?;
                pending = significant(&lines, &mut idx);
            }
            "annotation" => {
                let (annotation, next) = parse_annotation_block(&mut scan, &lines, &mut idx)?;
                if store.annotations.contains_key(&annotation.annotation_id) {
                    return Err(StoreError::DuplicateAnnotation(annotation.annotation_id));
                }
                let Some(asset) = store.assets.get(&annotation.segment.asset_id) else {
                    return Err(StoreError::UnknownAsset(annotation.segment.asset_id.clone()));
                };
                super::check_segment(&annotation.segment, asset)?;
                store.annotations.insert(annotation.annotation_id.clone(), annotation);
                pending = next;
            }
            other => {
                return Err(StoreError::Syntax {
                    line: line_no,
                    message: format!("expected an asset or annotation line, found {other:?}"),
                });
            }
        }
    }
    Ok(store)
}

fn parse_asset_line(scan: &mut Scan) -> Result<MediaAsset, ScanError> {
    let id = scan.word()?;
    if !valid_id(id) {
        return Err(scan.fail(format!("asset identifier {id:?} is not valid")));
    }
    let duration_ms = scan.number()?;
    if duration_ms == 0 {
        return Err(scan.fail("asset duration must be positive"));
    }
    let uri = scan.quoted()?;
    let mut asset =
        MediaAsset { asset_id: id.to_string(), uri, duration_ms, languages: Vec::new() };
    if !scan.at_end() {
        let word = scan.word()?;
        let Some(list) = word.strip_prefix("langs=") else {
            return Err(scan.fail(format!("expected langs=..., found {word:?}")));
        };
        for code in list.split(',') {
            let lang = Lang::new(code)
                .ok_or_else(|| scan.fail(format!("bad language code {code:?} in langs= list")))?;
            asset.languages.push(lang);
        }
    }
    scan.end()?;
    Ok(asset)
}

/// A parsed annotation plus the lookahead line (number and text) that ended
/// the block, if any.
type AnnotationAndLookahead<'a> = (SegmentAnnotation, Option<(usize, &'a str)>);

/// Parse the body of one annotation block; `scan` holds the header line
/// after the `annotation` keyword. Returns the annotation and the first
/// significant line that does not belong to the block.
fn parse_annotation_block<'a>(
    scan: &mut Scan,
    lines: &[&'a str],
    idx: &mut usize,
) -> Result<AnnotationAndLookahead<'a>, StoreError> {
    let header_line = scan.line_no;
    let id = scan.word()?;
    if !valid_id(id) {
        return Err(StoreError::Syntax {
            line: header_line,
            message: format!("annotation identifier {id:?} is not valid"),
        });
    }
    let asset_id = scan.word()?.to_string();
    let start_ms = scan.number()?;
    let end_ms = scan.number()?;
    scan.end()?;

    let mut fields: BTreeMap<Lang, FieldText> = BTreeMap::new();
    let mut keywords = Vec::new();
    let mut marks: Vec<TypeIdentifier> = Vec::new();
    let mut graph: Option<ConceptualGraph> = None;
    let leftover = loop {
        let Some((child_no, child)) = significant(lines, idx) else {
            break None;
        };
        let mut cs = Scan::new(child, child_no);
        match cs.word()? {
            "field" => {
                let lang = cs.lang()?;
                let part = cs.word()?;
                let text = cs.quoted()?;
                cs.end()?;
                let entry = fields.entry(lang).or_default();
                let slot = match part {
                    "title" => &mut entry.title,
                    "summary" => &mut entry.summary,
                    other => {
                        return Err(StoreError::Syntax {
                            line: child_no,
                            message: format!("expected title or summary, found {other:?}"),
                        });
                    }
                };
                if slot.is_some() {
                    return Err(StoreError::Syntax {
                        line: child_no,
                        message: format!("duplicate {part} field for language {lang}"),
                    });
                }
                *slot = Some(text);
            }
            "keyword" => {
                let language = cs.lang()?;
                let kind = KeywordKind::from_str(cs.word()?).map_err(|e| cs.fail(e))?;
                let source_word = cs.word()?;
                let source = if source_word == "free" {
                    KeywordSource::Free
                } else if let Some(name) = source_word.strip_prefix("ctrl:") {
                    if !valid_id(name) {
                        return Err(StoreError::Syntax {
                            line: child_no,
                            message: format!("controlled-vocabulary name {name:?} is not valid"),
                        });
                    }
                    KeywordSource::Controlled(name.to_string())
                } else {
                    return Err(StoreError::Syntax {
                        line: child_no,
                        message: format!("expected free or ctrl:<name>, found {source_word:?}"),
                    });
                };
                let text = nfc(&cs.quoted()?);
                cs.end()?;
                keywords.push(Keyword { text, language, kind, source });
            }
            "mark" => {
                let mark = cs.type_id()?;
                cs.end()?;
                marks.push(mark);
            }
            "graph" => {
                if graph.is_some() {
                    return Err(StoreError::Syntax {
                        line: child_no,
                        message: "annotation has more than one graph block".into(),
                    });
                }
                let kind = GraphKind::from_str(cs.word()?).map_err(|e| cs.fail(e.to_string()))?;
                cs.end()?;
                let (body, first_body) = capture_graph_body(lines, idx)?;
                graph = Some(ConceptualGraph::parse_body_lines(kind, &body, first_body)?);
            }
            _ => break Some((child_no, child)),
        }
    };

    let Some(graph) = graph else {
        return Err(StoreError::Syntax {
            line: header_line,
            message: format!("annotation {id} has no graph block"),
        });
    };
    marks.sort();
    marks.dedup();
    let annotation = SegmentAnnotation {
        annotation_id: id.to_string(),
        segment: Segment { asset_id, start_ms, end_ms },
        fields,
        keywords,
        graph,
        pragmatic_marks: marks,
    };
    Ok((annotation, leftover))
}

pub(super) fn serialize_cv(cv: &ControlledVocabulary) -> String {
    let mut out = format!("cv {}\n", quote(cv.name()));
    if !cv.source_note().is_empty() {
        out.push_str(&format!("note {}\n", quote(cv.source_note())));
    }
    for (term, lang) in cv.entries() {
        out.push_str(&format!("term {lang} {}\n", quote(term)));
    }
    out
}

pub(super) fn parse_cv(input: &str) -> Result<ControlledVocabulary, CvError> {
    let lines = split_lines(input);
    let mut idx = 0;

    let Some((line_no, header)) = significant(&lines, &mut idx) else {
        return Err(CvError::Syntax { line: 1, message: "missing cv header".into() });
    };
    let mut scan = Scan::new(header, line_no);
    let keyword = scan.word()?;
    if keyword != "cv" {
        return Err(CvError::Syntax {
            line: line_no,
            message: format!("expected the cv header, found {keyword:?}"),
        });
    }
    let name = scan.quoted()?;
    scan.end()?;
    let mut cv = ControlledVocabulary::new(&name, "")?;

    while let Some((line_no, line)) = significant(&lines, &mut idx) {
        let mut scan = Scan::new(line, line_no);
        match scan.word()? {
            "note" => {
                let note = scan.quoted()?;
                scan.end()?;
                if !cv.source_note.is_empty() {
                    return Err(CvError::Syntax {
                        line: line_no,
                        message: "duplicate note line".into(),
                    });
                }
                cv.source_note = note;
            }
            "term" => {
                let lang = scan.lang()?;
                let term = scan.quoted()?;
                scan.end()?;
                if term.is_empty() {
                    return Err(CvError::Syntax { line: line_no, message: "term is empty".into() });
                }
                cv.insert(&term, lang);
            }
            other => {
                return Err(CvError::Syntax {
                    line: line_no,
                    message: format!("expected a note or term line, found {other:?}"),
                });
            }
        }
    }
    Ok(cv)
}

pub(super) fn serialize_template(template: &Template) -> String {
    let mut out = format!(
        "template {} {} group={}\n",
        template.template_id,
        quote(&template.name),
        template.group
    );
    for (name, path) in &template.slots {
        out.push_str(&format!("slot {name} {path}\n"));
    }
    out.push_str(&format!("graph {}\n", template.graph.kind));
    template.graph.write_body(&mut out);
    out.push_str("endgraph\n");
    out
}

pub(super) fn parse_template(input: &str) -> Result<Template, TemplateError> {
    let lines = split_lines(input);
    let mut idx = 0;

    let Some((line_no, header)) = significant(&lines, &mut idx) else {
        return Err(TemplateError::Syntax { line: 1, message: "missing template header".into() });
    };
    let mut scan = Scan::new(header, line_no);
    let keyword = scan.word()?;
    if keyword != "template" {
        return Err(TemplateError::Syntax {
            line: line_no,
            message: format!("expected the template header, found {keyword:?}"),
        });
    }
    let template_id = scan.word()?.to_string();
    let name = scan.quoted()?;
    let group_word = scan.word()?;
    let Some(group_key) = group_word.strip_prefix("group=") else {
        return Err(TemplateError::Syntax {
            line: line_no,
            message: format!("expected group=<name>, found {group_word:?}"),
        });
    };
    let group = TemplateGroup::from_str(group_key)
        .map_err(|e| TemplateError::Syntax { line: line_no, message: e })?;
    scan.end()?;

    let mut slots: BTreeMap<String, SlotPath> = BTreeMap::new();
    let mut graph: Option<ConceptualGraph> = None;
    while let Some((line_no, line)) = significant(&lines, &mut idx) {
        let mut scan = Scan::new(line, line_no);
        match scan.word()? {
            "slot" => {
                if graph.is_some() {
                    return Err(TemplateError::Syntax {
                        line: line_no,
                        message: "slot lines must precede the graph block".into(),
                    });
                }
                let slot_name = scan.word()?.to_string();
                let path = SlotPath::from_str(scan.word()?)
                    .map_err(|e| TemplateError::Syntax { line: line_no, message: e.to_string() })?;
                scan.end()?;
                if slots.insert(slot_name.clone(), path).is_some() {
                    return Err(TemplateError::Syntax {
                        line: line_no,
                        message: format!("duplicate slot {slot_name:?}"),
                    });
                }
            }
            "graph" => {
                if graph.is_some() {
                    return Err(TemplateError::Syntax {
                        line: line_no,
                        message: "template has more than one graph block".into(),
                    });
                }
                let kind =
                    GraphKind::from_str(scan.word()?).map_err(|e| scan.fail(e.to_string()))?;
                scan.end()?;
                let (body, first_body) = capture_graph_body(&lines, &mut idx)?;
                graph = Some(ConceptualGraph::parse_body_lines(kind, &body, first_body)?);
            }
            other => {
                return Err(TemplateError::Syntax {
                    line: line_no,
                    message: format!("expected a slot line or graph block, found {other:?}"),
                });
            }
        }
    }
    let Some(graph) = graph else {
        return Err(TemplateError::Syntax {
            line: lines.len().max(1),
            message: "template has no graph block".into(),
        });
    };
    Ok(Template { template_id, name, group, graph, slots })
}
