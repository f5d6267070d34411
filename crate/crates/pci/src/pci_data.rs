//! Bundled data: the frozen theme/relation vocabulary, the four
//! discourse-topic group templates, and two controlled-vocabulary excerpts.
//!
//! The files are embedded in the binary and verified against a checksum
//! manifest before parsing. Setting the `PCI_DATA_DIR` environment variable
//! redirects every read (manifest included) to that directory, so a curated
//! fork of the data can be trialled without rebuilding; the fork must ship
//! its own manifest.
//!
//! Loading is read-only and single-threaded; the returned data is immutable.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::annotation::{ControlledVocabulary, CvError, Template, TemplateError, TemplateGroup};
use crate::report::ValidationReport;
use crate::vocabulary::{TypeIdentifier, VocabError, Vocabulary};

/// Environment variable naming an alternative data directory.
pub const DATA_DIR_ENV: &str = "PCI_DATA_DIR";
/// Checksum manifest file name: `<sha256 hex>  <file name>` per line.
pub const MANIFEST_NAME: &str = "manifest.sha256";

const VOCABULARY_FILE: &str = "vocabulary.pci";
const TEMPLATE_FILES: [&str; 4] = [
    "essentials.tmpl",
    "intangible-heritage.tmpl",
    "practical-knowledge.tmpl",
    "cultural-identity.tmpl",
];
const CV_FILES: [&str; 2] = ["iso639_2.cv", "peoples.cv"];

const EMBEDDED: [(&str, &str); 8] = [
    (MANIFEST_NAME, include_str!("../data/manifest.sha256")),
    (VOCABULARY_FILE, include_str!("../data/vocabulary.pci")),
    ("essentials.tmpl", include_str!("../data/essentials.tmpl")),
    ("intangible-heritage.tmpl", include_str!("../data/intangible-heritage.tmpl")),
    ("practical-knowledge.tmpl", include_str!("../data/practical-knowledge.tmpl")),
    ("cultural-identity.tmpl", include_str!("../data/cultural-identity.tmpl")),
    ("iso639_2.cv", include_str!("../data/iso639_2.cv")),
    ("peoples.cv", include_str!("../data/peoples.cv")),
];

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read data file {name}: {source}")]
    Io {
        name: String,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: expected `<sha256 hex>  <file name>`")]
    BadManifest { line: usize },
    #[error("data file {0} has no manifest entry")]
    Unlisted(String),
    #[error("data file {0} does not match its manifest checksum")]
    Corrupt(String),
    #[error("in {name}: {source}")]
    Vocabulary {
        name: String,
        #[source]
        source: VocabError,
    },
    #[error("in {name}: {source}")]
    Template {
        name: String,
        #[source]
        source: TemplateError,
    },
    #[error("in {name}: {source}")]
    ControlledVocabulary {
        name: String,
        #[source]
        source: CvError,
    },
    #[error("bundled data failed validation\n{0}")]
    Invalid(ValidationReport),
}

/// One data file as listed by the manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundledFile {
    pub name: String,
    pub sha256: String,
}

/// The manifest, split by role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundledOntology {
    pub vocabulary: BundledFile,
    pub templates: Vec<BundledFile>,
    pub controlled: Vec<BundledFile>,
}

/// Everything `load_bundled` produces, already parsed and cross-checked.
#[derive(Debug, Clone)]
pub struct BundledData {
    pub vocabulary: Vocabulary,
    pub templates: Vec<Template>,
    pub controlled: Vec<ControlledVocabulary>,
}

enum Source {
    Embedded,
    Dir(PathBuf),
}

impl Source {
    fn detect() -> Source {
        match env::var_os(DATA_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Source::Dir(PathBuf::from(dir)),
            _ => Source::Embedded,
        }
    }

    fn read(&self, name: &str) -> Result<String, DataError> {
        match self {
            Source::Embedded => {
                let (_, text) = EMBEDDED
                    .iter()
                    .find(|(n, _)| *n == name)
                    .expect("every bundled file name is embedded");
                Ok((*text).to_string())
            }
            Source::Dir(dir) => fs::read_to_string(dir.join(name))
                .map_err(|source| DataError::Io { name: name.to_string(), source }),
        }
    }
}

fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Parse the manifest into `(name, sha256)` pairs, preserving file order.
fn parse_manifest(text: &str) -> Result<Vec<BundledFile>, DataError> {
    let mut files = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || DataError::BadManifest { line: index + 1 };
        let (sha256, name) = line.split_once(char::is_whitespace).ok_or_else(bad)?;
        let name = name.trim();
        let is_hex = sha256.len() == 64 && sha256.bytes().all(|b| b.is_ascii_hexdigit());
        if !is_hex || name.is_empty() {
            return Err(bad());
        }
        files.push(BundledFile { name: name.to_string(), sha256: sha256.to_lowercase() });
    }
    Ok(files)
}

/// Read a data file and verify it against the manifest.
fn read_verified(
    source: &Source,
    manifest: &[BundledFile],
    name: &str,
) -> Result<String, DataError> {
    let entry = manifest
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| DataError::Unlisted(name.to_string()))?;
    let text = source.read(name)?;
    if sha256_hex(&text) != entry.sha256 {
        return Err(DataError::Corrupt(name.to_string()));
    }
    Ok(text)
}

/// The checksum manifest of the active data source (embedded files, or the
/// `PCI_DATA_DIR` directory when set).
pub fn manifest() -> Result<BundledOntology, DataError> {
    let source = Source::detect();
    let files = parse_manifest(&source.read(MANIFEST_NAME)?)?;
    let find = |name: &str| {
        files
            .iter()
            .find(|f| f.name == name)
            .cloned()
            .ok_or_else(|| DataError::Unlisted(name.to_string()))
    };
    Ok(BundledOntology {
        vocabulary: find(VOCABULARY_FILE)?,
        templates: TEMPLATE_FILES.iter().map(|n| find(n)).collect::<Result<_, _>>()?,
        controlled: CV_FILES.iter().map(|n| find(n)).collect::<Result<_, _>>()?,
    })
}

/// Load and cross-check the bundled vocabulary, templates, and controlled
/// vocabularies. Every file is checksum-verified first; the parsed data is
/// then gated on [`verify_structure`] and [`verify_templates`] so a build
/// can never ship drifted data.
pub fn load_bundled() -> Result<BundledData, DataError> {
    load(&Source::detect())
}

/// Like [`load_bundled`], but read from an explicit directory instead of
/// the environment-selected source.
pub fn load_from_dir(dir: &Path) -> Result<BundledData, DataError> {
    load(&Source::Dir(dir.to_path_buf()))
}

fn load(source: &Source) -> Result<BundledData, DataError> {
    let manifest = parse_manifest(&source.read(MANIFEST_NAME)?)?;

    let text = read_verified(source, &manifest, VOCABULARY_FILE)?;
    let vocabulary = Vocabulary::parse(&text)
        .map_err(|source| DataError::Vocabulary { name: VOCABULARY_FILE.to_string(), source })?;

    let mut templates = Vec::new();
    for name in TEMPLATE_FILES {
        let text = read_verified(source, &manifest, name)?;
        templates.push(
            Template::parse(&text)
                .map_err(|source| DataError::Template { name: name.to_string(), source })?,
        );
    }

    let mut controlled = Vec::new();
    for name in CV_FILES {
        let text = read_verified(source, &manifest, name)?;
        controlled.push(ControlledVocabulary::parse(&text).map_err(|source| {
            DataError::ControlledVocabulary { name: name.to_string(), source }
        })?);
    }

    let mut report = verify_structure(&vocabulary);
    report.extend(verify_templates(&templates, &vocabulary));
    let report = report.finish();
    if report.has_errors() {
        return Err(DataError::Invalid(report));
    }
    Ok(BundledData { vocabulary, templates, controlled })
}

/// Regression guard over the frozen hierarchy: checks every structural
/// count and containment the rest of the crate relies on, and reports any
/// drift as findings. The bundled vocabulary yields an empty report.
pub fn verify_structure(v: &Vocabulary) -> ValidationReport {
    let mut report = ValidationReport::new();

    let concept_children = |id: TypeIdentifier| -> Vec<&str> {
        v.concepts().filter(|c| c.parents.contains(&id)).map(|c| c.label.as_str()).collect()
    };
    let by_label = |label: &str| v.concept_by_label(label).map(|c| c.id);

    let mut check_count = |label: &str, expected: usize| {
        let Some(id) = by_label(label) else {
            report.error("-", format!("no theme is labelled {label}"));
            return;
        };
        let n = concept_children(id).len();
        if n != expected {
            report.error(id.to_string(), format!("{label} has {n} children, expected {expected}"));
        }
    };
    check_count(v.root_label(), 3);
    check_count("Discourse Description", 5);
    check_count("World_PCI", 13);

    let mut check_contains = |parent: &str, children: &[&str]| {
        let Some(id) = by_label(parent) else {
            report.error("-", format!("no theme is labelled {parent}"));
            return;
        };
        let present = concept_children(id);
        for child in children {
            if !present.contains(child) {
                report.error(id.to_string(), format!("{parent} lacks the child {child}"));
            }
        }
    };
    check_contains("Actor", &["Social Group"]);
    check_contains("Social Group", &["Minority", "Indigenous People"]);
    check_contains("Discourse Type", &["Discourse Act", "Discourse Genre"]);
    check_contains("Discourse Genre", &["Summary", "Interview", "Chronology", "Portrait"]);

    let relation_children =
        |id: TypeIdentifier| -> usize { v.relations().filter(|r| r.parents.contains(&id)).count() };
    match v.relations().find(|r| r.parents.is_empty()) {
        None => report.error("-", "no relation root is declared"),
        Some(root) => {
            let n = relation_children(root.id);
            if n != 3 {
                report.error(
                    root.id.to_string(),
                    format!("relation root {} has {n} children, expected 3", root.label),
                );
            }
        }
    }
    let mut check_relation_count = |label: &str, expected: usize| {
        let Some(r) = v.relation_by_label(label) else {
            report.error("-", format!("no relation is labelled {label}"));
            return;
        };
        let n = relation_children(r.id);
        if n != expected {
            report
                .error(r.id.to_string(), format!("{label} has {n} children, expected {expected}"));
        }
    };
    check_relation_count("Situating Relation", 10);
    check_relation_count("Narrative Relation", 2);

    if v.nesting_by_label("Discourse Topic").is_none() {
        report.error("-", "no nesting context is labelled Discourse Topic");
    }
    let extra: Vec<&str> =
        v.nestings().filter(|n| n.label != "Discourse Topic").map(|n| n.label.as_str()).collect();
    if !extra.is_empty() {
        report.warning(
            "-",
            format!(
                "extra nesting contexts beyond Discourse Topic ({}); reserved for future use",
                extra.join(", ")
            ),
        );
    }

    report.finish()
}

/// Check the template catalogue: each template validates, its graph is
/// well-formed, it frames a topic (a Discourse-Type node carrying a
/// Discourse Topic nesting), and the four groups are covered exactly once.
pub fn verify_templates(templates: &[Template], v: &Vocabulary) -> ValidationReport {
    let mut report = ValidationReport::new();

    for t in templates {
        if let Err(e) = t.validate() {
            report.error(&t.template_id, e.to_string());
            continue;
        }
        for f in t.graph.check_well_formed(v).findings() {
            let mut f = f.clone();
            f.subject = format!("{}/{}", t.template_id, f.subject);
            report.push(f);
        }
        if !frames_a_topic(t, v) {
            report.error(
                &t.template_id,
                "template has no Discourse-Type node with a Discourse Topic nesting",
            );
        }
    }

    let mut groups: Vec<TemplateGroup> = templates.iter().map(|t| t.group).collect();
    groups.sort();
    groups.dedup();
    if groups.len() != templates.len() {
        report.error("-", "template groups are not pairwise distinct");
    }
    if groups.len() != TemplateGroup::ALL.len() {
        report.error(
            "-",
            format!(
                "templates cover {} groups, expected {}",
                groups.len(),
                TemplateGroup::ALL.len()
            ),
        );
    }

    report.finish()
}

fn frames_a_topic(t: &Template, v: &Vocabulary) -> bool {
    let (Some(discourse_type), Some(topic)) =
        (v.concept_by_label("Discourse Type"), v.nesting_by_label("Discourse Topic"))
    else {
        return false;
    };
    t.graph.nodes().any(|node| {
        v.subsumes(discourse_type.id, node.concept_type).unwrap_or(false)
            && node.nesting(topic.id).is_some()
    })
}
