//! Batch command-line surface over the library.
//!
//! Every command is a single deterministic process: identical inputs produce
//! byte-identical standard output. Findings print one per line as
//! `<severity> <subject> <message>`; query matches print one per line via
//! [`QueryResult::summary_line`](crate::projection::QueryResult::summary_line).
//!
//! Exit codes: 0 success (warnings allowed), 1 validation findings at Error
//! severity, 2 usage, I/O, or syntax errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::annotation::{
    instantiate_template, load_store, save_store, AnnotationStore, CvCatalog, Filler,
};
use crate::graph::{ConceptualGraph, Lang};
use crate::pci_data::{self, BundledData};
use crate::projection::answer_query;
use crate::report::ValidationReport;
use crate::vocabulary::{Vocabulary, VocabularyBuilder};

#[derive(Parser)]
#[command(
    name = "pci",
    version,
    about = "Vocabulary, conceptual graphs, and segment annotation for audiovisual archives",
    after_help = "Exit codes: 0 success, 1 Error-severity findings, 2 usage/IO/syntax errors.\n\
                  PCI_DATA_DIR overrides the bundled data directory."
)]
pub struct Cli {
    /// Vocabulary document; the bundled vocabulary when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    vocab: Option<PathBuf>,

    /// Annotation store file (required by ingest, query, and catalog).
    #[arg(long, global = true, value_name = "PATH")]
    store: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a vocabulary document and print every finding.
    Validate,
    /// Style-lint the vocabulary's labels (warnings only).
    Lint,
    /// Check a conceptual graph file against the vocabulary.
    GraphCheck {
        /// Graph document to check.
        #[arg(value_name = "GRAPH")]
        graph: PathBuf,
    },
    /// Merge self-contained annotation files into the store.
    ///
    /// Each file is a store document declaring the assets it references;
    /// an asset already in the store must be re-declared identically.
    /// The store is rewritten only if every record passes validation.
    Ingest {
        /// Annotation files to merge, in order.
        #[arg(value_name = "FILE", required = true)]
        files: Vec<PathBuf>,
    },
    /// Project a query graph into every annotation in the store.
    Query {
        /// Query graph document.
        #[arg(value_name = "QUERY")]
        query: PathBuf,
        /// Also print every projection mapping under its match line.
        #[arg(long)]
        explain: bool,
    },
    /// Fill a bundled template's slots and print the resulting graph.
    Instantiate {
        /// Template identifier (see `catalog` for the bundled four).
        #[arg(value_name = "TEMPLATE")]
        template: String,
        /// Slot filler `slot=keyword[@lang][!vocabulary]`; repeatable.
        #[arg(long = "fill", value_name = "SLOT=VALUE")]
        fills: Vec<String>,
    },
    /// Summarize the store by discourse-topic group and world theme.
    Catalog,
}

/// Parse the process arguments, run the selected command, and fold the
/// outcome into the exit-code contract.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, String> {
    match &cli.command {
        Command::Validate => cmd_validate(cli),
        Command::Lint => cmd_lint(cli),
        Command::GraphCheck { graph } => cmd_graph_check(cli, graph),
        Command::Ingest { files } => cmd_ingest(cli, files),
        Command::Query { query, explain } => cmd_query(cli, query, *explain),
        Command::Instantiate { template, fills } => cmd_instantiate(template, fills),
        Command::Catalog => cmd_catalog(cli),
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn bundled() -> Result<BundledData, String> {
    pci_data::load_bundled().map_err(|e| e.to_string())
}

/// The working vocabulary: `--vocab` when given, the bundled one otherwise.
fn vocabulary(cli: &Cli) -> Result<Vocabulary, String> {
    match &cli.vocab {
        Some(path) => {
            Vocabulary::parse(&read_file(path)?).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => Ok(bundled()?.vocabulary),
    }
}

fn store_path(cli: &Cli) -> Result<&PathBuf, String> {
    cli.store.as_ref().ok_or_else(|| "this command needs --store <PATH>".to_string())
}

/// Print a report and convert it to an exit code.
fn finish(report: &ValidationReport) -> u8 {
    for finding in report.findings() {
        println!("{finding}");
    }
    if report.has_errors() {
        1
    } else {
        0
    }
}

fn cmd_validate(cli: &Cli) -> Result<u8, String> {
    let report = match &cli.vocab {
        Some(path) => {
            let builder = VocabularyBuilder::parse(&read_file(path)?)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            builder.validate()
        }
        None => bundled()?.vocabulary.validate(),
    };
    Ok(finish(&report))
}

fn cmd_lint(cli: &Cli) -> Result<u8, String> {
    match &cli.vocab {
        Some(path) => {
            let builder = VocabularyBuilder::parse(&read_file(path)?)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            let report = builder.validate();
            if report.has_errors() {
                return Ok(finish(&report));
            }
            let vocabulary = builder.build().map_err(|e| e.to_string())?;
            Ok(finish(&vocabulary.lint_labels()))
        }
        None => Ok(finish(&bundled()?.vocabulary.lint_labels())),
    }
}

fn cmd_graph_check(cli: &Cli, path: &Path) -> Result<u8, String> {
    let vocabulary = vocabulary(cli)?;
    let graph = ConceptualGraph::parse(&read_file(path)?)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(finish(&graph.check_well_formed(&vocabulary)))
}

fn catalog_of(data: &BundledData) -> Result<CvCatalog, String> {
    let mut catalog = CvCatalog::new();
    for cv in &data.controlled {
        catalog.add(cv.clone()).map_err(|e| e.to_string())?;
    }
    Ok(catalog)
}

fn cmd_ingest(cli: &Cli, files: &[PathBuf]) -> Result<u8, String> {
    let data = bundled()?;
    let vocabulary = match &cli.vocab {
        Some(path) => {
            Vocabulary::parse(&read_file(path)?).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => data.vocabulary.clone(),
    };
    let catalog = catalog_of(&data)?;
    let path = store_path(cli)?;
    let mut store = if path.exists() {
        load_store(path).map_err(|e| format!("{}: {e}", path.display()))?
    } else {
        AnnotationStore::new()
    };

    let mut report = ValidationReport::new();
    let mut added = 0usize;
    for file in files {
        let incoming = AnnotationStore::parse(&read_file(file)?)
            .map_err(|e| format!("{}: {e}", file.display()))?;
        for asset in incoming.assets() {
            match store.asset(&asset.asset_id) {
                None => store.add_asset(asset.clone()).map_err(|e| e.to_string())?,
                Some(existing) if existing == asset => {}
                Some(_) => report.error(
                    &asset.asset_id,
                    "asset is already in the store with different properties",
                ),
            }
        }
        for annotation in incoming.annotations() {
            match store.add_annotation(annotation.clone(), &vocabulary, &catalog) {
                Ok(_) => added += 1,
                Err(crate::annotation::StoreError::Invalid { report: findings, .. }) => {
                    report.extend(findings);
                }
                Err(e) => report.error(&annotation.annotation_id, e.to_string()),
            }
        }
    }

    let report = report.finish();
    if report.has_errors() {
        // Reject the whole batch: the store file is left untouched.
        return Ok(finish(&report));
    }
    save_store(&store, path).map_err(|e| format!("{}: {e}", path.display()))?;
    println!("ingested {added} annotations, store holds {}", store.annotation_count());
    Ok(0)
}

fn cmd_query(cli: &Cli, query_path: &Path, explain: bool) -> Result<u8, String> {
    let vocabulary = vocabulary(cli)?;
    let path = store_path(cli)?;
    let store = load_store(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let query = ConceptualGraph::parse(&read_file(query_path)?)
        .map_err(|e| format!("{}: {e}", query_path.display()))?;

    match answer_query(&query, &store, &vocabulary) {
        Ok(results) => {
            for result in results {
                println!("{}", result.summary_line());
                if explain {
                    for mapping in &result.mappings {
                        println!("  {mapping}");
                    }
                }
            }
            Ok(0)
        }
        Err(e) => {
            println!("error - {e}");
            Ok(1)
        }
    }
}

fn cmd_instantiate(template_id: &str, fills: &[String]) -> Result<u8, String> {
    let data = bundled()?;
    let catalog = catalog_of(&data)?;
    let template =
        data.templates.iter().find(|t| t.template_id == template_id).ok_or_else(|| {
            let known: Vec<&str> = data.templates.iter().map(|t| t.template_id.as_str()).collect();
            format!("unknown template {template_id}; bundled: {}", known.join(", "))
        })?;

    let mut fillers = BTreeMap::new();
    for fill in fills {
        let (slot, filler) = parse_fill(fill)?;
        if fillers.insert(slot.clone(), filler).is_some() {
            return Err(format!("slot {slot} is filled twice"));
        }
    }
    let graph = instantiate_template(template, &fillers, &catalog).map_err(|e| e.to_string())?;
    print!("{}", graph.serialize());
    Ok(0)
}

/// `slot=keyword[@lang][!vocabulary]`. The `!` and `@` markers are scanned
/// from the right, so a keyword may itself contain either character as long
/// as the tags are present.
fn parse_fill(text: &str) -> Result<(String, Filler), String> {
    let (slot, mut value) =
        text.split_once('=').ok_or_else(|| format!("fill {text} is not of the form slot=value"))?;
    if slot.is_empty() {
        return Err(format!("fill {text} has an empty slot name"));
    }
    let mut vocabulary = None;
    if let Some((head, cv)) = value.rsplit_once('!') {
        vocabulary = Some(cv.to_string());
        value = head;
    }
    let mut language = None;
    if let Some((head, tag)) = value.rsplit_once('@') {
        language = Some(Lang::new(tag).ok_or_else(|| format!("{tag} is not a language code"))?);
        value = head;
    }
    let filler = match (vocabulary, language) {
        (Some(cv), language) => Filler::controlled(value, language, &cv),
        (None, Some(language)) => Filler::tagged(value, language),
        (None, None) => Filler::free(value),
    };
    Ok((slot.to_string(), filler))
}

fn cmd_catalog(cli: &Cli) -> Result<u8, String> {
    let data = bundled()?;
    let vocabulary = match &cli.vocab {
        Some(path) => {
            Vocabulary::parse(&read_file(path)?).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => data.vocabulary.clone(),
    };
    let path = store_path(cli)?;
    let store = load_store(path).map_err(|e| format!("{}: {e}", path.display()))?;

    let summary = crate::annotation::catalog(&store, &vocabulary, &data.templates);
    println!("total {}", summary.total);
    for (group, count) in &summary.groups {
        println!("group {} {count}", group.keyword());
    }
    for (id, label, count) in &summary.themes {
        println!("theme {id} {} {count}", crate::graph::quote(label));
    }
    Ok(0)
}
