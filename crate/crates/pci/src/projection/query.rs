//! Query answering over an annotation store: project a query graph into
//! every stored annotation and rank the matches.

use crate::annotation::AnnotationStore;
use crate::graph::ConceptualGraph;
use crate::vocabulary::Vocabulary;

use super::{project, ProjectionError, ProjectionMapping};

/// One matching annotation with all its projection mappings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub annotation_id: String,
    pub asset_id: String,
    pub start_ms: u64,
    pub end_ms: u64,
    pub mappings: Vec<ProjectionMapping>,
}

impl QueryResult {
    pub fn match_count(&self) -> usize {
        self.mappings.len()
    }

    /// The canonical one-line rendering of this match.
    pub fn summary_line(&self) -> String {
        format!(
            "match {} {} {}-{} count={}",
            self.annotation_id,
            self.asset_id,
            self.start_ms,
            self.end_ms,
            self.mappings.len()
        )
    }
}

/// All annotations the query projects into, ordered by descending match
/// count, then ascending annotation id. Evaluation is sequential, so the
/// result order is deterministic by construction.
pub fn answer_query(
    query: &ConceptualGraph,
    store: &AnnotationStore,
    vocabulary: &Vocabulary,
) -> Result<Vec<QueryResult>, ProjectionError> {
    let mut results = Vec::new();
    for annotation in store.annotations() {
        let mappings = project(query, &annotation.graph, vocabulary)?;
        if mappings.is_empty() {
            continue;
        }
        results.push(QueryResult {
            annotation_id: annotation.annotation_id.clone(),
            asset_id: annotation.segment.asset_id.clone(),
            start_ms: annotation.segment.start_ms,
            end_ms: annotation.segment.end_ms,
            mappings,
        });
    }
    results.sort_by(|a, b| {
        b.mappings.len().cmp(&a.mappings.len()).then_with(|| a.annotation_id.cmp(&b.annotation_id))
    });
    Ok(results)
}
