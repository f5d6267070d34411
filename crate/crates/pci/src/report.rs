//! Severity-tagged findings shared by every validator in the crate.
//!
//! Validation never aborts on the first problem: checkers collect a
//! [`ValidationReport`] and leave the caller to decide whether warnings are
//! acceptable. Reports render one finding per line as
//! `<severity> <subject> <message>`, the shape the command-line binary prints.

use std::fmt;

/// Weight of a finding. `Error` findings make a document unusable;
/// `Warning` findings are advisory and never block loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
            Severity::Warning => write!(f, "warning"),
        }
    }
}

/// One validation or lint finding.
///
/// `subject` names what the finding is about: a type identifier (`T-7`),
/// a node path (`n1/C-1/n2`), an edge (`rel#3`), or `-` when nothing more
/// precise exists (for example a document-level problem).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Finding {
    pub severity: Severity,
    pub subject: String,
    pub message: String,
}

impl Finding {
    pub fn error(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Finding { severity: Severity::Error, subject: subject.into(), message: message.into() }
    }

    pub fn warning(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Finding { severity: Severity::Warning, subject: subject.into(), message: message.into() }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.severity, self.subject, self.message)
    }
}

/// An ordered collection of findings.
///
/// Iteration order is deterministic: findings are sorted on insertion close
/// (errors before warnings, then by subject, then message), so rendering a
/// report is byte-stable across runs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, finding: Finding) {
        self.findings.push(finding);
    }

    pub fn error(&mut self, subject: impl Into<String>, message: impl Into<String>) {
        self.push(Finding::error(subject, message));
    }

    pub fn warning(&mut self, subject: impl Into<String>, message: impl Into<String>) {
        self.push(Finding::warning(subject, message));
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.findings.extend(other.findings);
    }

    /// Sort findings into the canonical rendering order.
    pub fn finish(mut self) -> Self {
        self.findings.sort();
        self
    }

    pub fn findings(&self) -> &[Finding] {
        &self.findings
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Warning)
    }

    pub fn error_count(&self) -> usize {
        self.errors().count()
    }

    pub fn warning_count(&self) -> usize {
        self.warnings().count()
    }

    pub fn has_errors(&self) -> bool {
        self.error_count() > 0
    }

    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Writes one finding per line.
impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            writeln!(f, "{finding}")?;
        }
        Ok(())
    }
}
