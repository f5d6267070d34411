//! Mechanical style checks for type labels. Every finding is a warning:
//! label style is a naming recommendation, not a structural invariant.
//!
//! Themes and nesting contexts are expected in title case (every alphabetic
//! word capitalized, short function words exempt). Relation labels are
//! expected to open with a present-tense verb; the mechanical proxy accepts
//! a capitalized first token ending in `s` or one of a small modal-verb
//! allowlist. Theme labels ending in a lone `s` are flagged as possibly
//! plural.

use crate::report::ValidationReport;

use super::Vocabulary;

/// Words exempt from the capitalization rule.
const STOP_WORDS: [&str; 9] = ["a", "an", "the", "of", "and", "or", "for", "in", "with"];

/// First tokens accepted as verbs despite not ending in `s`.
const VERB_ALLOWLIST: [&str; 5] = ["Can", "May", "Must", "Shall", "Will"];

pub(super) fn lint_labels(v: &Vocabulary) -> ValidationReport {
    let mut report = ValidationReport::new();

    for c in v.concepts() {
        check_title_case(&mut report, &c.id.to_string(), &c.label);
        check_plural(&mut report, &c.id.to_string(), &c.label);
    }
    for r in v.relations() {
        check_verb_phrase(&mut report, &r.id.to_string(), &r.label);
    }
    for n in v.nestings() {
        check_title_case(&mut report, &n.id.to_string(), &n.label);
    }

    report.finish()
}

/// Alphabetic characters of a token, as a lowercase string.
fn alpha_core_lower(token: &str) -> String {
    token.chars().filter(|c| c.is_alphabetic()).flat_map(char::to_lowercase).collect()
}

fn starts_uppercase(token: &str) -> bool {
    token.chars().find(|c| c.is_alphabetic()).is_some_and(char::is_uppercase)
}

fn check_title_case(report: &mut ValidationReport, subject: &str, label: &str) {
    let offenders: Vec<&str> = label
        .split_whitespace()
        .filter(|word| {
            let core = alpha_core_lower(word);
            if core.is_empty() || STOP_WORDS.contains(&core.as_str()) {
                return false;
            }
            !starts_uppercase(word)
        })
        .collect();
    if !offenders.is_empty() {
        report.warning(
            subject,
            format!(
                "label \"{label}\" is not in title case (uncapitalized: {})",
                offenders.join(", ")
            ),
        );
    }
}

fn check_verb_phrase(report: &mut ValidationReport, subject: &str, label: &str) {
    let Some(first) = label.split_whitespace().next() else {
        return;
    };
    let core = alpha_core_lower(first);
    let verb_like = starts_uppercase(first)
        && (core.ends_with('s') || VERB_ALLOWLIST.iter().any(|v| v.eq_ignore_ascii_case(&core)));
    if !verb_like {
        report.warning(
            subject,
            format!(
                "label \"{label}\" does not open with a present-tense verb \
                 (expected a capitalized first token ending in s, or one of {})",
                VERB_ALLOWLIST.join(", ")
            ),
        );
    }
}

fn check_plural(report: &mut ValidationReport, subject: &str, label: &str) {
    let mut chars = label.chars().rev();
    let last = chars.next();
    let before = chars.next();
    if last == Some('s') && before != Some('s') {
        report.warning(
            subject,
            format!("label \"{label}\" may be plural (themes are named in singular form)"),
        );
    }
}
