//! Extraction of final answers from model responses. The pipeline instructs
//! models to finish with `Answer: <value>`; parsing takes the last such
//! line.

use serde::{Deserialize, Serialize};

/// What the answer line parsed into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerKind {
    Label,
    Coordinates,
    Unparseable,
}

/// Parsed final answer. `label` is set for classification, `x_m`/`y_m` (in
/// meters) for regression; unparseable answers carry neither and count as
/// incorrect downstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedAnswer {
    pub kind: AnswerKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_m: Option<f64>,
    pub raw_answer_line: String,
}

impl ParsedAnswer {
    fn unparseable(raw: impl Into<String>) -> Self {
        Self {
            kind: AnswerKind::Unparseable,
            label: None,
            x_m: None,
            y_m: None,
            raw_answer_line: raw.into(),
        }
    }
}

const MARKER: &str = "answer:";

/// Remainder of the last line containing the `Answer:` marker, plus the
/// whole line.
fn last_answer_line(text: &str) -> Option<(String, String)> {
    text.lines().rev().find_map(|line| {
        let lower = line.to_lowercase();
        lower.find(MARKER).map(|idx| {
            let remainder = line[idx + MARKER.len()..].trim().to_string();
            (remainder, line.to_string())
        })
    })
}

/// Matches the last `Answer:` line against the allowed labels,
/// case-insensitively: an exact match first, otherwise a label contained as
/// a whole word sequence (longer labels win). No marker or no match yields
/// an unparseable answer; the returned label is always one of
/// `allowed_labels` verbatim.
pub fn parse_classification(text: &str, allowed_labels: &[String]) -> ParsedAnswer {
    assert!(!allowed_labels.is_empty(), "allowed_labels must be non-empty");
    {
        let mut lowered: Vec<String> = allowed_labels.iter().map(|l| l.to_lowercase()).collect();
        lowered.sort();
        lowered.dedup();
        assert_eq!(
            lowered.len(),
            allowed_labels.len(),
            "allowed_labels must be unique case-insensitively"
        );
    }

    let Some((remainder, raw_line)) = last_answer_line(text) else {
        return ParsedAnswer::unparseable("");
    };

    let remainder_words = words(&remainder);
    // Exact match after trimming punctuation.
    for label in allowed_labels {
        if words(label) == remainder_words {
            return ParsedAnswer {
                kind: AnswerKind::Label,
                label: Some(label.clone()),
                x_m: None,
                y_m: None,
                raw_answer_line: raw_line,
            };
        }
    }
    // Whole-word containment; prefer longer (more specific) labels.
    let mut by_length: Vec<&String> = allowed_labels.iter().collect();
    by_length.sort_by_key(|l| std::cmp::Reverse(l.len()));
    for label in by_length {
        if contains_word_sequence(&remainder_words, &words(label)) {
            return ParsedAnswer {
                kind: AnswerKind::Label,
                label: Some(label.clone()),
                x_m: None,
                y_m: None,
                raw_answer_line: raw_line,
            };
        }
    }
    ParsedAnswer::unparseable(raw_line)
}

fn words(text: &str) -> Vec<String> {
    crate::tokenize::tokenize(text)
}

fn contains_word_sequence(haystack: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

/// Parses the last `Answer:` line as `( x , y )` coordinates in meters.
/// Whitespace anywhere around the parentheses, comma, and signs is
/// tolerated; anything else is unparseable.
pub fn parse_regression(text: &str) -> ParsedAnswer {
    let Some((remainder, raw_line)) = last_answer_line(text) else {
        return ParsedAnswer::unparseable("");
    };
    let inner = remainder.trim();
    let Some(inner) = inner.strip_prefix('(') else {
        return ParsedAnswer::unparseable(raw_line);
    };
    let Some(inner) = inner.strip_suffix(')') else {
        return ParsedAnswer::unparseable(raw_line);
    };
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 2 {
        return ParsedAnswer::unparseable(raw_line);
    }
    let parse_real = |s: &str| -> Option<f64> {
        let v: f64 = s.trim().parse().ok()?;
        v.is_finite().then_some(v)
    };
    match (parse_real(parts[0]), parse_real(parts[1])) {
        (Some(x), Some(y)) => ParsedAnswer {
            kind: AnswerKind::Coordinates,
            label: None,
            x_m: Some(x),
            y_m: Some(y),
            raw_answer_line: raw_line,
        },
        _ => ParsedAnswer::unparseable(raw_line),
    }
}
