//! Sentence detection and fixed-window chunking of source documents.

use serde::{Deserialize, Serialize};

use super::KbError;

/// Thematic category of a knowledge document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theme {
    DataDomainKnowledge,
    TaskDomainKnowledge,
    ExpertUsageInsight,
}

/// One raw document to ingest, tagged with retrieval metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceDocument {
    pub doc_id: String,
    pub text: String,
    pub theme: Theme,
    pub data_type: String,
    pub task_type: String,
}

/// Splits text into sentences. A sentence ends at '.', '!' or '?' followed
/// by whitespace or end of text; anything left after the last terminator is
/// its own sentence. Sentences are trimmed.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    for i in 0..chars.len() {
        let c = chars[i];
        let terminal = c == '.' || c == '!' || c == '?';
        let at_boundary = terminal && chars.get(i + 1).map_or(true, |n| n.is_whitespace());
        if at_boundary {
            let sentence: String = chars[start..=i].iter().collect();
            let sentence = sentence.trim();
            if !sentence.is_empty() {
                sentences.push(sentence.to_string());
            }
            start = i + 1;
        }
    }
    if start < chars.len() {
        let tail: String = chars[start..].iter().collect();
        let tail = tail.trim();
        if !tail.is_empty() {
            sentences.push(tail.to_string());
        }
    }
    sentences
}

/// Groups consecutive sentences into windows of `sentences_per_chunk`,
/// keeping a trailing partial group. Sentences inside a chunk are joined
/// with single spaces.
pub fn chunk_document(
    doc: &SourceDocument,
    sentences_per_chunk: usize,
) -> Result<Vec<String>, KbError> {
    assert!(sentences_per_chunk >= 1, "chunk window must be >= 1");
    let sentences = split_sentences(&doc.text);
    if sentences.is_empty() {
        return Err(KbError::EmptyText(doc.doc_id.clone()));
    }
    Ok(sentences
        .chunks(sentences_per_chunk)
        .map(|group| group.join(" "))
        .collect())
}
