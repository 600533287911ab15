//! Index construction: chunk documents, embed chunks and demonstration
//! questions, attach metadata.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::{chunk_document, embed, EmbeddingProvider, KbError, SourceDocument, Theme};

/// Retrieval metadata carried by every chunk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkMetadata {
    pub doc_id: String,
    pub theme: Theme,
    pub data_type: String,
    pub task_type: String,
}

/// Embedded text fragment of the knowledge base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeChunk<T> {
    pub chunk_id: String,
    pub text: String,
    pub embedding: Vec<T>,
    pub metadata: ChunkMetadata,
}

/// Worked example: question, optional step-by-step analysis, final answer.
/// `label` is empty for regression demonstrations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Demonstration {
    pub demo_id: String,
    pub task_type: String,
    #[serde(default)]
    pub label: String,
    pub question: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<String>,
    pub answer: String,
}

/// Demonstration plus the embedding of its question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedDemonstration<T> {
    #[serde(flatten)]
    pub demo: Demonstration,
    pub embedding: Vec<T>,
}

/// Immutable knowledge/demonstration index. All embeddings share one
/// dimension and were produced by the embedder named in `embedder_id`.
#[derive(Debug, Clone, PartialEq)]
pub struct KbIndex<T> {
    pub chunks: Vec<KnowledgeChunk<T>>,
    pub demos: Vec<EmbeddedDemonstration<T>>,
    pub embedder_id: String,
    pub dimension: usize,
}

/// Sentences per chunk used throughout the pipeline.
pub const SENTENCES_PER_CHUNK: usize = 2;

/// Chunks every document, embeds all chunk texts and demonstration
/// questions, and assembles the index. Chunk ids are `doc_id:ordinal` so
/// re-ingestion is idempotent. Demonstrations may be empty.
pub fn build_index<T: Real>(
    docs: &[SourceDocument],
    demos: &[Demonstration],
    provider: &dyn EmbeddingProvider<T>,
) -> Result<KbIndex<T>, KbError> {
    let mut seen_docs = HashSet::new();
    for doc in docs {
        if !seen_docs.insert(doc.doc_id.as_str()) {
            return Err(KbError::DuplicateDocId(doc.doc_id.clone()));
        }
    }
    let mut seen_demos = HashSet::new();
    for demo in demos {
        if !seen_demos.insert(demo.demo_id.as_str()) {
            return Err(KbError::DuplicateDemoId(demo.demo_id.clone()));
        }
    }

    let mut chunks = Vec::new();
    for doc in docs {
        for (ordinal, text) in chunk_document(doc, SENTENCES_PER_CHUNK)?.into_iter().enumerate() {
            chunks.push(KnowledgeChunk {
                chunk_id: format!("{}:{}", doc.doc_id, ordinal),
                text,
                embedding: Vec::new(),
                metadata: ChunkMetadata {
                    doc_id: doc.doc_id.clone(),
                    theme: doc.theme,
                    data_type: doc.data_type.clone(),
                    task_type: doc.task_type.clone(),
                },
            });
        }
    }

    let chunk_texts: Vec<&str> = chunks.iter().map(|c| c.text.as_str()).collect();
    let chunk_vectors = embed(&chunk_texts, provider)?;
    for (chunk, vector) in chunks.iter_mut().zip(chunk_vectors) {
        chunk.embedding = vector;
    }

    let demo_questions: Vec<&str> = demos.iter().map(|d| d.question.as_str()).collect();
    let demo_vectors = embed(&demo_questions, provider)?;
    let demos = demos
        .iter()
        .cloned()
        .zip(demo_vectors)
        .map(|(demo, embedding)| EmbeddedDemonstration { demo, embedding })
        .collect();

    Ok(KbIndex {
        chunks,
        demos,
        embedder_id: provider.id().to_string(),
        dimension: provider.dimension(),
    })
}
