//! Knowledge and demonstration bases: sentence chunking, embedding, index
//! construction, and JSONL persistence.

mod chunk;
mod embed;
mod index;
mod store;

pub use chunk::{chunk_document, split_sentences, SourceDocument, Theme};
pub use embed::{
    cosine_similarity, embed, hash_embed, l2_normalize, EmbeddingProvider, HashEmbedder,
    RemoteEmbedder,
};
pub use index::{build_index, ChunkMetadata, Demonstration, EmbeddedDemonstration, KbIndex,
                KnowledgeChunk};
pub use store::{load, persist};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("document {0:?} has no sentence content")]
    EmptyText(String),
    #[error("duplicate document id {0:?}")]
    DuplicateDocId(String),
    #[error("duplicate demonstration id {0:?}")]
    DuplicateDemoId(String),
    #[error("embedding dimension must be >= 8, got {0}")]
    DimensionTooSmall(usize),
    #[error("embedding provider failed (retryable): {message}")]
    Provider { message: String },
    #[error("expected embedding dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("chunk {chunk_id:?} embedding norm {norm} is neither zero nor unit")]
    BadNorm { chunk_id: String, norm: f64 },
    #[error("knowledge base not found at {path}")]
    NotFound { path: String },
    #[error("malformed knowledge base file {file}: {reason}")]
    Format { file: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
