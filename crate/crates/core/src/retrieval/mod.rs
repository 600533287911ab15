//! Hybrid retrieval over the knowledge base: BM25 keyword scoring, dense
//! cosine scoring, reciprocal-rank fusion, metadata filtering, and
//! demonstration selection.

mod bm25;
mod demos;
mod fuse;

pub use bm25::bm25_scores;
pub use demos::retrieve_demonstrations;
pub use fuse::{rrf_fuse, RemoteReranker, Reranker, RrfReranker};

use serde::{Deserialize, Serialize};

use crate::kb::{cosine_similarity, embed, EmbeddingProvider, KbError, KbIndex, KnowledgeChunk};
use crate::scalar::Real;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("invalid retrieval config: {0}")]
    InvalidConfig(String),
    #[error("index was embedded with {index_id:?} but the query provider is {provider_id:?}")]
    EmbedderMismatch {
        index_id: String,
        provider_id: String,
    },
    #[error("no demonstration available for label {0:?}")]
    MissingDemonstration(String),
    #[error("re-ranker failed: {0}")]
    Reranker(String),
    #[error(transparent)]
    Kb(#[from] KbError),
}

/// Retrieval knobs. `n_per_retriever` results are taken from each retriever
/// (2n candidates total) before fusion keeps `top_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetrievalConfig {
    pub n_per_retriever: usize,
    pub top_m: usize,
    pub rrf_k: usize,
    pub bm25_k1: f64,
    pub bm25_b: f64,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            n_per_retriever: 4,
            top_m: 3,
            rrf_k: 60,
            bm25_k1: 1.2,
            bm25_b: 0.75,
        }
    }
}

impl RetrievalConfig {
    pub fn validate(&self) -> Result<(), RetrievalError> {
        if self.n_per_retriever == 0 || self.top_m == 0 || self.rrf_k == 0 {
            return Err(RetrievalError::InvalidConfig(
                "n_per_retriever, top_m and rrf_k must be positive".into(),
            ));
        }
        if !(self.bm25_k1 > 0.0) || !(self.bm25_b > 0.0) {
            return Err(RetrievalError::InvalidConfig(
                "bm25_k1 and bm25_b must be positive".into(),
            ));
        }
        if self.top_m > 2 * self.n_per_retriever {
            return Err(RetrievalError::InvalidConfig(format!(
                "top_m ({}) must be <= 2 * n_per_retriever ({})",
                self.top_m, self.n_per_retriever
            )));
        }
        Ok(())
    }
}

/// Metadata restriction; fields that are set must match the chunk exactly.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetadataFilter {
    pub data_type: Option<String>,
    pub task_type: Option<String>,
}

impl MetadataFilter {
    pub fn data_type(value: impl Into<String>) -> Self {
        Self {
            data_type: Some(value.into()),
            task_type: None,
        }
    }

    pub fn matches<T>(&self, chunk: &KnowledgeChunk<T>) -> bool {
        if let Some(dt) = &self.data_type {
            if &chunk.metadata.data_type != dt {
                return false;
            }
        }
        if let Some(tt) = &self.task_type {
            if &chunk.metadata.task_type != tt {
                return false;
            }
        }
        true
    }
}

/// Retrieval query: the concatenated data and task descriptions, plus an
/// optional metadata filter.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub text: String,
    pub filter: Option<MetadataFilter>,
}

impl Query {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            filter: None,
        }
    }

    pub fn with_filter(text: impl Into<String>, filter: MetadataFilter) -> Self {
        Self {
            text: text.into(),
            filter: Some(filter),
        }
    }
}

/// Which retriever produced a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreSource {
    Sparse,
    Dense,
    Fused,
}

/// One retrieval hit. Result lists are sorted by descending score with ties
/// broken by ascending chunk id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredChunk<T> {
    pub chunk_id: String,
    pub score: T,
    pub source: ScoreSource,
}

fn filtered<'a, T>(index: &'a KbIndex<T>, query: &Query) -> Vec<&'a KnowledgeChunk<T>> {
    index
        .chunks
        .iter()
        .filter(|c| query.filter.as_ref().map_or(true, |f| f.matches(c)))
        .collect()
}

/// Sorts by descending score, ties by ascending chunk id, and keeps `n`.
fn top_n<T: Real>(mut scored: Vec<ScoredChunk<T>>, n: usize) -> Vec<ScoredChunk<T>> {
    scored.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("retrieval scores are never NaN")
            .then_with(|| a.chunk_id.cmp(&b.chunk_id))
    });
    scored.truncate(n);
    scored
}

/// BM25 keyword retrieval over the filtered chunks. Corpus statistics (df,
/// average length) are computed on the filtered subset. Chunks that match
/// no query term score zero and are dropped.
pub fn sparse_retrieve<T: Real>(
    index: &KbIndex<T>,
    query: &Query,
    n: usize,
    cfg: &RetrievalConfig,
) -> Result<Vec<ScoredChunk<T>>, RetrievalError> {
    cfg.validate()?;
    let candidates = filtered(index, query);
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    let texts: Vec<&str> = candidates.iter().map(|c| c.text.as_str()).collect();
    let scores = bm25_scores::<T>(&texts, &query.text, cfg.bm25_k1, cfg.bm25_b);
    let scored = candidates
        .iter()
        .zip(scores)
        .filter(|(_, s)| *s > T::zero())
        .map(|(c, score)| ScoredChunk {
            chunk_id: c.chunk_id.clone(),
            score,
            source: ScoreSource::Sparse,
        })
        .collect();
    Ok(top_n(scored, n))
}

/// Dense retrieval: embeds the query with the index's embedder and ranks
/// the filtered chunks by cosine similarity.
pub fn dense_retrieve<T: Real>(
    index: &KbIndex<T>,
    query: &Query,
    n: usize,
    provider: &dyn EmbeddingProvider<T>,
) -> Result<Vec<ScoredChunk<T>>, RetrievalError> {
    if provider.id() != index.embedder_id {
        return Err(RetrievalError::EmbedderMismatch {
            index_id: index.embedder_id.clone(),
            provider_id: provider.id().to_string(),
        });
    }
    let query_vec = embed(&[query.text.as_str()], provider)?
        .pop()
        .expect("one vector per text");
    let scored = filtered(index, query)
        .into_iter()
        .map(|c| ScoredChunk {
            chunk_id: c.chunk_id.clone(),
            score: cosine_similarity(&query_vec, &c.embedding),
            source: ScoreSource::Dense,
        })
        .collect();
    Ok(top_n(scored, n))
}

/// Hybrid retrieval: `n_per_retriever` hits from each of the sparse and
/// dense retrievers, deduplicated and re-ranked by reciprocal rank fusion,
/// keeping `top_m`.
pub fn hybrid_retrieve<T: Real>(
    index: &KbIndex<T>,
    query: &Query,
    cfg: &RetrievalConfig,
    provider: &dyn EmbeddingProvider<T>,
) -> Result<Vec<ScoredChunk<T>>, RetrievalError> {
    cfg.validate()?;
    let sparse = sparse_retrieve(index, query, cfg.n_per_retriever, cfg)?;
    let dense = dense_retrieve(index, query, cfg.n_per_retriever, provider)?;
    Ok(rrf_fuse(&[sparse, dense], cfg.rrf_k, cfg.top_m))
}

/// Chunk texts for a fused result list, in result order.
pub fn chunk_texts<'a, T>(index: &'a KbIndex<T>, results: &[ScoredChunk<T>]) -> Vec<&'a str> {
    results
        .iter()
        .filter_map(|r| {
            index
                .chunks
                .iter()
                .find(|c| c.chunk_id == r.chunk_id)
                .map(|c| c.text.as_str())
        })
        .collect()
}
