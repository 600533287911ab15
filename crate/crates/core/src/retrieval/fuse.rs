//! Re-ranking of candidate lists: reciprocal rank fusion by default, plus
//! an optional remote re-ranking hook behind the same contract.

use std::collections::BTreeMap;
use std::time::Duration;

use crate::scalar::{real, Real};

use super::{RetrievalError, ScoreSource, ScoredChunk};

/// Fuses ranked lists by reciprocal rank: each list contributes
/// `1 / (k + rank)` with rank starting at 1. Duplicated chunk ids are
/// merged; the fused list is sorted by descending score with ties broken by
/// ascending chunk id, truncated to `top_m`.
pub fn rrf_fuse<T: Real>(
    lists: &[Vec<ScoredChunk<T>>],
    k: usize,
    top_m: usize,
) -> Vec<ScoredChunk<T>> {
    let mut fused: BTreeMap<String, T> = BTreeMap::new();
    for list in lists {
        for (position, hit) in list.iter().enumerate() {
            let rank = position + 1;
            let contribution: T = T::one() / real((k + rank) as f64);
            *fused.entry(hit.chunk_id.clone()).or_insert_with(T::zero) += contribution;
        }
    }
    let mut out: Vec<ScoredChunk<T>> = fused
        .into_iter()
        .map(|(chunk_id, score)| ScoredChunk {
            chunk_id,
            score,
            source: ScoreSource::Fused,
        })
        .collect();
    out.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("rrf scores are never NaN")
            .then_with(|| a.chunk_id.cmp(&b.chunk_id))
    });
    out.truncate(top_m);
    out
}

/// Candidates-in, top-m-out re-ranking contract.
pub trait Reranker<T>: Send + Sync {
    fn rerank(
        &self,
        query: &str,
        candidates: &[(String, String)],
        top_m: usize,
    ) -> Result<Vec<ScoredChunk<T>>, RetrievalError>;
}

/// Default deterministic re-ranker; ignores the query text and fuses the
/// candidate order it is given.
pub struct RrfReranker {
    pub k: usize,
}

impl<T: Real> Reranker<T> for RrfReranker {
    fn rerank(
        &self,
        _query: &str,
        candidates: &[(String, String)],
        top_m: usize,
    ) -> Result<Vec<ScoredChunk<T>>, RetrievalError> {
        let list: Vec<ScoredChunk<T>> = candidates
            .iter()
            .map(|(chunk_id, _)| ScoredChunk {
                chunk_id: chunk_id.clone(),
                score: T::zero(),
                source: ScoreSource::Fused,
            })
            .collect();
        Ok(rrf_fuse(&[list], self.k, top_m))
    }
}

/// Remote re-rank hook: POST `{query, documents}` to an endpoint returning
/// `{scores: [...]}` aligned with the documents.
pub struct RemoteReranker {
    base_url: String,
    client: reqwest::blocking::Client,
}

impl RemoteReranker {
    pub fn new(base_url: impl Into<String>, timeout_s: u64) -> Result<Self, RetrievalError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(timeout_s))
            .build()
            .map_err(|e| RetrievalError::Reranker(e.to_string()))?;
        Ok(Self {
            base_url: base_url.into(),
            client,
        })
    }
}

impl<T: Real> Reranker<T> for RemoteReranker {
    fn rerank(
        &self,
        query: &str,
        candidates: &[(String, String)],
        top_m: usize,
    ) -> Result<Vec<ScoredChunk<T>>, RetrievalError> {
        #[derive(serde::Deserialize)]
        struct Response {
            scores: Vec<f64>,
        }
        let documents: Vec<&str> = candidates.iter().map(|(_, text)| text.as_str()).collect();
        let response = self
            .client
            .post(&self.base_url)
            .json(&serde_json::json!({ "query": query, "documents": documents }))
            .send()
            .map_err(|e| RetrievalError::Reranker(e.to_string()))?;
        if !response.status().is_success() {
            return Err(RetrievalError::Reranker(format!(
                "endpoint returned {}",
                response.status()
            )));
        }
        let parsed: Response = response
            .json()
            .map_err(|e| RetrievalError::Reranker(e.to_string()))?;
        if parsed.scores.len() != candidates.len() {
            return Err(RetrievalError::Reranker(format!(
                "{} scores for {} candidates",
                parsed.scores.len(),
                candidates.len()
            )));
        }
        let mut out: Vec<ScoredChunk<T>> = candidates
            .iter()
            .zip(parsed.scores)
            .map(|((chunk_id, _), score)| ScoredChunk {
                chunk_id: chunk_id.clone(),
                score: real(score),
                source: ScoreSource::Fused,
            })
            .collect();
        out.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .expect("reranker scores must not be NaN")
                .then_with(|| a.chunk_id.cmp(&b.chunk_id))
        });
        out.truncate(top_m);
        Ok(out)
    }
}
