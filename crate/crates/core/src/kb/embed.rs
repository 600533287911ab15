//! Embedding providers: a deterministic hashed bag-of-words embedder that
//! keeps the whole suite offline, and an optional remote provider speaking
//! an OpenAI-style embeddings endpoint.

use std::time::Duration;

use crate::digest::fnv1a64;
use crate::scalar::Real;
use crate::tokenize::tokenize;

use super::KbError;

/// Converts text into fixed-dimension vectors. Implementations must be
/// deterministic for a given id.
pub trait EmbeddingProvider<T>: Send + Sync {
    /// Stable identifier recorded in the index; retrieval refuses to mix
    /// embedders with different ids.
    fn id(&self) -> &str;
    fn dimension(&self) -> usize;
    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Vec<T>>, KbError>;
}

/// Embeds each text with the provider and enforces the output contract:
/// one vector per text, provider dimension, unit L2 norm (zero vectors are
/// left alone).
pub fn embed<T: Real>(
    texts: &[&str],
    provider: &dyn EmbeddingProvider<T>,
) -> Result<Vec<Vec<T>>, KbError> {
    let mut vectors = provider.embed_batch(texts)?;
    if vectors.len() != texts.len() {
        return Err(KbError::Provider {
            message: format!(
                "provider {} returned {} vectors for {} texts",
                provider.id(),
                vectors.len(),
                texts.len()
            ),
        });
    }
    for v in &mut vectors {
        if v.len() != provider.dimension() {
            return Err(KbError::DimensionMismatch {
                expected: provider.dimension(),
                got: v.len(),
            });
        }
        l2_normalize(v);
    }
    Ok(vectors)
}

/// Scales a vector to unit L2 norm in place; zero vectors stay zero.
pub fn l2_normalize<T: Real>(v: &mut [T]) {
    let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
    if norm > T::zero() {
        for x in v.iter_mut() {
            *x = *x / norm;
        }
    }
}

/// Cosine similarity; zero if either vector has zero norm.
pub fn cosine_similarity<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let dot = a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>();
    let na = a.iter().map(|&x| x * x).sum::<T>().sqrt();
    let nb = b.iter().map(|&x| x * x).sum::<T>().sqrt();
    if na == T::zero() || nb == T::zero() {
        T::zero()
    } else {
        dot / (na * nb)
    }
}

/// Hashed bag-of-words embedding: tokens are sign-hashed into `dimension`
/// buckets and the term-frequency vector is L2-normalized. Empty token sets
/// yield the zero vector. Requires `dimension >= 8`.
pub fn hash_embed<T: Real>(text: &str, dimension: usize) -> Vec<T> {
    assert!(dimension >= 8, "hash embedding dimension must be >= 8");
    let mut v = vec![T::zero(); dimension];
    for token in tokenize(text) {
        let h = fnv1a64(token.as_bytes());
        let bucket = ((h >> 1) % dimension as u64) as usize;
        let sign = if h & 1 == 0 { T::one() } else { -T::one() };
        v[bucket] += sign;
    }
    l2_normalize(&mut v);
    v
}

/// In-tree deterministic embedder; id encodes scheme and dimension.
#[derive(Debug, Clone)]
pub struct HashEmbedder {
    dimension: usize,
    id: String,
}

impl HashEmbedder {
    pub const DEFAULT_DIMENSION: usize = 256;

    pub fn new(dimension: usize) -> Result<Self, KbError> {
        if dimension < 8 {
            return Err(KbError::DimensionTooSmall(dimension));
        }
        Ok(Self {
            dimension,
            id: format!("hash:{dimension}"),
        })
    }
}

impl Default for HashEmbedder {
    fn default() -> Self {
        Self::new(Self::DEFAULT_DIMENSION).expect("default dimension is valid")
    }
}

impl<T: Real> EmbeddingProvider<T> for HashEmbedder {
    fn id(&self) -> &str {
        &self.id
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Vec<T>>, KbError> {
        Ok(texts.iter().map(|t| hash_embed(t, self.dimension)).collect())
    }
}

/// Remote embedding endpoint: POST `{model, input}` to `base_url`, expects
/// `{data: [{embedding: [...]}]}`. API key read from the named environment
/// variable at request time.
pub struct RemoteEmbedder {
    base_url: String,
    model: String,
    api_key_env_var: Option<String>,
    dimension: usize,
    id: String,
    client: reqwest::blocking::Client,
}

impl RemoteEmbedder {
    pub fn new(
        base_url: impl Into<String>,
        model: impl Into<String>,
        api_key_env_var: Option<String>,
        dimension: usize,
        timeout_s: u64,
    ) -> Result<Self, KbError> {
        if dimension < 8 {
            return Err(KbError::DimensionTooSmall(dimension));
        }
        let model = model.into();
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(timeout_s))
            .build()
            .map_err(|e| KbError::Provider {
                message: e.to_string(),
            })?;
        Ok(Self {
            base_url: base_url.into(),
            id: format!("remote:{model}"),
            model,
            api_key_env_var,
            dimension,
            client,
        })
    }
}

impl<T: Real> EmbeddingProvider<T> for RemoteEmbedder {
    fn id(&self) -> &str {
        &self.id
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Vec<T>>, KbError> {
        #[derive(serde::Deserialize)]
        struct Item {
            embedding: Vec<f64>,
        }
        #[derive(serde::Deserialize)]
        struct Response {
            data: Vec<Item>,
        }
        let mut request = self.client.post(&self.base_url).json(&serde_json::json!({
            "model": self.model,
            "input": texts,
        }));
        if let Some(var) = &self.api_key_env_var {
            let key = std::env::var(var).map_err(|_| KbError::Provider {
                message: format!("environment variable {var} is not set"),
            })?;
            request = request.bearer_auth(key);
        }
        let response = request.send().map_err(|e| KbError::Provider {
            message: e.to_string(),
        })?;
        if !response.status().is_success() {
            return Err(KbError::Provider {
                message: format!("embedding endpoint returned {}", response.status()),
            });
        }
        let parsed: Response = response.json().map_err(|e| KbError::Provider {
            message: e.to_string(),
        })?;
        Ok(parsed
            .data
            .into_iter()
            .map(|item| {
                item.embedding
                    .into_iter()
                    .map(|x| T::from_f64(x).unwrap_or_else(T::zero))
                    .collect()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle mirroring the bucket/sign definition.
    fn oracle_embed(text: &str, dim: usize) -> Vec<f64> {
        let mut v = vec![0.0f64; dim];
        for token in crate::tokenize::tokenize(text) {
            let h = crate::digest::fnv1a64(token.as_bytes());
            v[((h >> 1) % dim as u64) as usize] += if h & 1 == 0 { 1.0 } else { -1.0 };
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in &mut v {
                *x /= norm;
            }
        }
        v
    }

    #[test]
    fn empty_text_is_zero_vector() {
        let v: Vec<f64> = hash_embed("", 256);
        assert_eq!(v.len(), 256);
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn repetition_collapses_under_normalization() {
        let a: Vec<f64> = hash_embed("x x", 256);
        let b: Vec<f64> = hash_embed("x", 256);
        assert_eq!(a, b);
    }

    #[test]
    fn overlapping_texts_have_intermediate_cosine() {
        let a: Vec<f64> = hash_embed("walking upstairs", 256);
        let b: Vec<f64> = hash_embed("walking", 256);
        let cos = cosine_similarity(&a, &b);
        assert!(cos > 0.0 && cos < 1.0, "cosine {cos}");
        assert_eq!(a, oracle_embed("walking upstairs", 256));
        assert_eq!(b, oracle_embed("walking", 256));
    }

    #[test]
    fn embed_contract_dimension_and_norm() {
        let provider = HashEmbedder::default();
        let vectors: Vec<Vec<f64>> = embed(&["a"], &provider).unwrap();
        assert_eq!(vectors.len(), 1);
        assert_eq!(vectors[0].len(), 256);
        let norm = vectors[0].iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn identical_texts_identical_vectors() {
        let provider = HashEmbedder::default();
        let vectors: Vec<Vec<f64>> = embed(&["same text", "same text"], &provider).unwrap();
        assert_eq!(vectors[0], vectors[1]);
    }

    #[test]
    fn distinct_words_separate() {
        // 100-word sample: all pairwise cosines strictly below 1.
        let words: Vec<String> = (0..100).map(|i| format!("word{i}")).collect();
        let vecs: Vec<Vec<f64>> = words.iter().map(|w| hash_embed(w, 256)).collect();
        for i in 0..words.len() {
            for j in (i + 1)..words.len() {
                let cos = cosine_similarity(&vecs[i], &vecs[j]);
                assert!(cos < 1.0 - 1e-9, "{} vs {}", words[i], words[j]);
            }
        }
    }

    #[test]
    fn small_dimension_rejected() {
        assert!(matches!(
            HashEmbedder::new(4),
            Err(KbError::DimensionTooSmall(4))
        ));
    }
}
