//! Okapi BM25 scoring.
//!
//! IDF uses ln((N - df + 0.5) / (df + 0.5) + 1), which stays positive for
//! every document frequency. Document length is the token count under the
//! same tokenizer the hashed embedder uses.

use std::collections::HashMap;

use crate::scalar::{real, Real};
use crate::tokenize::tokenize;

/// Scores every document in `corpus` against `query`. Query terms are
/// deduplicated; each contributes its IDF-weighted, length-normalized term
/// frequency. Documents sharing no term score zero.
pub fn bm25_scores<T: Real>(corpus: &[&str], query: &str, k1: f64, b: f64) -> Vec<T> {
    let docs: Vec<Vec<String>> = corpus.iter().map(|t| tokenize(t)).collect();
    let n = docs.len() as f64;
    if n == 0.0 {
        return Vec::new();
    }
    let avgdl = docs.iter().map(|d| d.len() as f64).sum::<f64>() / n;

    let mut terms = tokenize(query);
    terms.sort();
    terms.dedup();

    // document frequency per query term
    let mut df: HashMap<&str, f64> = HashMap::new();
    for term in &terms {
        let count = docs
            .iter()
            .filter(|doc| doc.iter().any(|t| t == term))
            .count();
        df.insert(term.as_str(), count as f64);
    }

    docs.iter()
        .map(|doc| {
            let dl = doc.len() as f64;
            let mut score = 0.0;
            for term in &terms {
                let tf = doc.iter().filter(|t| *t == term).count() as f64;
                if tf == 0.0 {
                    continue;
                }
                let dfi = df[term.as_str()];
                let idf = ((n - dfi + 0.5) / (dfi + 0.5) + 1.0).ln();
                score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl));
            }
            real(score)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rarer_terms_score_higher() {
        let corpus = ["cat sat", "cat ran", "cat hid", "zebra stood"];
        let common: Vec<f64> = bm25_scores(&corpus, "cat", 1.2, 0.75);
        let rare: Vec<f64> = bm25_scores(&corpus, "zebra", 1.2, 0.75);
        assert!(rare[3] > common[0]);
    }

    #[test]
    fn higher_tf_scores_higher() {
        let corpus = ["cat cat", "cat sat"];
        let scores: Vec<f64> = bm25_scores(&corpus, "cat", 1.2, 0.75);
        assert!(scores[0] > scores[1]);
    }

    #[test]
    fn no_shared_terms_scores_zero() {
        let corpus = ["dog sat"];
        let scores: Vec<f64> = bm25_scores(&corpus, "cat", 1.2, 0.75);
        assert_eq!(scores[0], 0.0);
    }

    #[test]
    fn duplicate_query_terms_count_once() {
        let corpus = ["cat sat", "dog sat"];
        let once: Vec<f64> = bm25_scores(&corpus, "cat", 1.2, 0.75);
        let twice: Vec<f64> = bm25_scores(&corpus, "cat cat", 1.2, 0.75);
        assert_eq!(once, twice);
    }
}
