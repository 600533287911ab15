//! Shared tokenizer for the hashed embedder and the BM25 scorer.

/// Lowercase tokens split on whitespace and punctuation: maximal runs of
/// alphanumeric characters. Numbers count as tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_punctuation_and_whitespace() {
        assert_eq!(tokenize("Cat, sat!"), vec!["cat", "sat"]);
        assert_eq!(tokenize("10 Hz (IMU)"), vec!["10", "hz", "imu"]);
    }

    #[test]
    fn empty_and_punctuation_only() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("...!?").is_empty());
    }
}
