//! One-shot demonstration selection.

use crate::kb::{cosine_similarity, Demonstration, KbIndex};
use crate::scalar::Real;

use super::RetrievalError;

/// Picks demonstrations for a task.
///
/// Classification (`labels` non-empty): for each label, the demonstration
/// of that task type and label whose question embedding is most similar to
/// the query, ties broken by ascending demo id — exactly one per label, in
/// label order. A label with no demonstration is an error naming the label.
///
/// Regression (`labels` empty): the single most similar demonstration of
/// that task type, or nothing if none exist.
pub fn retrieve_demonstrations<T: Real>(
    index: &KbIndex<T>,
    task_type: &str,
    labels: &[String],
    query_embedding: &[T],
) -> Result<Vec<Demonstration>, RetrievalError> {
    let of_task: Vec<_> = index
        .demos
        .iter()
        .filter(|d| d.demo.task_type == task_type)
        .collect();

    if labels.is_empty() {
        return Ok(best_match(of_task.iter().copied(), query_embedding)
            .map(|d| d.demo.clone())
            .into_iter()
            .collect());
    }

    labels
        .iter()
        .map(|label| {
            best_match(
                of_task.iter().copied().filter(|d| &d.demo.label == label),
                query_embedding,
            )
            .map(|d| d.demo.clone())
            .ok_or_else(|| RetrievalError::MissingDemonstration(label.clone()))
        })
        .collect()
}

fn best_match<'a, T: Real>(
    candidates: impl Iterator<Item = &'a crate::kb::EmbeddedDemonstration<T>>,
    query_embedding: &[T],
) -> Option<&'a crate::kb::EmbeddedDemonstration<T>> {
    candidates.fold(None, |best, candidate| {
        let score = cosine_similarity(query_embedding, &candidate.embedding);
        match best {
            None => Some((score, candidate)),
            Some((best_score, best_demo)) => {
                if score > best_score
                    || (score == best_score && candidate.demo.demo_id < best_demo.demo.demo_id)
                {
                    Some((score, candidate))
                } else {
                    Some((best_score, best_demo))
                }
            }
        }
    })
    .map(|(_, demo)| demo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{build_index, hash_embed, Demonstration, HashEmbedder};

    fn demo(id: &str, task: &str, label: &str, question: &str) -> Demonstration {
        Demonstration {
            demo_id: id.into(),
            task_type: task.into(),
            label: label.into(),
            question: question.into(),
            analysis: None,
            answer: label.to_string(),
        }
    }

    fn index_with(demos: Vec<Demonstration>) -> KbIndex<f64> {
        build_index(&[], &demos, &HashEmbedder::default()).unwrap()
    }

    #[test]
    fn one_demo_per_label() {
        let index = index_with(vec![
            demo("n1", "heartbeat", "N", "steady rhythm trace"),
            demo("n2", "heartbeat", "N", "regular beats every second"),
            demo("v1", "heartbeat", "V", "early wide spike then pause"),
        ]);
        let query: Vec<f64> = hash_embed("regular beats every second", 256);
        let out = retrieve_demonstrations(
            &index,
            "heartbeat",
            &["N".to_string(), "V".to_string()],
            &query,
        )
        .unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].label, "N");
        assert_eq!(out[0].demo_id, "n2");
        assert_eq!(out[1].label, "V");
    }

    #[test]
    fn missing_label_names_the_label() {
        let index = index_with(vec![demo("n1", "heartbeat", "N", "steady rhythm")]);
        let query: Vec<f64> = hash_embed("anything", 256);
        let err = retrieve_demonstrations(
            &index,
            "heartbeat",
            &["N".to_string(), "V".to_string()],
            &query,
        )
        .unwrap_err();
        match err {
            RetrievalError::MissingDemonstration(label) => assert_eq!(label, "V"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn regression_returns_single_demo() {
        let index = index_with(vec![
            demo("l1", "localization", "", "weak signals far corner"),
            demo("l2", "localization", "", "strong signal near origin"),
            demo("l3", "localization", "", "mixed readings center"),
        ]);
        let query: Vec<f64> = hash_embed("strong signal near origin", 256);
        let out = retrieve_demonstrations(&index, "localization", &[], &query).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].demo_id, "l2");
    }

    #[test]
    fn regression_with_no_demos_is_empty() {
        let index = index_with(vec![demo("n1", "heartbeat", "N", "steady")]);
        let query: Vec<f64> = hash_embed("anything", 256);
        let out = retrieve_demonstrations(&index, "localization", &[], &query).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn other_task_demos_ignored() {
        let index = index_with(vec![
            demo("h1", "har2", "WALKING", "oscillating accel"),
            demo("n1", "heartbeat", "N", "oscillating accel"),
        ]);
        let query: Vec<f64> = hash_embed("oscillating accel", 256);
        let out =
            retrieve_demonstrations(&index, "har2", &["WALKING".to_string()], &query).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].demo_id, "h1");
    }
}
