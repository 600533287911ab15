//! Directory persistence: `manifest.json` plus `chunks.jsonl` and
//! `demos.jsonl`, one JSON object per line.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::{EmbeddedDemonstration, KbError, KbIndex, KnowledgeChunk};

const FORMAT_VERSION: u32 = 1;
const MANIFEST: &str = "manifest.json";
const CHUNKS: &str = "chunks.jsonl";
const DEMOS: &str = "demos.jsonl";

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    embedder_id: String,
    dimension: usize,
    chunk_count: usize,
    demo_count: usize,
    format_version: u32,
}

/// Writes the index to `dir`, creating it if needed. An existing index at
/// the same path is replaced atomically (write-aside then swap).
pub fn persist<T: Real + Serialize>(index: &KbIndex<T>, dir: &Path) -> Result<(), KbError> {
    let parent = dir.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(parent)?;
    let staging = parent.join(format!(
        ".{}.tmp-{}",
        dir.file_name().and_then(|n| n.to_str()).unwrap_or("kb"),
        std::process::id()
    ));
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir_all(&staging)?;

    let manifest = Manifest {
        embedder_id: index.embedder_id.clone(),
        dimension: index.dimension,
        chunk_count: index.chunks.len(),
        demo_count: index.demos.len(),
        format_version: FORMAT_VERSION,
    };
    fs::write(
        staging.join(MANIFEST),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    write_jsonl(&staging.join(CHUNKS), &index.chunks)?;
    write_jsonl(&staging.join(DEMOS), &index.demos)?;

    if dir.exists() {
        let trash = parent.join(format!(
            ".{}.old-{}",
            dir.file_name().and_then(|n| n.to_str()).unwrap_or("kb"),
            std::process::id()
        ));
        if trash.exists() {
            fs::remove_dir_all(&trash)?;
        }
        fs::rename(dir, &trash)?;
        fs::rename(&staging, dir)?;
        fs::remove_dir_all(&trash)?;
    } else {
        fs::rename(&staging, dir)?;
    }
    Ok(())
}

fn write_jsonl<S: Serialize>(path: &Path, items: &[S]) -> Result<(), KbError> {
    let mut file = fs::File::create(path)?;
    for item in items {
        let line = serde_json::to_string(item).expect("jsonl item serializes");
        writeln!(file, "{line}")?;
    }
    file.flush()?;
    Ok(())
}

/// Loads an index produced by [`persist`], validating dimensions, counts,
/// and embedding norms against the manifest.
pub fn load<T: Real + DeserializeOwned>(dir: &Path) -> Result<KbIndex<T>, KbError> {
    let manifest_path = dir.join(MANIFEST);
    if !manifest_path.exists() {
        return Err(KbError::NotFound {
            path: dir.display().to_string(),
        });
    }
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&manifest_path)?)
        .map_err(|e| KbError::Format {
            file: manifest_path.display().to_string(),
            reason: e.to_string(),
        })?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(KbError::Format {
            file: manifest_path.display().to_string(),
            reason: format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                manifest.format_version
            ),
        });
    }

    let chunks: Vec<KnowledgeChunk<T>> = read_jsonl(&dir.join(CHUNKS))?;
    let demos: Vec<EmbeddedDemonstration<T>> = read_jsonl(&dir.join(DEMOS))?;

    let chunks_file = dir.join(CHUNKS).display().to_string();
    if chunks.len() != manifest.chunk_count {
        return Err(KbError::Format {
            file: chunks_file,
            reason: format!(
                "manifest says {} chunks, file has {}",
                manifest.chunk_count,
                chunks.len()
            ),
        });
    }
    let demos_file = dir.join(DEMOS).display().to_string();
    if demos.len() != manifest.demo_count {
        return Err(KbError::Format {
            file: demos_file,
            reason: format!(
                "manifest says {} demos, file has {}",
                manifest.demo_count,
                demos.len()
            ),
        });
    }
    for chunk in &chunks {
        if chunk.embedding.len() != manifest.dimension {
            return Err(KbError::Format {
                file: chunks_file,
                reason: format!(
                    "chunk {} embedding has dimension {}, manifest says {}",
                    chunk.chunk_id,
                    chunk.embedding.len(),
                    manifest.dimension
                ),
            });
        }
        check_norm(&chunk.embedding, &chunk.chunk_id)?;
    }
    for demo in &demos {
        if demo.embedding.len() != manifest.dimension {
            return Err(KbError::Format {
                file: demos_file,
                reason: format!(
                    "demo {} embedding has dimension {}, manifest says {}",
                    demo.demo.demo_id,
                    demo.embedding.len(),
                    manifest.dimension
                ),
            });
        }
    }

    Ok(KbIndex {
        chunks,
        demos,
        embedder_id: manifest.embedder_id,
        dimension: manifest.dimension,
    })
}

fn check_norm<T: Real>(embedding: &[T], chunk_id: &str) -> Result<(), KbError> {
    let norm = embedding
        .iter()
        .map(|&x| x * x)
        .sum::<T>()
        .sqrt()
        .to_f64()
        .expect("Real converts to f64");
    if norm != 0.0 && (norm - 1.0).abs() > 1e-6 {
        return Err(KbError::BadNorm {
            chunk_id: chunk_id.to_string(),
            norm,
        });
    }
    Ok(())
}

fn read_jsonl<D: DeserializeOwned>(path: &Path) -> Result<Vec<D>, KbError> {
    let file = fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            KbError::Format {
                file: path.display().to_string(),
                reason: "file missing".to_string(),
            }
        } else {
            KbError::Io(e)
        }
    })?;
    let reader = BufReader::new(file);
    let mut items = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| KbError::Format {
            file: path.display().to_string(),
            reason: format!("line {}: {}", lineno + 1, e),
        })?;
        items.push(item);
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{build_index, Demonstration, HashEmbedder, SourceDocument, Theme};

    fn sample_index() -> KbIndex<f64> {
        let docs = vec![
            SourceDocument {
                doc_id: "imu".into(),
                text: "Accelerometers measure g. Gyroscopes measure rad/s. Walking oscillates.".into(),
                theme: Theme::DataDomainKnowledge,
                data_type: "IMU".into(),
                task_type: "har2".into(),
            },
            SourceDocument {
                doc_id: "ecg".into(),
                text: "A PVC arrives early. A pause often follows.".into(),
                theme: Theme::TaskDomainKnowledge,
                data_type: "ECG".into(),
                task_type: "heartbeat".into(),
            },
        ];
        let demos = vec![Demonstration {
            demo_id: "demo1".into(),
            task_type: "har2".into(),
            label: "WALKING".into(),
            question: "Readings oscillate at 2 Hz.".into(),
            analysis: Some("Periodic acceleration suggests gait.".into()),
            answer: "WALKING".into(),
        }];
        build_index(&docs, &demos, &HashEmbedder::default()).unwrap()
    }

    #[test]
    fn round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kb");
        let index = sample_index();
        persist(&index, &path).unwrap();
        let loaded: KbIndex<f64> = load(&path).unwrap();
        assert_eq!(loaded, index);
    }

    #[test]
    fn replace_existing_dir() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kb");
        let index = sample_index();
        persist(&index, &path).unwrap();
        persist(&index, &path).unwrap();
        let loaded: KbIndex<f64> = load(&path).unwrap();
        assert_eq!(loaded, index);
    }

    #[test]
    fn wrong_dimension_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kb");
        let index = sample_index();
        persist(&index, &path).unwrap();
        let manifest_path = path.join("manifest.json");
        let text = fs::read_to_string(&manifest_path).unwrap();
        fs::write(&manifest_path, text.replace("256", "128")).unwrap();
        let err = load::<f64>(&path).unwrap_err();
        match err {
            KbError::Format { file, .. } => assert!(file.contains("chunks.jsonl")),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn empty_directory_is_not_found() {
        let dir = tempfile::tempdir().unwrap();
        let err = load::<f64>(dir.path()).unwrap_err();
        assert!(matches!(err, KbError::NotFound { .. }));
    }

    #[test]
    fn corrupt_manifest_names_file() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("manifest.json"), "{not json").unwrap();
        let err = load::<f64>(dir.path()).unwrap_err();
        match err {
            KbError::Format { file, .. } => assert!(file.contains("manifest.json")),
            other => panic!("expected format error, got {other:?}"),
        }
    }
}
