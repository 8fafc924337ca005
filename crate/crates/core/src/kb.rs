//! Annotated standard-license corpus: full texts, per-sentence term labels,
//! per-term clause groups, term values, and embeddings, with
//! similarity/retrieval queries over them.
//!
//! On disk a knowledge base is a directory with a `manifest.json` pinning
//! the embedding backend and fingerprint parameters, and one subdirectory
//! per license holding the raw text (`LICENSE.txt`) and an `annotations.json`
//! with sentence labels and the term vector. The layout is diff-friendly and
//! hand-editable; `annotations.json` looks like:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "id": "MIT",
//!   "name": "MIT License",
//!   "sentences": [
//!     { "text": "MIT License", "labels": [] },
//!     { "text": "Permission is hereby granted...", "labels": ["copyright"] }
//!   ],
//!   "terms": { "copyright": 3, "...": 0, "usage_limitation": null }
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fingerprint::{normalize, WinnowParams};
use crate::gateway::{cosine, EmbeddingBackend, RetrievedExample};
use crate::model::{term_map_from_json, LicenseId, TermKind, TermValue, TermVector};
use crate::spdx;
use crate::textproc::{segment, SentenceUnit};

pub const KB_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("schema error in {file}: {message}")]
    Schema { file: PathBuf, message: String },
    #[error("knowledge base built with backend {built_with}, queried with {requested}")]
    BackendMismatch { built_with: String, requested: String },
    #[error("embedding dimension {got} does not match knowledge base dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("embedding backend failure: {0}")]
    Embedding(#[from] crate::gateway::GatewayError),
}

/// One sentence of a standard license with its multi-label annotation.
/// An empty label set is the "other" sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedSentence {
    pub unit: SentenceUnit,
    pub labels: BTreeSet<TermKind>,
}

/// One annotated standard license.
#[derive(Debug, Clone, PartialEq)]
pub struct KbLicense {
    pub id: LicenseId,
    pub full_text: String,
    pub sentences: Vec<AnnotatedSentence>,
    pub term_vector: TermVector,
    /// Concatenated text of the sentences labeled with each kind.
    pub term_clauses: BTreeMap<TermKind, String>,
    /// Embedding of the full text under the backend recorded in the manifest.
    pub embedding: Vec<f32>,
    /// Embeddings of each non-empty clause group.
    pub term_clause_embeddings: BTreeMap<TermKind, Vec<f32>>,
}

/// Backend identity and fingerprint parameters the KB was built with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildInfo {
    pub embedding_backend: String,
    pub embedding_dimension: usize,
    pub fingerprint: WinnowParams,
}

/// Reference from the sentence index back into a license.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceRef {
    pub license: LicenseId,
    pub index: usize,
    pub labels: BTreeSet<TermKind>,
}

/// The loaded, immutable corpus.
#[derive(Debug, PartialEq)]
pub struct KnowledgeBase {
    licenses: BTreeMap<String, KbLicense>,
    sentence_index: BTreeMap<String, Vec<SentenceRef>>,
    built_with: BuildInfo,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestWire {
    schema_version: u32,
    embedding_backend: String,
    embedding_dimension: usize,
    fingerprint: WinnowParams,
    licenses: Vec<String>,
    #[serde(default)]
    annotations_note: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct SentenceWire {
    text: String,
    labels: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AnnotationsWire {
    schema_version: u32,
    id: String,
    name: String,
    sentences: Vec<SentenceWire>,
    terms: BTreeMap<String, serde_json::Value>,
}

fn read_to_string(path: &Path) -> Result<String, KbError> {
    std::fs::read_to_string(path).map_err(|source| KbError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn schema_error(file: &Path, message: impl Into<String>) -> KbError {
    KbError::Schema {
        file: file.to_path_buf(),
        message: message.into(),
    }
}

fn parse_labels(
    file: &Path,
    index: usize,
    labels: &[String],
) -> Result<BTreeSet<TermKind>, KbError> {
    let mut set = BTreeSet::new();
    for label in labels {
        if label == "other" {
            if labels.len() > 1 {
                return Err(schema_error(
                    file,
                    format!("sentence {index}: 'other' cannot be combined with term labels"),
                ));
            }
            return Ok(set);
        }
        match TermKind::from_name(label) {
            Some(kind) => {
                set.insert(kind);
            }
            None => {
                return Err(schema_error(
                    file,
                    format!("sentence {index}: unknown term kind '{label}'"),
                ))
            }
        }
    }
    Ok(set)
}

impl KnowledgeBase {
    /// Load and verify a knowledge base directory. All invariants hold on
    /// success, or loading fails atomically with an error naming the file
    /// and field. Deterministic for a deterministic embedding backend.
    pub fn load(dir: &Path, embedder: &dyn EmbeddingBackend) -> Result<KnowledgeBase, KbError> {
        let manifest_path = dir.join("manifest.json");
        let manifest: ManifestWire = serde_json::from_str(&read_to_string(&manifest_path)?)
            .map_err(|e| schema_error(&manifest_path, e.to_string()))?;
        if manifest.schema_version != KB_SCHEMA_VERSION {
            return Err(schema_error(
                &manifest_path,
                format!("unsupported schema_version {}", manifest.schema_version),
            ));
        }
        if manifest.embedding_backend != embedder.name() {
            return Err(KbError::BackendMismatch {
                built_with: manifest.embedding_backend,
                requested: embedder.name().to_string(),
            });
        }
        if manifest.embedding_dimension != embedder.dimension() {
            return Err(KbError::DimensionMismatch {
                expected: manifest.embedding_dimension,
                got: embedder.dimension(),
            });
        }
        if manifest.licenses.is_empty() {
            return Err(schema_error(&manifest_path, "manifest lists no licenses"));
        }

        let mut licenses = BTreeMap::new();
        let mut sentence_index: BTreeMap<String, Vec<SentenceRef>> = BTreeMap::new();

        for id in &manifest.licenses {
            let license_dir = dir.join(id);
            let text_path = license_dir.join("LICENSE.txt");
            let ann_path = license_dir.join("annotations.json");
            let full_text = read_to_string(&text_path)?;
            let ann: AnnotationsWire = serde_json::from_str(&read_to_string(&ann_path)?)
                .map_err(|e| schema_error(&ann_path, e.to_string()))?;
            if ann.schema_version != KB_SCHEMA_VERSION {
                return Err(schema_error(
                    &ann_path,
                    format!("unsupported schema_version {}", ann.schema_version),
                ));
            }
            if &ann.id != id {
                return Err(schema_error(
                    &ann_path,
                    format!("id '{}' does not match directory '{id}'", ann.id),
                ));
            }

            let units = segment(&full_text);
            if units.len() != ann.sentences.len() {
                return Err(schema_error(
                    &ann_path,
                    format!(
                        "annotation lists {} sentences, text segments into {}",
                        ann.sentences.len(),
                        units.len()
                    ),
                ));
            }
            let mut sentences = Vec::with_capacity(units.len());
            for (i, (unit, wire)) in units.into_iter().zip(&ann.sentences).enumerate() {
                let expected = normalize(&wire.text);
                if expected.as_str() != unit.normalized {
                    return Err(schema_error(
                        &ann_path,
                        format!(
                            "sentence {i} does not match the segmented text: \
                             annotation '{}' vs segmented '{}'",
                            wire.text, unit.text
                        ),
                    ));
                }
                let labels = parse_labels(&ann_path, i, &wire.labels)?;
                sentences.push(AnnotatedSentence { unit, labels });
            }

            let term_vector = term_map_from_json(&ann.terms)
                .map_err(|e| schema_error(&ann_path, format!("terms: {e}")))?;

            let mut term_clauses: BTreeMap<TermKind, String> = BTreeMap::new();
            for s in &sentences {
                for kind in &s.labels {
                    let clause = term_clauses.entry(*kind).or_default();
                    if !clause.is_empty() {
                        clause.push(' ');
                    }
                    clause.push_str(&s.unit.text);
                }
            }

            let embedding = embedder.embed(&full_text)?;
            let mut term_clause_embeddings = BTreeMap::new();
            for (kind, clause) in &term_clauses {
                term_clause_embeddings.insert(*kind, embedder.embed(clause)?);
            }

            let license_id = spdx::table().license_id(&ann.id);
            for s in &sentences {
                sentence_index
                    .entry(s.unit.normalized.clone())
                    .or_default()
                    .push(SentenceRef {
                        license: license_id.clone(),
                        index: s.unit.index,
                        labels: s.labels.clone(),
                    });
            }

            licenses.insert(
                id.clone(),
                KbLicense {
                    id: license_id,
                    full_text,
                    sentences,
                    term_vector,
                    term_clauses,
                    embedding,
                    term_clause_embeddings,
                },
            );
        }

        for refs in sentence_index.values_mut() {
            refs.sort_by(|a, b| {
                (&a.license.identifier, a.index).cmp(&(&b.license.identifier, b.index))
            });
        }

        Ok(KnowledgeBase {
            licenses,
            sentence_index,
            built_with: BuildInfo {
                embedding_backend: manifest.embedding_backend,
                embedding_dimension: manifest.embedding_dimension,
                fingerprint: manifest.fingerprint,
            },
        })
    }

    /// Write the knowledge base back out in the documented layout.
    pub fn save(&self, dir: &Path) -> Result<(), KbError> {
        std::fs::create_dir_all(dir).map_err(|source| KbError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let manifest = ManifestWire {
            schema_version: KB_SCHEMA_VERSION,
            embedding_backend: self.built_with.embedding_backend.clone(),
            embedding_dimension: self.built_with.embedding_dimension,
            fingerprint: self.built_with.fingerprint,
            licenses: self.licenses.keys().cloned().collect(),
            annotations_note: "Term annotations authored for this bundled corpus.".to_string(),
        };
        let write = |path: &Path, contents: &str| -> Result<(), KbError> {
            std::fs::write(path, contents).map_err(|source| KbError::Io {
                path: path.to_path_buf(),
                source,
            })
        };
        write(
            &dir.join("manifest.json"),
            &serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
        )?;
        for (id, license) in &self.licenses {
            let license_dir = dir.join(id);
            std::fs::create_dir_all(&license_dir).map_err(|source| KbError::Io {
                path: license_dir.clone(),
                source,
            })?;
            write(&license_dir.join("LICENSE.txt"), &license.full_text)?;
            let ann = AnnotationsWire {
                schema_version: KB_SCHEMA_VERSION,
                id: id.clone(),
                name: license.id.display_name.clone(),
                sentences: license
                    .sentences
                    .iter()
                    .map(|s| SentenceWire {
                        text: s.unit.text.clone(),
                        labels: s.labels.iter().map(|k| k.name().to_string()).collect(),
                    })
                    .collect(),
                terms: match serde_json::to_value(&license.term_vector) {
                    Ok(serde_json::Value::Object(map)) => match map.get("terms") {
                        Some(serde_json::Value::Object(terms)) => {
                            terms.clone().into_iter().collect()
                        }
                        _ => BTreeMap::new(),
                    },
                    _ => BTreeMap::new(),
                },
            };
            write(
                &license_dir.join("annotations.json"),
                &serde_json::to_string_pretty(&ann).expect("annotations serialize"),
            )?;
        }
        Ok(())
    }

    pub fn built_with(&self) -> &BuildInfo {
        &self.built_with
    }

    pub fn len(&self) -> usize {
        self.licenses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.licenses.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.licenses.keys().map(String::as_str)
    }

    pub fn get(&self, id: &str) -> Option<&KbLicense> {
        self.licenses.get(id)
    }

    pub fn licenses(&self) -> impl Iterator<Item = &KbLicense> {
        self.licenses.values()
    }

    /// The KB license most similar to a candidate embedding, by cosine
    /// similarity; ties break to the lexicographically smallest identifier.
    pub fn best_match(&self, candidate_embedding: &[f32]) -> Result<(LicenseId, f64), KbError> {
        if candidate_embedding.len() != self.built_with.embedding_dimension {
            return Err(KbError::DimensionMismatch {
                expected: self.built_with.embedding_dimension,
                got: candidate_embedding.len(),
            });
        }
        let mut best: Option<(&KbLicense, f64)> = None;
        // BTreeMap iteration is in identifier order, so keeping strictly
        // greater similarity implements the lexicographic tie-break.
        for license in self.licenses.values() {
            let similarity = cosine(candidate_embedding, &license.embedding) as f64;
            if best.map(|(_, s)| similarity > s).unwrap_or(true) {
                best = Some((license, similarity));
            }
        }
        let (license, similarity) = best.expect("knowledge base is never empty");
        Ok((license.id.clone(), similarity))
    }

    /// The top-k clause groups of `kind`, ranked by embedding similarity to
    /// the query text. Fewer than `k` results are returned when fewer exist.
    pub fn retrieve_term_examples(
        &self,
        kind: TermKind,
        query_text: &str,
        k: usize,
        embedder: &dyn EmbeddingBackend,
    ) -> Result<Vec<RetrievedExample>, KbError> {
        if embedder.name() != self.built_with.embedding_backend {
            return Err(KbError::BackendMismatch {
                built_with: self.built_with.embedding_backend.clone(),
                requested: embedder.name().to_string(),
            });
        }
        let query = embedder.embed(query_text)?;
        let mut scored: Vec<(f64, &KbLicense, &String)> = Vec::new();
        for license in self.licenses.values() {
            if let (Some(clause), Some(embedding)) = (
                license.term_clauses.get(&kind),
                license.term_clause_embeddings.get(&kind),
            ) {
                scored.push((cosine(&query, embedding) as f64, license, clause));
            }
        }
        scored.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.1.id.identifier.cmp(&b.1.id.identifier))
        });
        Ok(scored
            .into_iter()
            .take(k)
            .map(|(_, license, clause)| RetrievedExample {
                license: license.id.clone(),
                clause: clause.clone(),
                value: license.term_vector.value_or_default(kind),
            })
            .collect())
    }

    /// Exact-match lookup of a normalized sentence. When several KB licenses
    /// share the sentence, the lexicographically smallest identifier wins.
    pub fn lookup_sentence(&self, normalized: &str) -> Option<(LicenseId, BTreeSet<TermKind>)> {
        self.sentence_index
            .get(normalized)
            .and_then(|refs| refs.first())
            .map(|r| (r.license.clone(), r.labels.clone()))
    }

    /// All index entries for a normalized sentence.
    pub fn sentence_refs(&self, normalized: &str) -> &[SentenceRef] {
        self.sentence_index
            .get(normalized)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Structural self-checks beyond what `load` already guarantees; used by
    /// the `kb validate` command. Returns human-readable findings (empty
    /// when all checks pass).
    pub fn check_invariants(&self) -> Vec<String> {
        let mut findings = Vec::new();
        for (id, license) in &self.licenses {
            if !license.term_vector.is_valid() {
                findings.push(format!("{id}: term vector fails validation"));
            }
            for s in &license.sentences {
                let covered = self
                    .sentence_index
                    .get(&s.unit.normalized)
                    .map(|refs| {
                        refs.iter()
                            .any(|r| r.license.identifier == license.id.identifier)
                    })
                    .unwrap_or(false);
                if !covered {
                    findings.push(format!(
                        "{id}: sentence {} missing from the sentence index",
                        s.unit.index
                    ));
                }
            }
            match self.best_match(&license.embedding) {
                Ok((best_id, similarity)) => {
                    if best_id.identifier != license.id.identifier || similarity < 0.999 {
                        findings.push(format!(
                            "{id}: self-match returned {} at {similarity:.4}",
                            best_id.identifier
                        ));
                    }
                }
                Err(e) => findings.push(format!("{id}: self-match failed: {e}")),
            }
        }
        findings
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::ngram::NgramEmbedding;
    use std::path::PathBuf;

    fn kb_dir() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("kb")
    }

    fn load_bundled() -> KnowledgeBase {
        KnowledgeBase::load(&kb_dir(), &NgramEmbedding::default()).expect("bundled KB loads")
    }

    #[test]
    fn bundled_kb_loads_with_expected_count() {
        let kb = load_bundled();
        assert_eq!(kb.len(), 12);
        assert!(kb.get("MIT").is_some());
        assert!(kb.get("Apache-2.0").is_some());
        assert!(kb.get("AGPL-3.0-only").is_some());
    }

    #[test]
    fn empty_directory_is_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = KnowledgeBase::load(dir.path(), &NgramEmbedding::default()).unwrap_err();
        assert!(matches!(err, KbError::Io { .. } | KbError::Schema { .. }));
    }

    #[test]
    fn out_of_domain_term_is_schema_error() {
        let src = kb_dir();
        let dir = tempfile::tempdir().unwrap();
        // Copy MIT, then corrupt its copyleft value.
        let manifest = serde_json::json!({
            "schema_version": 1,
            "embedding_backend": "ngram-v1",
            "embedding_dimension": 1024,
            "fingerprint": {"k": 8, "w": 4},
            "licenses": ["MIT"],
        });
        std::fs::write(
            dir.path().join("manifest.json"),
            serde_json::to_string_pretty(&manifest).unwrap(),
        )
        .unwrap();
        std::fs::create_dir(dir.path().join("MIT")).unwrap();
        std::fs::copy(
            src.join("MIT/LICENSE.txt"),
            dir.path().join("MIT/LICENSE.txt"),
        )
        .unwrap();
        let mut ann: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(src.join("MIT/annotations.json")).unwrap(),
        )
        .unwrap();
        ann["terms"]["copyleft"] = serde_json::json!(9);
        std::fs::write(
            dir.path().join("MIT/annotations.json"),
            serde_json::to_string_pretty(&ann).unwrap(),
        )
        .unwrap();
        let err = KnowledgeBase::load(dir.path(), &NgramEmbedding::default()).unwrap_err();
        match err {
            KbError::Schema { file, message } => {
                assert!(file.ends_with("MIT/annotations.json"));
                assert!(message.contains("copyleft"), "{message}");
            }
            other => panic!("expected schema error, got {other}"),
        }
    }

    #[test]
    fn backend_mismatch_refused() {
        struct Renamed(NgramEmbedding);
        impl EmbeddingBackend for Renamed {
            fn name(&self) -> &str {
                "other-backend"
            }
            fn dimension(&self) -> usize {
                self.0.dimension()
            }
            fn embed(&self, text: &str) -> Result<Vec<f32>, crate::gateway::GatewayError> {
                self.0.embed(text)
            }
        }
        let err = KnowledgeBase::load(&kb_dir(), &Renamed(NgramEmbedding::default())).unwrap_err();
        assert!(matches!(err, KbError::BackendMismatch { .. }));
    }

    #[test]
    fn best_match_self_similarity_is_one() {
        let kb = load_bundled();
        for license in kb.licenses() {
            let (id, similarity) = kb.best_match(&license.embedding).unwrap();
            assert_eq!(id.identifier, license.id.identifier);
            assert!(similarity > 0.9999, "{}: {similarity}", license.id.identifier);
        }
    }

    #[test]
    fn best_match_orthogonal_vector_scores_zero() {
        let kb = load_bundled();
        // Find a dimension unused by every KB embedding and point at it.
        let dim = kb.built_with().embedding_dimension;
        let unused = (0..dim)
            .find(|i| kb.licenses().all(|l| l.embedding[*i] == 0.0))
            .expect("some unused dimension exists at desk scale");
        let mut probe = vec![0.0f32; dim];
        probe[unused] = 1.0;
        let (_, similarity) = kb.best_match(&probe).unwrap();
        assert_eq!(similarity, 0.0);
    }

    #[test]
    fn best_match_rejects_dimension_mismatch() {
        let kb = load_bundled();
        let err = kb.best_match(&[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, KbError::DimensionMismatch { .. }));
    }

    #[test]
    fn retrieve_apache_patent_clause_self_first() {
        let kb = load_bundled();
        let embedder = NgramEmbedding::default();
        let clause = kb.get("Apache-2.0").unwrap().term_clauses[&TermKind::PatentGrant].clone();
        let results = kb
            .retrieve_term_examples(TermKind::PatentGrant, &clause, 3, &embedder)
            .unwrap();
        assert!(!results.is_empty());
        assert_eq!(results[0].license.identifier, "Apache-2.0");
        assert_eq!(results[0].value, TermValue::Scalar(1));
    }

    #[test]
    fn retrieve_returns_fewer_when_fewer_exist() {
        let kb = load_bundled();
        let embedder = NgramEmbedding::default();
        // network_use clauses exist only in AGPL-3.0 at desk scale.
        let results = kb
            .retrieve_term_examples(TermKind::NetworkUse, "network interaction", 3, &embedder)
            .unwrap();
        assert!(results.len() < 3, "got {}", results.len());
        assert!(!results.is_empty());
    }

    #[test]
    fn retrieve_network_clause_finds_agpl() {
        let kb = load_bundled();
        let embedder = NgramEmbedding::default();
        let query = "if you modify the program and let users interact with it remotely \
                     through a computer network you must offer them access to the source";
        let results = kb
            .retrieve_term_examples(TermKind::NetworkUse, query, 3, &embedder)
            .unwrap();
        assert!(results
            .iter()
            .any(|r| r.license.identifier == "AGPL-3.0-only"));
    }

    #[test]
    fn lookup_sentence_verbatim_and_case_insensitive() {
        let kb = load_bundled();
        let mit = kb.get("MIT").unwrap();
        let sentence = mit
            .sentences
            .iter()
            .find(|s| s.labels.contains(&TermKind::AttributionRetention))
            .expect("MIT has an attribution sentence");
        let (id, labels) = kb.lookup_sentence(&sentence.unit.normalized).unwrap();
        assert_eq!(id.identifier, "MIT");
        assert_eq!(&labels, &sentence.labels);
        // Same hit for a shouted variant: the key is normalized.
        let shouted = sentence.unit.text.to_uppercase();
        let (id2, _) = kb.lookup_sentence(normalize(&shouted).as_str()).unwrap();
        assert_eq!(id2.identifier, "MIT");
        assert!(kb.lookup_sentence("entirely novel sentence").is_none());
    }

    #[test]
    fn save_load_round_trip() {
        let kb = load_bundled();
        let dir = tempfile::tempdir().unwrap();
        kb.save(dir.path()).unwrap();
        let back = KnowledgeBase::load(dir.path(), &NgramEmbedding::default()).unwrap();
        assert_eq!(kb, back);
    }

    #[test]
    fn invariant_check_clean_on_bundled() {
        let kb = load_bundled();
        let findings = kb.check_invariants();
        assert!(findings.is_empty(), "{findings:?}");
    }
}
