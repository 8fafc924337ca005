//! Deterministic fallback embedding backend: hashed character 3-gram term
//! frequencies, cosine-normalized. Dependency-free and adequate for
//! desk-scale retrieval.

use crate::fingerprint::normalize;

use super::{EmbeddingBackend, GatewayError};

pub const DEFAULT_DIMENSION: usize = 1024;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Hashed character 3-gram embedder over normalized text.
#[derive(Debug, Clone)]
pub struct NgramEmbedding {
    dimension: usize,
}

impl NgramEmbedding {
    pub fn new(dimension: usize) -> NgramEmbedding {
        assert!(dimension > 0);
        NgramEmbedding { dimension }
    }
}

impl Default for NgramEmbedding {
    fn default() -> Self {
        NgramEmbedding::new(DEFAULT_DIMENSION)
    }
}

impl EmbeddingBackend for NgramEmbedding {
    fn name(&self) -> &str {
        "ngram-v1"
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, text: &str) -> Result<Vec<f32>, GatewayError> {
        let normalized = normalize(text);
        let bytes = normalized.as_str().as_bytes();
        let mut counts = vec![0.0f32; self.dimension];
        if bytes.len() >= 3 {
            for gram in bytes.windows(3) {
                let bucket = (fnv1a(gram) % self.dimension as u64) as usize;
                counts[bucket] += 1.0;
            }
        }
        let norm: f32 = counts.iter().map(|c| c * c).sum::<f32>().sqrt();
        if norm > 0.0 {
            for c in &mut counts {
                *c /= norm;
            }
        }
        Ok(counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::cosine;

    #[test]
    fn deterministic_bitwise() {
        let e = NgramEmbedding::default();
        let a = e.embed("The MIT License applies.").unwrap();
        let b = e.embed("The MIT License applies.").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_text_is_zero_vector() {
        let e = NgramEmbedding::default();
        let v = e.embed("").unwrap();
        assert_eq!(v.len(), DEFAULT_DIMENSION);
        assert!(v.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn unit_norm_for_nonempty() {
        let e = NgramEmbedding::default();
        let v = e.embed("permission is hereby granted").unwrap();
        let norm: f32 = v.iter().map(|x| x * x).sum::<f32>().sqrt();
        assert!((norm - 1.0).abs() < 1e-5);
    }

    #[test]
    fn related_texts_closer_than_unrelated() {
        let e = NgramEmbedding::default();
        let a = e.embed("mit license").unwrap();
        let b = e.embed("mit license text").unwrap();
        let c = e.embed("patent litigation").unwrap();
        assert!(cosine(&a, &b) > cosine(&a, &c));
    }
}
