//! Winnowing fingerprints over normalized license text and the signature
//! matching score used to compare a license against standard texts.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default k-gram length (characters of normalized text).
pub const DEFAULT_K: usize = 8;
/// Default winnowing window size (number of consecutive k-grams).
pub const DEFAULT_W: usize = 4;

/// FNV-1a offset basis XORed with a fixed seed so fingerprints are stable
/// across platforms and releases of this crate.
const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const SEED: u64 = 0x4c56_5041_5253_4552;

/// 64-bit FNV-1a over a byte slice, seeded.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET ^ SEED;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

#[derive(Debug, Error)]
pub enum FingerprintError {
    #[error("fingerprint parameter mismatch: ({0:?}) vs ({1:?})")]
    ParamMismatch(WinnowParams, WinnowParams),
    #[error("invalid winnowing parameters: k must be >= 2 and w >= 1 (got k={k}, w={w})")]
    InvalidParams { k: usize, w: usize },
}

/// Lowercased text with punctuation removed and whitespace collapsed, plus a
/// map from each normalized position back to the original character offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedText {
    text: String,
    offset_map: Vec<usize>,
}

impl NormalizedText {
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    /// Original character offset of the normalized position `i`.
    pub fn original_offset(&self, i: usize) -> Option<usize> {
        self.offset_map.get(i).copied()
    }
}

/// Normalize raw text: lowercase, replace every non-alphanumeric character
/// with a separator, collapse separator runs to single spaces, and trim.
/// Deterministic and idempotent on its own output.
pub fn normalize(raw: &str) -> NormalizedText {
    let mut text = String::with_capacity(raw.len());
    let mut offset_map = Vec::with_capacity(raw.len());
    let mut pending_space = false;
    for (offset, ch) in raw.char_indices() {
        if ch.is_alphanumeric() {
            if pending_space && !text.is_empty() {
                text.push(' ');
                offset_map.push(offset);
            }
            pending_space = false;
            for lower in ch.to_lowercase() {
                // Lowercasing can expand into combining marks; keep only
                // alphanumeric output so the result is a fixed point.
                if !lower.is_alphanumeric() {
                    continue;
                }
                let start = text.len();
                text.push(lower);
                offset_map.extend(std::iter::repeat(offset).take(text.len() - start));
            }
        } else {
            pending_space = true;
        }
    }
    debug_assert_eq!(text.len(), offset_map.len());
    NormalizedText { text, offset_map }
}

/// Winnowing parameters recorded alongside a fingerprint set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinnowParams {
    pub k: usize,
    pub w: usize,
}

impl Default for WinnowParams {
    fn default() -> Self {
        WinnowParams {
            k: DEFAULT_K,
            w: DEFAULT_W,
        }
    }
}

/// Set of selected k-gram hashes for one normalized text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintSet {
    signatures: BTreeSet<u64>,
    params: WinnowParams,
}

impl FingerprintSet {
    /// Assemble a set from raw signatures; used by tests and tooling that
    /// check the score arithmetic directly.
    pub fn from_signatures(signatures: BTreeSet<u64>, params: WinnowParams) -> FingerprintSet {
        FingerprintSet { signatures, params }
    }

    pub fn signatures(&self) -> &BTreeSet<u64> {
        &self.signatures
    }

    pub fn params(&self) -> WinnowParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }
}

/// Hashes of all k-grams of the normalized text, in position order.
fn kgram_hashes(text: &NormalizedText, k: usize) -> Vec<u64> {
    let bytes = text.as_str().as_bytes();
    if bytes.len() < k {
        return Vec::new();
    }
    bytes.windows(k).map(fnv1a).collect()
}

/// Select the window-minimum k-gram hashes (leftmost minimum on ties).
///
/// Texts shorter than `k` produce an empty set. When there are fewer than `w`
/// k-grams, the single window spans all of them.
pub fn winnow(
    text: &NormalizedText,
    params: WinnowParams,
) -> Result<FingerprintSet, FingerprintError> {
    let WinnowParams { k, w } = params;
    if k < 2 || w < 1 {
        return Err(FingerprintError::InvalidParams { k, w });
    }
    let hashes = kgram_hashes(text, k);
    let mut signatures = BTreeSet::new();
    if !hashes.is_empty() {
        let window = w.min(hashes.len());
        for chunk in hashes.windows(window) {
            // Leftmost minimum: strict comparison keeps the earliest index.
            let mut min = chunk[0];
            for &h in &chunk[1..] {
                if h < min {
                    min = h;
                }
            }
            signatures.insert(min);
        }
    }
    Ok(FingerprintSet { signatures, params })
}

/// Fingerprint raw text with the default parameters.
pub fn fingerprint(raw: &str) -> FingerprintSet {
    winnow(&normalize(raw), WinnowParams::default()).expect("default params are valid")
}

/// Ratio of shared signatures: |A ∩ B| / |A ∪ B|.
///
/// Two empty sets compare as identical (score 1). Sets produced with
/// different parameters cannot be compared.
pub fn matching_score(a: &FingerprintSet, b: &FingerprintSet) -> Result<f64, FingerprintError> {
    if a.params != b.params {
        return Err(FingerprintError::ParamMismatch(a.params, b.params));
    }
    let intersection = a.signatures.intersection(&b.signatures).count();
    let union = a.signatures.union(&b.signatures).count();
    if union == 0 {
        return Ok(1.0);
    }
    Ok(intersection as f64 / union as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Naive oracle: hash every k-gram, then take the per-window minimum
    /// (leftmost on ties) directly from the definition.
    pub(crate) fn winnow_oracle(text: &NormalizedText, params: WinnowParams) -> BTreeSet<u64> {
        let hashes = kgram_hashes(text, params.k);
        let mut selected = BTreeSet::new();
        if hashes.is_empty() {
            return selected;
        }
        let window = params.w.min(hashes.len());
        for start in 0..=(hashes.len() - window) {
            let mut best_idx = start;
            for i in start..start + window {
                if hashes[i] < hashes[best_idx] {
                    best_idx = i;
                }
            }
            selected.insert(hashes[best_idx]);
        }
        selected
    }

    pub(crate) fn all_kgram_hashes(text: &NormalizedText, k: usize) -> BTreeSet<u64> {
        kgram_hashes(text, k).into_iter().collect()
    }

    #[test]
    fn normalize_collapses_whitespace_and_case() {
        assert_eq!(normalize("MIT  License.").as_str(), "mit license");
    }

    #[test]
    fn normalize_empty() {
        assert_eq!(normalize("").as_str(), "");
    }

    #[test]
    fn normalize_punctuation_to_separator() {
        assert_eq!(normalize("A\u{2014}B").as_str(), "a b");
        assert_eq!(normalize("copy, modify; distribute").as_str(), "copy modify distribute");
    }

    #[test]
    fn normalize_idempotent() {
        let once = normalize("  The \"Software\"\n\tIS PROVIDED -- as is.  ");
        let twice = normalize(once.as_str());
        assert_eq!(once.as_str(), twice.as_str());
    }

    #[test]
    fn normalize_offset_map_points_into_original() {
        let raw = "Foo  BAR";
        let n = normalize(raw);
        assert_eq!(n.as_str(), "foo bar");
        // 'b' of "bar" maps back to the 'B' at offset 5.
        assert_eq!(n.original_offset(4), Some(5));
        assert_eq!(n.original_offset(n.len()), None);
    }

    #[test]
    fn winnow_deterministic() {
        let t = normalize("The quick brown fox jumps over the lazy dog");
        let a = winnow(&t, WinnowParams::default()).unwrap();
        let b = winnow(&t, WinnowParams::default()).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
    }

    #[test]
    fn winnow_short_text_empty() {
        let t = normalize("abc");
        let set = winnow(&t, WinnowParams { k: 8, w: 4 }).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn winnow_rejects_bad_params() {
        let t = normalize("abcdefgh");
        assert!(winnow(&t, WinnowParams { k: 1, w: 4 }).is_err());
        assert!(winnow(&t, WinnowParams { k: 4, w: 0 }).is_err());
    }

    #[test]
    fn winnow_matches_oracle_on_repetitive_text() {
        let t = normalize("abcdabcd");
        let params = WinnowParams { k: 4, w: 2 };
        let got = winnow(&t, params).unwrap();
        assert_eq!(*got.signatures(), winnow_oracle(&t, params));
    }

    #[test]
    fn score_self_is_one() {
        let a = fingerprint("Permission is hereby granted, free of charge, to any person");
        assert!(!a.is_empty());
        assert_eq!(matching_score(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn score_disjoint_is_zero() {
        let params = WinnowParams::default();
        let a = FingerprintSet::from_signatures([1, 2, 3].into(), params);
        let b = FingerprintSet::from_signatures([4, 5].into(), params);
        assert_eq!(matching_score(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn score_three_quarters() {
        let params = WinnowParams::default();
        let a = FingerprintSet::from_signatures([1, 2, 3].into(), params);
        let b = FingerprintSet::from_signatures([1, 2, 3, 4].into(), params);
        // |A ∩ B| = 3, |A ∪ B| = 4, checked against direct set arithmetic.
        let inter = a.signatures().intersection(b.signatures()).count();
        let union = a.signatures().union(b.signatures()).count();
        assert_eq!((inter, union), (3, 4));
        assert_eq!(matching_score(&a, &b).unwrap(), 0.75);
    }

    #[test]
    fn score_both_empty_is_one() {
        let params = WinnowParams::default();
        let a = FingerprintSet::from_signatures(BTreeSet::new(), params);
        let b = FingerprintSet::from_signatures(BTreeSet::new(), params);
        assert_eq!(matching_score(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn score_param_mismatch_errors() {
        let a = FingerprintSet::from_signatures([1].into(), WinnowParams { k: 8, w: 4 });
        let b = FingerprintSet::from_signatures([1].into(), WinnowParams { k: 6, w: 4 });
        assert!(matches!(
            matching_score(&a, &b),
            Err(FingerprintError::ParamMismatch(_, _))
        ));
    }

    #[test]
    fn appended_sentence_changes_score_boundedly() {
        let base = "Permission is hereby granted, free of charge, to any person obtaining \
                    a copy of this software and associated documentation files, to deal in \
                    the Software without restriction, including without limitation the rights \
                    to use, copy, modify, merge, publish, distribute, sublicense, and sell \
                    copies of the Software.";
        let extended = format!("{base} Have fun using this code.");
        let a = fingerprint(base);
        let b = fingerprint(&extended);
        let new = b.signatures().difference(a.signatures()).count();
        let union = a.signatures().union(b.signatures()).count();
        let score = matching_score(&a, &b).unwrap();
        assert!(score >= 1.0 - new as f64 / union as f64 - 1e-12);
        assert!(score > 0.8, "single-sentence addition should stay close: {score}");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn winnow_subset_of_all_kgrams(raw in ".{0,300}", k in 2usize..6, w in 1usize..6) {
                let t = normalize(&raw);
                let params = WinnowParams { k, w };
                let set = winnow(&t, params).unwrap();
                let all = all_kgram_hashes(&t, k);
                prop_assert!(set.signatures().is_subset(&all));
                prop_assert_eq!(set.signatures().clone(), winnow_oracle(&t, params));
            }

            #[test]
            fn score_in_unit_interval_and_symmetric(a in ".{0,200}", b in ".{0,200}") {
                let fa = fingerprint(&a);
                let fb = fingerprint(&b);
                let s1 = matching_score(&fa, &fb).unwrap();
                let s2 = matching_score(&fb, &fa).unwrap();
                prop_assert!((0.0..=1.0).contains(&s1));
                prop_assert_eq!(s1, s2);
                // Score 1 exactly when the signature sets are equal.
                prop_assert_eq!(s1 == 1.0, fa.signatures() == fb.signatures());
            }

            #[test]
            fn normalize_idempotent_prop(raw in ".{0,300}") {
                let once = normalize(&raw);
                let twice = normalize(once.as_str());
                prop_assert_eq!(once.as_str(), twice.as_str());
            }
        }
    }
}
