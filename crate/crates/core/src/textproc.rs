//! Sentence segmentation for license prose and sentence-level diffing between
//! a candidate license and a matched standard license.
//!
//! Segmentation cuts the document at boundaries without dropping content, so
//! the concatenation of unit texts reconstructs the document modulo
//! whitespace. License prose is enumerated legal text: clauses separated by
//! semicolons, bulleted conditions, and numbered section headings all form
//! their own units.

use serde::{Deserialize, Serialize};

use crate::fingerprint::normalize;

/// One self-contained unit of meaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceUnit {
    /// Original text of the unit, trimmed.
    pub text: String,
    /// Canonical form (see [`crate::fingerprint::normalize`]); never empty.
    pub normalized: String,
    /// Position in the document, strictly increasing.
    pub index: usize,
    /// Heading text most recently seen before this unit, if any.
    pub section_hint: Option<String>,
}

/// Result of aligning candidate sentences against a standard license.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceDiff {
    /// Pairs of (candidate index, standard index) with equal normalized text.
    pub matched: Vec<(usize, usize)>,
    /// Candidate indices with no exact match in the standard.
    pub candidate_only: Vec<usize>,
    /// Standard indices absent from the candidate.
    pub standard_only: Vec<usize>,
}

const ABBREVIATIONS: &[&str] = &[
    "al", "approx", "art", "ch", "cf", "co", "corp", "dept", "dr", "est", "etc", "fig", "inc",
    "llc", "ltd", "max", "min", "mr", "mrs", "ms", "no", "nos", "pp", "prof", "rev", "sec",
    "secs", "st", "vs",
];

fn is_bullet_start(ch: char) -> bool {
    matches!(ch, '-' | '*' | '\u{2022}' | '(')
}

fn starts_new_sentence(ch: char) -> bool {
    ch.is_uppercase() || ch.is_ascii_digit() || is_bullet_start(ch) || matches!(ch, '"' | '\'')
}

/// True when `token` (letters preceding a period) must not end a sentence.
fn is_abbreviation(token: &str) -> bool {
    if token.chars().count() == 1 {
        return true; // initials and single-letter abbreviations: J., v., e.g.
    }
    let lower = token.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

/// True when the unit-so-far is just a list enumerator like `6`, `(a)`, `iv`.
fn is_enumerator(unit_so_far: &str) -> bool {
    let t = unit_so_far
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')');
    if t.is_empty() || t.len() > 5 {
        return false;
    }
    t.chars().all(|c| c.is_ascii_digit())
        || t.chars().all(|c| "ivxlcdm".contains(c.to_ascii_lowercase()))
}

/// True when a trimmed line begins a list item (`- x`, `* x`, `(a) x`,
/// `1. x`, `a) x`).
fn is_list_item_start(line: &str) -> bool {
    let mut chars = line.chars();
    match chars.next() {
        Some('-') | Some('*') | Some('\u{2022}') => matches!(chars.next(), Some(' ')),
        Some('(') => {
            let inner: String = chars.by_ref().take_while(|c| *c != ')').collect();
            !inner.is_empty() && inner.len() <= 3 && inner.chars().all(|c| c.is_ascii_alphanumeric())
        }
        Some(c) if c.is_ascii_digit() => {
            let rest: String = line.chars().take(4).collect();
            rest.contains('.') || rest.contains(')')
        }
        Some(c) if c.is_ascii_lowercase() => matches!(chars.next(), Some(')')),
        _ => false,
    }
}

const CONNECTIVES: &[&str] = &["a", "an", "and", "for", "in", "of", "on", "or", "the", "to", "with"];

/// Heading classification for a unit that formed a whole single-line block.
fn block_line_is_heading(text: &str) -> bool {
    if text.len() > 70 || text.split_whitespace().count() > 8 {
        return false;
    }
    !text.ends_with(['.', '!', '?', ';', ':', ','])
}

/// Heading classification for numbered section stubs like `6. Trademarks.`
/// or `2. Grant of Copyright License.`
fn is_numbered_heading(text: &str) -> bool {
    if text.len() > 70 || !text.ends_with('.') {
        return false;
    }
    let Some((enumerator, rest)) = text.split_once('.') else {
        return false;
    };
    if !is_enumerator(enumerator) {
        return false;
    }
    let words: Vec<&str> = rest.trim_end_matches('.').split_whitespace().collect();
    if words.is_empty() || words.len() > 6 {
        return false;
    }
    let mut saw_capitalized = false;
    for (i, word) in words.iter().enumerate() {
        let first_upper = word.chars().next().is_some_and(char::is_uppercase);
        if first_upper {
            saw_capitalized = true;
        } else if i == 0 || !CONNECTIVES.contains(&word.to_lowercase().as_str()) {
            return false;
        }
    }
    saw_capitalized
}

/// Split a document into sentence units.
///
/// Boundaries: blank lines, list-item starts, and `.`/`!`/`?`/`;` followed by
/// whitespace and an uppercase/digit/bullet start, with abbreviation,
/// initial, and enumerator guards. Spans without alphanumeric content merge
/// into the following unit, so documents containing any alphanumeric text
/// reconstruct (modulo whitespace) from the returned units. Deterministic.
pub fn segment(doc: &str) -> Vec<SentenceUnit> {
    // Raw pieces of (text, was_single_line_block).
    let mut pieces: Vec<(String, bool)> = Vec::new();

    for block in blocks(doc) {
        let single_line = !block.trim().contains('\n');
        for piece in split_block(block) {
            let trimmed = piece.trim();
            if !trimmed.is_empty() {
                pieces.push((trimmed.to_string(), single_line));
            }
        }
    }

    // Merge pieces with no alphanumeric content into the next unit (or the
    // previous one at end of document).
    let mut merged: Vec<(String, bool)> = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    for (text, single) in pieces {
        if normalize(&text).is_empty() {
            pending.push(text);
        } else if pending.is_empty() {
            merged.push((text, single));
        } else {
            pending.push(text);
            merged.push((pending.join(" "), false));
            pending.clear();
        }
    }
    if !pending.is_empty() {
        if let Some(last) = merged.last_mut() {
            last.0.push(' ');
            last.0.push_str(&pending.join(" "));
        }
        // A document with no alphanumeric content yields no units.
    }

    let mut units = Vec::with_capacity(merged.len());
    let mut current_hint: Option<String> = None;
    for (index, (text, single_line)) in merged.into_iter().enumerate() {
        let heading = (single_line && block_line_is_heading(&text)) || is_numbered_heading(&text);
        let normalized = normalize(&text).as_str().to_string();
        units.push(SentenceUnit {
            normalized,
            index,
            section_hint: current_hint.clone(),
            text: text.clone(),
        });
        if heading {
            current_hint = Some(text);
        }
    }
    units
}

/// Non-blank line runs of the document.
fn blocks(doc: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut pos = 0;
    for line in doc.split_inclusive('\n') {
        if line.trim().is_empty() {
            if let Some(s) = start.take() {
                out.push(&doc[s..pos]);
            }
        } else if start.is_none() {
            start = Some(pos);
        }
        pos += line.len();
    }
    if let Some(s) = start {
        out.push(&doc[s..]);
    }
    out
}

/// Split one block at sentence boundaries and list-item starts.
fn split_block(block: &str) -> Vec<&str> {
    let mut cuts: Vec<usize> = Vec::new();

    // List items: a line whose trimmed content starts a list item begins a
    // new unit.
    let mut offset = 0;
    for (line_no, line) in block.split_inclusive('\n').enumerate() {
        let trimmed = line.trim_start();
        if line_no > 0 && is_list_item_start(trimmed) {
            cuts.push(offset + (line.len() - trimmed.len()));
        }
        offset += line.len();
    }

    // Sentence punctuation followed by whitespace and a sentence-start char.
    let mut unit_start = 0;
    for (i, ch) in block.char_indices() {
        if !matches!(ch, '.' | '!' | '?' | ';') {
            continue;
        }
        let after = i + ch.len_utf8();
        if after >= block.len() || !block[after..].starts_with(|c: char| c.is_whitespace()) {
            continue;
        }
        let Some((next_idx, next_ch)) = block[after..]
            .char_indices()
            .map(|(j, c)| (after + j, c))
            .find(|(_, c)| !c.is_whitespace())
        else {
            continue;
        };
        if !starts_new_sentence(next_ch) {
            continue;
        }
        if ch == '.' {
            let token: String = block[unit_start..i]
                .chars()
                .rev()
                .take_while(|c| c.is_alphabetic())
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect();
            if !token.is_empty() && is_abbreviation(&token) {
                continue;
            }
            if is_enumerator(&block[unit_start..i]) {
                continue;
            }
        }
        cuts.push(next_idx);
        unit_start = next_idx;
    }

    cuts.sort_unstable();
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut prev = 0;
    for cut in cuts {
        if cut > prev {
            out.push(&block[prev..cut]);
            prev = cut;
        }
    }
    out.push(&block[prev..]);
    out
}

/// Align two segmented documents by longest common subsequence over
/// normalized sentence text. Matched pairs are exact normalized-equality
/// matches; the remainder is partitioned into the `*_only` lists.
pub fn diff_sentences(candidate: &[SentenceUnit], standard: &[SentenceUnit]) -> SentenceDiff {
    let n = candidate.len();
    let m = standard.len();
    // dp[i][j] = LCS length of candidate[i..] vs standard[j..].
    let mut dp = vec![0usize; (n + 1) * (m + 1)];
    let idx = |i: usize, j: usize| i * (m + 1) + j;
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[idx(i, j)] = if candidate[i].normalized == standard[j].normalized {
                dp[idx(i + 1, j + 1)] + 1
            } else {
                dp[idx(i + 1, j)].max(dp[idx(i, j + 1)])
            };
        }
    }
    let mut matched = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if candidate[i].normalized == standard[j].normalized {
            matched.push((candidate[i].index, standard[j].index));
            i += 1;
            j += 1;
        } else if dp[idx(i + 1, j)] >= dp[idx(i, j + 1)] {
            i += 1;
        } else {
            j += 1;
        }
    }
    let in_matched_c: std::collections::BTreeSet<usize> =
        matched.iter().map(|(c, _)| *c).collect();
    let in_matched_s: std::collections::BTreeSet<usize> =
        matched.iter().map(|(_, s)| *s).collect();
    SentenceDiff {
        candidate_only: candidate
            .iter()
            .map(|u| u.index)
            .filter(|i| !in_matched_c.contains(i))
            .collect(),
        standard_only: standard
            .iter()
            .map(|u| u.index)
            .filter(|j| !in_matched_s.contains(j))
            .collect(),
        matched,
    }
}
