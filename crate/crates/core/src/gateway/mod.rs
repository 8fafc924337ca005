//! Uniform interface to text-embedding and instruction-following model
//! services, plus deterministic offline implementations.
//!
//! The gateway owns prompt construction for the three model tasks
//! (sentence classification, term valuation, license-file segmentation),
//! enforces the line-oriented `KIND: value` answer contract with two
//! re-asks, counts every request, and never lets an out-of-domain term
//! value escape to callers.

pub mod mock;
pub mod ngram;
pub mod remote;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{LicenseId, TermKind, TermValue};
use crate::spdx;

const CLASSIFY_PROMPT: &str = include_str!("../../prompts/classify.txt");
const VALUE_PROMPT: &str = include_str!("../../prompts/value.txt");
const SEGMENT_PROMPT: &str = include_str!("../../prompts/segment.txt");
const TERM_DEFINITIONS_JSON: &str = include_str!("../../data/term_definitions.json");

/// How many times a malformed or out-of-domain answer is re-asked before the
/// documented fallback applies.
pub const MAX_REASKS: usize = 2;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("transport failure ({}retryable): {message}", if *.retryable { "" } else { "not " })]
    Transport { message: String, retryable: bool },
    #[error("malformed model output for {task:?} after {attempts} attempts: {message}")]
    Protocol {
        task: TaskKind,
        attempts: usize,
        message: String,
    },
    #[error("embedding backend error: {0}")]
    Backend(String),
}

impl GatewayError {
    pub fn is_protocol(&self) -> bool {
        matches!(self, GatewayError::Protocol { .. })
    }
}

/// The three model tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskKind {
    Classify,
    Value,
    Segment,
}

/// A text-embedding service.
pub trait EmbeddingBackend: Send + Sync {
    fn name(&self) -> &str;
    fn dimension(&self) -> usize;
    /// Fixed-dimension vector; deterministic per backend; empty text embeds
    /// to the zero vector.
    fn embed(&self, text: &str) -> Result<Vec<f32>, GatewayError>;
}

/// Cosine similarity; zero vectors compare as 0.
pub fn cosine(a: &[f32], b: &[f32]) -> f32 {
    let dot: f32 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f32 = a.iter().map(|x| x * x).sum::<f32>().sqrt();
    let nb: f32 = b.iter().map(|x| x * x).sum::<f32>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// One retrieved example clause handed to the valuation prompt.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievedExample {
    pub license: LicenseId,
    pub clause: String,
    pub value: TermValue,
}

#[derive(Debug, Clone)]
pub struct ClassificationRequest {
    pub sentence: String,
}

/// Set of term labels for one sentence; empty means "other".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationResult {
    pub labels: BTreeSet<TermKind>,
}

#[derive(Debug, Clone)]
pub struct ValuationRequest {
    pub kind: TermKind,
    pub clause_text: String,
    pub examples: Vec<RetrievedExample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuationResult {
    pub value: TermValue,
    pub rationale: String,
}

/// Structural kind of one component of a license file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    PrimaryLicense,
    ThirdPartyLicense,
    Notice,
    Reference,
}

impl ComponentKind {
    pub fn name(self) -> &'static str {
        match self {
            ComponentKind::PrimaryLicense => "primary-license",
            ComponentKind::ThirdPartyLicense => "third-party-license",
            ComponentKind::Notice => "notice",
            ComponentKind::Reference => "reference",
        }
    }

    fn from_name(s: &str) -> Option<ComponentKind> {
        match s {
            "primary-license" => Some(ComponentKind::PrimaryLicense),
            "third-party-license" => Some(ComponentKind::ThirdPartyLicense),
            "notice" => Some(ComponentKind::Notice),
            "reference" => Some(ComponentKind::Reference),
            _ => None,
        }
    }
}

/// One component of a segmented license file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseComponent {
    pub kind: ComponentKind,
    pub text: String,
}

/// Structured request passed to a chat model alongside the rendered prompt.
/// Remote backends send only the prompt; offline backends may answer from
/// the payload directly.
#[derive(Debug, Clone)]
pub struct ModelRequest {
    pub task: TaskKind,
    pub prompt: String,
    pub payload: RequestPayload,
    /// 0 for the initial ask, 1..=MAX_REASKS for re-asks.
    pub attempt: usize,
}

#[derive(Debug, Clone)]
pub enum RequestPayload {
    Classify {
        sentence: String,
    },
    Value {
        kind: TermKind,
        clause_text: String,
        examples: Vec<RetrievedExample>,
    },
    Segment {
        text: String,
    },
}

/// An instruction-following model answering in plain text.
pub trait ChatModel: Send + Sync {
    fn name(&self) -> &str;
    fn complete(&self, request: &ModelRequest) -> Result<String, GatewayError>;
}

// ── term definition rendering ──

#[derive(Debug, Deserialize)]
struct TermDefinition {
    kind: String,
    definition: String,
    values: String,
}

#[derive(Debug, Deserialize)]
struct TermDefinitionsFile {
    terms: Vec<TermDefinition>,
}

fn definitions() -> &'static [TermDefinition] {
    use std::sync::OnceLock;
    static DEFS: OnceLock<Vec<TermDefinition>> = OnceLock::new();
    DEFS.get_or_init(|| {
        let file: TermDefinitionsFile =
            serde_json::from_str(TERM_DEFINITIONS_JSON).expect("bundled term definitions valid");
        assert_eq!(file.terms.len(), 15, "one definition per term kind");
        file.terms
    })
}

fn definition_for(kind: TermKind) -> &'static TermDefinition {
    definitions()
        .iter()
        .find(|d| d.kind == kind.name())
        .expect("definition exists for every kind")
}

fn all_definitions_text() -> String {
    definitions()
        .iter()
        .map(|d| format!("- {}: {} Values: {}.", d.kind, d.definition, d.values))
        .collect::<Vec<_>>()
        .join("\n")
}

fn render(template: &str, substitutions: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (key, value) in substitutions {
        out = out.replace(&format!("{{{{{key}}}}}"), value);
    }
    out
}

fn value_instructions(kind: TermKind) -> &'static str {
    if kind.is_scalar() {
        "Answer with one integer from the possible values."
    } else if kind.is_license_list() {
        "Answer none, or a comma-separated list of license identifiers."
    } else {
        "Answer none, or a comma-separated list of short tags."
    }
}

/// Extract the payload of an answer line `NAME: payload`, looking through
/// optional code fences.
fn answer_line<'a>(response: &'a str, name: &str) -> Option<&'a str> {
    response.lines().find_map(|line| {
        let line = line.trim().trim_start_matches('`').trim();
        let rest = line.strip_prefix(name)?;
        let rest = rest.strip_prefix(':')?;
        Some(rest.trim())
    })
}

fn parse_labels(response: &str) -> Result<BTreeSet<TermKind>, String> {
    let payload = answer_line(response, "LABELS").ok_or("missing LABELS line")?;
    let mut labels = BTreeSet::new();
    if payload.eq_ignore_ascii_case("none") || payload.eq_ignore_ascii_case("other") {
        return Ok(labels);
    }
    for token in payload.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        match TermKind::from_name(&token.to_lowercase()) {
            Some(kind) => {
                labels.insert(kind);
            }
            None => return Err(format!("unknown term name: {token}")),
        }
    }
    Ok(labels)
}

fn parse_value(kind: TermKind, response: &str) -> Result<ValuationResult, String> {
    let payload = answer_line(response, "VALUE").ok_or("missing VALUE line")?;
    let rationale = answer_line(response, "RATIONALE").unwrap_or("").to_string();
    let value = if kind.is_scalar() {
        let raw: i8 = payload
            .parse()
            .map_err(|_| format!("non-integer scalar answer: {payload}"))?;
        TermValue::Scalar(raw)
    } else if payload.eq_ignore_ascii_case("none") {
        TermValue::Unset
    } else {
        let entries: Vec<&str> = payload
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        if kind.is_license_list() {
            // Canonicalize through the bundled id table; unknown entries keep
            // the sentinel form.
            TermValue::license_list(
                entries
                    .iter()
                    .map(|s| spdx::table().license_id(s).identifier),
            )
        } else {
            TermValue::tag_list(entries)
        }
    };
    if !value.in_domain(kind) {
        return Err(format!("value out of domain for {kind}: {payload}"));
    }
    Ok(ValuationResult { value, rationale })
}

fn parse_components(text: &str, response: &str) -> Result<Vec<LicenseComponent>, String> {
    let lines: Vec<&str> = text.lines().collect();
    let mut spans: Vec<(ComponentKind, usize, usize)> = Vec::new();
    for raw in response.lines() {
        let line = raw.trim().trim_start_matches('`').trim();
        let Some(rest) = line.strip_prefix("COMPONENT") else {
            continue;
        };
        let rest = rest.trim_start_matches(':').trim();
        let mut parts = rest.split_whitespace();
        let kind_name = parts.next().ok_or("missing component kind")?;
        let kind = ComponentKind::from_name(kind_name)
            .ok_or_else(|| format!("unknown component kind: {kind_name}"))?;
        let lines_kw = parts.next().ok_or("missing LINES keyword")?;
        if !lines_kw.eq_ignore_ascii_case("lines") {
            return Err(format!("expected LINES, got {lines_kw}"));
        }
        let range = parts.next().ok_or("missing line range")?;
        let (start, end) = range
            .split_once('-')
            .ok_or_else(|| format!("bad line range: {range}"))?;
        let start: usize = start.parse().map_err(|_| format!("bad range start: {start}"))?;
        let end: usize = end.parse().map_err(|_| format!("bad range end: {end}"))?;
        spans.push((kind, start, end));
    }
    if spans.is_empty() {
        return Err("no COMPONENT lines".to_string());
    }
    // Components must partition 1..=line_count in order.
    let mut expected_start = 1;
    for (_, start, end) in &spans {
        if *start != expected_start || *end < *start {
            return Err(format!(
                "ranges do not partition the file: got {start}-{end}, expected start {expected_start}"
            ));
        }
        expected_start = end + 1;
    }
    if expected_start != lines.len() + 1 {
        return Err(format!(
            "ranges cover {} lines, file has {}",
            expected_start - 1,
            lines.len()
        ));
    }
    Ok(spans
        .into_iter()
        .map(|(kind, start, end)| LicenseComponent {
            kind,
            text: lines[start - 1..end].join("\n"),
        })
        .collect())
}

/// Front door for all model traffic. Counts every reasoning request
/// (including re-asks) and every embedding request.
pub struct Gateway {
    chat: Arc<dyn ChatModel>,
    embedder: Arc<dyn EmbeddingBackend>,
    reasoning_calls: AtomicU64,
    embedding_calls: AtomicU64,
}

impl Gateway {
    pub fn new(chat: Arc<dyn ChatModel>, embedder: Arc<dyn EmbeddingBackend>) -> Gateway {
        Gateway {
            chat,
            embedder,
            reasoning_calls: AtomicU64::new(0),
            embedding_calls: AtomicU64::new(0),
        }
    }

    pub fn chat_name(&self) -> &str {
        self.chat.name()
    }

    pub fn embedder_name(&self) -> &str {
        self.embedder.name()
    }

    pub fn embedding_dimension(&self) -> usize {
        self.embedder.dimension()
    }

    /// Reasoning requests issued so far (classification, valuation,
    /// segmentation, including re-asks).
    pub fn reasoning_calls(&self) -> u64 {
        self.reasoning_calls.load(Ordering::SeqCst)
    }

    pub fn embedding_calls(&self) -> u64 {
        self.embedding_calls.load(Ordering::SeqCst)
    }

    pub fn embed(&self, text: &str) -> Result<Vec<f32>, GatewayError> {
        self.embedding_calls.fetch_add(1, Ordering::SeqCst);
        let vector = self.embedder.embed(text)?;
        if vector.len() != self.embedder.dimension() {
            return Err(GatewayError::Backend(format!(
                "backend {} returned dimension {}, declared {}",
                self.embedder.name(),
                vector.len(),
                self.embedder.dimension()
            )));
        }
        Ok(vector)
    }

    fn ask<T>(
        &self,
        task: TaskKind,
        prompt: String,
        payload: RequestPayload,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<T, GatewayError> {
        let mut last_error = String::new();
        for attempt in 0..=MAX_REASKS {
            let prompt = if attempt == 0 {
                prompt.clone()
            } else {
                format!(
                    "{prompt}\n\nYour previous answer could not be used ({last_error}). \
                     Answer again, strictly in the requested format."
                )
            };
            let request = ModelRequest {
                task,
                prompt,
                payload: payload.clone(),
                attempt,
            };
            self.reasoning_calls.fetch_add(1, Ordering::SeqCst);
            let response = self.chat.complete(&request)?;
            match parse(&response) {
                Ok(value) => return Ok(value),
                Err(err) => {
                    log::warn!("{task:?} attempt {attempt}: {err}");
                    last_error = err;
                }
            }
        }
        Err(GatewayError::Protocol {
            task,
            attempts: MAX_REASKS + 1,
            message: last_error,
        })
    }

    /// Multi-label classification of one sentence. The prompt instructs
    /// inclusion on uncertainty. After two failed re-asks the protocol error
    /// propagates; the caller is expected to treat the sentence as carrying
    /// all labels.
    pub fn classify_sentence(
        &self,
        req: &ClassificationRequest,
    ) -> Result<ClassificationResult, GatewayError> {
        let prompt = render(
            CLASSIFY_PROMPT,
            &[
                ("term_definitions", all_definitions_text().as_str()),
                ("sentence", req.sentence.as_str()),
            ],
        );
        let labels = self.ask(
            TaskKind::Classify,
            prompt,
            RequestPayload::Classify {
                sentence: req.sentence.clone(),
            },
            parse_labels,
        )?;
        Ok(ClassificationResult { labels })
    }

    /// Determine the value of one term from its aggregated clauses and up to
    /// three retrieved examples. Never returns an out-of-domain value; after
    /// two failed re-asks the protocol error propagates and the caller
    /// substitutes the kind's most restrictive value.
    pub fn value_term(&self, req: &ValuationRequest) -> Result<ValuationResult, GatewayError> {
        let definition = definition_for(req.kind);
        let examples = if req.examples.is_empty() {
            "(none)".to_string()
        } else {
            req.examples
                .iter()
                .map(|e| {
                    let value = serde_json::to_string(&e.value).unwrap_or_default();
                    format!("- {} (value {}): {}", e.license.identifier, value, e.clause)
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        let clause_text = if req.clause_text.is_empty() {
            "(no related sentences found)"
        } else {
            req.clause_text.as_str()
        };
        let prompt = render(
            VALUE_PROMPT,
            &[
                ("kind", req.kind.name()),
                ("kind_definition", definition.definition.as_str()),
                ("kind_values", definition.values.as_str()),
                ("clause_text", clause_text),
                ("examples", examples.as_str()),
                ("value_instructions", value_instructions(req.kind)),
            ],
        );
        let kind = req.kind;
        self.ask(
            TaskKind::Value,
            prompt,
            RequestPayload::Value {
                kind,
                clause_text: req.clause_text.clone(),
                examples: req.examples.clone(),
            },
            move |response| parse_value(kind, response),
        )
    }

    /// Segment a license file into structurally disambiguated components.
    /// On a protocol failure the conservative fallback is a single
    /// primary-license component covering the whole text.
    pub fn segment_license_file(&self, text: &str) -> Result<Vec<LicenseComponent>, GatewayError> {
        let line_count = text.lines().count().to_string();
        let prompt = render(
            SEGMENT_PROMPT,
            &[("text", text), ("line_count", line_count.as_str())],
        );
        let result = self.ask(
            TaskKind::Segment,
            prompt,
            RequestPayload::Segment {
                text: text.to_string(),
            },
            |response| parse_components(text, response),
        );
        match result {
            Ok(components) => Ok(components),
            Err(err) if err.is_protocol() => {
                log::warn!("segmentation fell back to a single component: {err}");
                Ok(vec![LicenseComponent {
                    kind: ComponentKind::PrimaryLicense,
                    text: text.to_string(),
                }])
            }
            Err(err) => Err(err),
        }
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use std::sync::Mutex;

    /// Chat model that replays a fixed script of responses, for protocol
    /// tests.
    pub struct ScriptedChatModel {
        responses: Mutex<Vec<Result<String, GatewayError>>>,
    }

    impl ScriptedChatModel {
        pub fn new(responses: Vec<Result<String, GatewayError>>) -> ScriptedChatModel {
            ScriptedChatModel {
                responses: Mutex::new(responses),
            }
        }
    }

    impl ChatModel for ScriptedChatModel {
        fn name(&self) -> &str {
            "scripted"
        }

        fn complete(&self, _request: &ModelRequest) -> Result<String, GatewayError> {
            let mut responses = self.responses.lock().unwrap();
            if responses.is_empty() {
                return Err(GatewayError::Transport {
                    message: "script exhausted".to_string(),
                    retryable: false,
                });
            }
            responses.remove(0)
        }
    }

    /// Chat model that always fails with a transport error.
    pub struct FailingChatModel;

    impl ChatModel for FailingChatModel {
        fn name(&self) -> &str {
            "failing"
        }

        fn complete(&self, _request: &ModelRequest) -> Result<String, GatewayError> {
            Err(GatewayError::Transport {
                message: "connection refused".to_string(),
                retryable: true,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::testing::ScriptedChatModel;
    use super::*;
    use crate::gateway::ngram::NgramEmbedding;

    fn gateway_with(responses: Vec<Result<String, GatewayError>>) -> Gateway {
        Gateway::new(
            Arc::new(ScriptedChatModel::new(responses)),
            Arc::new(NgramEmbedding::default()),
        )
    }

    #[test]
    fn classify_parses_labels() {
        let gw = gateway_with(vec![Ok(
            "```\nLABELS: copyright, attribution_retention\n```".to_string()
        )]);
        let result = gw
            .classify_sentence(&ClassificationRequest {
                sentence: "Permission is hereby granted.".to_string(),
            })
            .unwrap();
        assert!(result.labels.contains(&TermKind::Copyright));
        assert!(result.labels.contains(&TermKind::AttributionRetention));
        assert_eq!(gw.reasoning_calls(), 1);
    }

    #[test]
    fn classify_none_is_empty() {
        let gw = gateway_with(vec![Ok("LABELS: none".to_string())]);
        let result = gw
            .classify_sentence(&ClassificationRequest {
                sentence: "have fun".to_string(),
            })
            .unwrap();
        assert!(result.labels.is_empty());
    }

    #[test]
    fn malformed_answer_reasks_then_succeeds() {
        let gw = gateway_with(vec![
            Ok("I think this is about copyright".to_string()),
            Ok("LABELS: copyright".to_string()),
        ]);
        let result = gw
            .classify_sentence(&ClassificationRequest {
                sentence: "x".to_string(),
            })
            .unwrap();
        assert_eq!(result.labels.len(), 1);
        // One initial ask plus one re-ask.
        assert_eq!(gw.reasoning_calls(), 2);
    }

    #[test]
    fn persistent_garbage_is_protocol_error_after_three_attempts() {
        let gw = gateway_with(vec![
            Ok("garbage".to_string()),
            Ok("more garbage".to_string()),
            Ok("still garbage".to_string()),
        ]);
        let err = gw
            .classify_sentence(&ClassificationRequest {
                sentence: "x".to_string(),
            })
            .unwrap_err();
        assert!(err.is_protocol());
        assert_eq!(gw.reasoning_calls(), 3);
    }

    #[test]
    fn value_rejects_out_of_domain_then_accepts() {
        let gw = gateway_with(vec![
            Ok("VALUE: 9".to_string()),
            Ok("VALUE: 1\nRATIONALE: explicit restriction".to_string()),
        ]);
        let result = gw
            .value_term(&ValuationRequest {
                kind: TermKind::TrademarkLimitation,
                clause_text: "You may not use the marks.".to_string(),
                examples: vec![],
            })
            .unwrap();
        assert_eq!(result.value, TermValue::Scalar(1));
        assert_eq!(result.rationale, "explicit restriction");
    }

    #[test]
    fn value_out_of_domain_never_escapes() {
        let gw = gateway_with(vec![
            Ok("VALUE: 9".to_string()),
            Ok("VALUE: -3".to_string()),
            Ok("VALUE: 42".to_string()),
        ]);
        let err = gw
            .value_term(&ValuationRequest {
                kind: TermKind::Copyleft,
                clause_text: "whatever".to_string(),
                examples: vec![],
            })
            .unwrap_err();
        assert!(err.is_protocol());
    }

    #[test]
    fn value_license_list_canonicalized() {
        let gw = gateway_with(vec![Ok("VALUE: GPLv2, SomeMadeUpThing".to_string())]);
        let result = gw
            .value_term(&ValuationRequest {
                kind: TermKind::SecondaryLicense,
                clause_text: "may relicense".to_string(),
                examples: vec![],
            })
            .unwrap();
        assert_eq!(
            result.value,
            TermValue::license_list(["GPL-2.0-only", "unknown:SomeMadeUpThing"])
        );
    }

    #[test]
    fn segment_parses_partition() {
        let text = "line one\nline two\nline three";
        let gw = gateway_with(vec![Ok(
            "COMPONENT: primary-license LINES 1-2\nCOMPONENT: notice LINES 3-3".to_string(),
        )]);
        let components = gw.segment_license_file(text).unwrap();
        assert_eq!(components.len(), 2);
        assert_eq!(components[0].kind, ComponentKind::PrimaryLicense);
        assert_eq!(components[0].text, "line one\nline two");
        assert_eq!(components[1].text, "line three");
        // Partition: concatenation restores the input.
        let joined = components
            .iter()
            .map(|c| c.text.as_str())
            .collect::<Vec<_>>()
            .join("\n");
        assert_eq!(joined, text);
    }

    #[test]
    fn segment_bad_partition_falls_back_to_primary() {
        let text = "a\nb\nc";
        let gw = gateway_with(vec![
            Ok("COMPONENT: primary-license LINES 1-1".to_string()),
            Ok("COMPONENT: primary-license LINES 2-3".to_string()),
            Ok("nonsense".to_string()),
        ]);
        let components = gw.segment_license_file(text).unwrap();
        assert_eq!(components.len(), 1);
        assert_eq!(components[0].kind, ComponentKind::PrimaryLicense);
        assert_eq!(components[0].text, text);
        assert_eq!(gw.reasoning_calls(), 3);
    }

    #[test]
    fn transport_error_propagates_without_reask() {
        let gw = Gateway::new(
            Arc::new(testing::FailingChatModel),
            Arc::new(NgramEmbedding::default()),
        );
        let err = gw
            .classify_sentence(&ClassificationRequest {
                sentence: "x".to_string(),
            })
            .unwrap_err();
        assert!(matches!(err, GatewayError::Transport { .. }));
        assert_eq!(gw.reasoning_calls(), 1);
    }

    #[test]
    fn prompts_embed_all_placeholders() {
        // Every placeholder in the bundled templates must be rendered away.
        let rendered = render(
            CLASSIFY_PROMPT,
            &[
                ("term_definitions", "defs"),
                ("sentence", "hello"),
            ],
        );
        assert!(!rendered.contains("{{"), "unrendered placeholder: {rendered}");
        let rendered = render(
            VALUE_PROMPT,
            &[
                ("kind", "copyright"),
                ("kind_definition", "def"),
                ("kind_values", "vals"),
                ("clause_text", "text"),
                ("examples", "none"),
                ("value_instructions", "answer"),
            ],
        );
        assert!(!rendered.contains("{{"));
        let rendered = render(SEGMENT_PROMPT, &[("text", "x"), ("line_count", "1")]);
        assert!(!rendered.contains("{{"));
    }

    #[test]
    fn cosine_basics() {
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]), 0.0);
        assert!((cosine(&[1.0, 1.0], &[1.0, 1.0]) - 1.0).abs() < 1e-6);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
    }
}
