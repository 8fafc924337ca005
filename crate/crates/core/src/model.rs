//! Structured license representation: the 15-term model, its value domains,
//! and the restrictiveness partial order used for conservative conflict
//! resolution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Version stamp written into serialized term vectors and annotation files.
pub const SCHEMA_VERSION: u32 = 1;

/// The fifteen compatibility-relevant license terms.
///
/// The first ten kinds carry scalar values, the last five carry lists
/// (license identifiers or free-form tags).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    /// Rights granted (or restrictions imposed) on use, copying, modification
    /// and distribution of the software itself.
    Copyright,
    /// Requirement that derivative or combined works retain the original
    /// license (or a compatible one) when distributed.
    Copyleft,
    /// Requirement to mark modified files / state changes prominently.
    ChangeStatement,
    /// Grant (or denial) of rights under the licensor's patents.
    PatentGrant,
    /// Restriction on using names, logos, or trademarks of the authors.
    TrademarkLimitation,
    /// Requirement to disclose source when the work is offered as a network
    /// service.
    NetworkUse,
    /// Requirement to retain copyright notices, license text, disclaimers.
    AttributionRetention,
    /// Requirement to display attribution in a specified or prominent place.
    EnhancedAttribution,
    /// Termination of granted patent rights if the user initiates patent
    /// litigation.
    PatentLitigationTermination,
    /// Requirement to obtain the recipient's explicit acceptance of the terms
    /// when distributing.
    ExplicitAcceptance,
    /// Licenses the work may alternatively be distributed or relicensed under.
    SecondaryLicense,
    /// GPL-family licenses the work may be combined into.
    GplCombination,
    /// License versions the work may be relicensed under.
    CompatibleVersion,
    /// Explicit restrictions on kinds or manners of use.
    UsageLimitation,
    /// Exceptions or exemptions to general requirements (e.g. linking
    /// exceptions).
    Exception,
}

impl TermKind {
    /// All fifteen kinds, scalar-valued first.
    pub const ALL: [TermKind; 15] = [
        TermKind::Copyright,
        TermKind::Copyleft,
        TermKind::ChangeStatement,
        TermKind::PatentGrant,
        TermKind::TrademarkLimitation,
        TermKind::NetworkUse,
        TermKind::AttributionRetention,
        TermKind::EnhancedAttribution,
        TermKind::PatentLitigationTermination,
        TermKind::ExplicitAcceptance,
        TermKind::SecondaryLicense,
        TermKind::GplCombination,
        TermKind::CompatibleVersion,
        TermKind::UsageLimitation,
        TermKind::Exception,
    ];

    /// Stable snake_case name, used as the JSON key and in traces.
    pub fn name(self) -> &'static str {
        match self {
            TermKind::Copyright => "copyright",
            TermKind::Copyleft => "copyleft",
            TermKind::ChangeStatement => "change_statement",
            TermKind::PatentGrant => "patent_grant",
            TermKind::TrademarkLimitation => "trademark_limitation",
            TermKind::NetworkUse => "network_use",
            TermKind::AttributionRetention => "attribution_retention",
            TermKind::EnhancedAttribution => "enhanced_attribution",
            TermKind::PatentLitigationTermination => "patent_litigation_termination",
            TermKind::ExplicitAcceptance => "explicit_acceptance",
            TermKind::SecondaryLicense => "secondary_license",
            TermKind::GplCombination => "gpl_combination",
            TermKind::CompatibleVersion => "compatible_version",
            TermKind::UsageLimitation => "usage_limitation",
            TermKind::Exception => "exception",
        }
    }

    /// Parse a snake_case kind name.
    pub fn from_name(name: &str) -> Option<TermKind> {
        TermKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// True for the ten kinds whose value is a single integer.
    pub fn is_scalar(self) -> bool {
        !self.is_list()
    }

    /// True for the five kinds whose value is a list (or `Unset`).
    pub fn is_list(self) -> bool {
        matches!(
            self,
            TermKind::SecondaryLicense
                | TermKind::GplCombination
                | TermKind::CompatibleVersion
                | TermKind::UsageLimitation
                | TermKind::Exception
        )
    }

    /// True for list kinds holding license identifiers (as opposed to tags).
    pub fn is_license_list(self) -> bool {
        matches!(
            self,
            TermKind::SecondaryLicense | TermKind::GplCombination | TermKind::CompatibleVersion
        )
    }

    /// Inclusive scalar domain for scalar kinds.
    pub fn scalar_domain(self) -> Option<&'static [i8]> {
        match self {
            TermKind::Copyright | TermKind::Copyleft => Some(&[0, 1, 2, 3]),
            TermKind::PatentGrant => Some(&[-1, 0, 1]),
            k if k.is_scalar() => Some(&[0, 1]),
            _ => None,
        }
    }

    /// The value a term takes when the license text never addresses it.
    ///
    /// A text that is silent on copyright amounts to an ambiguous/implicit
    /// grant (2); every other scalar kind has an explicit "not mentioned"
    /// value of 0, and list kinds default to `Unset`.
    pub fn absent_value(self) -> TermValue {
        match self {
            TermKind::Copyright => TermValue::Scalar(2),
            k if k.is_scalar() => TermValue::Scalar(0),
            _ => TermValue::Unset,
        }
    }

    /// The most restrictive value in the kind's domain, used as the
    /// conservative substitute when a model answer cannot be obtained.
    pub fn most_restrictive_value(self) -> TermValue {
        match self {
            TermKind::Copyright => TermValue::Scalar(0),
            TermKind::Copyleft => TermValue::Scalar(3),
            TermKind::PatentGrant => TermValue::Scalar(-1),
            k if k.is_scalar() => TermValue::Scalar(1),
            // For license lists, no relicensing permission at all is the most
            // restrictive state; for tag lists there is no finite maximum, so
            // the empty set (no asserted restrictions) is kept.
            _ => TermValue::Unset,
        }
    }
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The value of one term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermValue {
    /// Value for scalar kinds.
    Scalar(i8),
    /// Ordered, deduplicated set of license identifiers (canonical SPDX ids
    /// or the sentinel `unknown:<raw>`).
    LicenseList(Vec<String>),
    /// Ordered, deduplicated set of free-form tags.
    TagList(Vec<String>),
    /// "None" for list-valued kinds.
    Unset,
}

impl TermValue {
    /// Build a sorted, deduplicated license list; an empty list collapses to
    /// `Unset`.
    pub fn license_list<I, S>(ids: I) -> TermValue
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = ids.into_iter().map(Into::into).collect();
        if set.is_empty() {
            TermValue::Unset
        } else {
            TermValue::LicenseList(set.into_iter().collect())
        }
    }

    /// Build a sorted, deduplicated tag list; an empty list collapses to
    /// `Unset`.
    pub fn tag_list<I, S>(tags: I) -> TermValue
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = tags.into_iter().map(Into::into).collect();
        if set.is_empty() {
            TermValue::Unset
        } else {
            TermValue::TagList(set.into_iter().collect())
        }
    }

    pub fn as_scalar(&self) -> Option<i8> {
        match self {
            TermValue::Scalar(v) => Some(*v),
            _ => None,
        }
    }

    /// List entries for list values; `Unset` yields the empty slice.
    pub fn entries(&self) -> &[String] {
        match self {
            TermValue::LicenseList(v) | TermValue::TagList(v) => v,
            _ => &[],
        }
    }

    /// Check this value against the domain of `kind`.
    pub fn in_domain(&self, kind: TermKind) -> bool {
        match self {
            TermValue::Scalar(v) => kind
                .scalar_domain()
                .map(|d| d.contains(v))
                .unwrap_or(false),
            TermValue::LicenseList(items) => {
                kind.is_license_list() && !items.is_empty() && is_sorted_dedup(items)
            }
            TermValue::TagList(items) => {
                kind.is_list()
                    && !kind.is_license_list()
                    && !items.is_empty()
                    && is_sorted_dedup(items)
            }
            TermValue::Unset => kind.is_list(),
        }
    }
}

fn is_sorted_dedup(items: &[String]) -> bool {
    items.windows(2).all(|w| w[0] < w[1])
}

/// Where a term value in a parsed vector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Copied from the knowledge base for unchanged text.
    KnowledgeBaseReuse,
    /// Inferred by the model from (partially) novel text.
    ModelInferred,
    /// A reused and an inferred value disagreed; the more restrictive one was
    /// kept.
    ConflictResolved,
    /// No evidence in the text (or the model failed); the kind's default or
    /// most restrictive value was substituted.
    Default,
}

/// A violation reported by [`TermVector::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A kind is missing from the vector.
    Missing(TermKind),
    /// A value lies outside its kind's domain.
    Domain { kind: TermKind, value: TermValue },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Missing(kind) => write!(f, "missing term: {kind}"),
            Violation::Domain { kind, value } => {
                write!(f, "value out of domain for {kind}: {value:?}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("value out of domain for {kind}: {value:?}")]
    DomainViolation { kind: TermKind, value: TermValue },
    #[error("term vector invalid: {0:?}")]
    InvalidVector(Vec<Violation>),
}

/// The complete structured representation of one license.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermVector {
    terms: BTreeMap<TermKind, TermValue>,
    provenance: BTreeMap<TermKind, Provenance>,
}

impl TermVector {
    /// Vector with every kind at its "not mentioned" default and provenance
    /// `Default`.
    pub fn defaults() -> TermVector {
        let mut terms = BTreeMap::new();
        let mut provenance = BTreeMap::new();
        for kind in TermKind::ALL {
            terms.insert(kind, kind.absent_value());
            provenance.insert(kind, Provenance::Default);
        }
        TermVector { terms, provenance }
    }

    /// Empty vector; fails validation until all kinds are set. Useful for
    /// exercising completeness checks.
    pub fn empty() -> TermVector {
        TermVector {
            terms: BTreeMap::new(),
            provenance: BTreeMap::new(),
        }
    }

    /// Builder-style setter with provenance `ModelInferred` left untouched;
    /// use [`TermVector::set`] to control provenance.
    pub fn with(mut self, kind: TermKind, value: TermValue) -> TermVector {
        self.terms.insert(kind, value);
        self.provenance.entry(kind).or_insert(Provenance::Default);
        self
    }

    /// Scalar convenience form of [`TermVector::with`].
    pub fn with_scalar(self, kind: TermKind, v: i8) -> TermVector {
        self.with(kind, TermValue::Scalar(v))
    }

    pub fn set(&mut self, kind: TermKind, value: TermValue, provenance: Provenance) {
        self.terms.insert(kind, value);
        self.provenance.insert(kind, provenance);
    }

    pub fn get(&self, kind: TermKind) -> Option<&TermValue> {
        self.terms.get(&kind)
    }

    /// Value of `kind`, falling back to the kind's absent default when unset.
    pub fn value_or_default(&self, kind: TermKind) -> TermValue {
        self.terms
            .get(&kind)
            .cloned()
            .unwrap_or_else(|| kind.absent_value())
    }

    pub fn provenance(&self, kind: TermKind) -> Option<Provenance> {
        self.provenance.get(&kind).copied()
    }

    /// Copyleft level `c` used by the compatibility check; 0 when absent.
    pub fn copyleft_level(&self) -> i8 {
        self.get(TermKind::Copyleft)
            .and_then(TermValue::as_scalar)
            .unwrap_or(0)
    }

    /// Copyright value; the ambiguous default (2) when absent.
    pub fn copyright_value(&self) -> i8 {
        self.get(TermKind::Copyright)
            .and_then(TermValue::as_scalar)
            .unwrap_or(2)
    }

    /// Entries of a license-list kind (`V`, `S`, or `G`); empty when unset.
    pub fn license_list(&self, kind: TermKind) -> &[String] {
        self.get(kind).map(TermValue::entries).unwrap_or(&[])
    }

    /// Check all invariants: completeness over the 15 kinds and per-kind value
    /// domains. Total function; an empty result means the vector is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        for kind in TermKind::ALL {
            match self.terms.get(&kind) {
                None => violations.push(Violation::Missing(kind)),
                Some(value) if !value.in_domain(kind) => violations.push(Violation::Domain {
                    kind,
                    value: value.clone(),
                }),
                Some(_) => {}
            }
        }
        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// The set of active obligation/restriction tokens, `t` in the
    /// compatibility check (all terms except copyleft).
    ///
    /// Binary kinds contribute their name when set to 1; a denied patent
    /// grant (-1) contributes; each usage-limitation tag contributes a
    /// `usage_limitation:<tag>` token. Copyright and copyleft never
    /// contribute: their values are graded grants, not obligations, and are
    /// handled by dedicated rules.
    pub fn obligation_set(&self) -> BTreeSet<String> {
        let mut set = BTreeSet::new();
        for kind in TermKind::ALL {
            match kind {
                TermKind::Copyright | TermKind::Copyleft => {}
                TermKind::PatentGrant => {
                    if self.get(kind).and_then(TermValue::as_scalar) == Some(-1) {
                        set.insert(kind.name().to_string());
                    }
                }
                k if k.is_scalar() => {
                    if self.get(k).and_then(TermValue::as_scalar) == Some(1) {
                        set.insert(k.name().to_string());
                    }
                }
                TermKind::UsageLimitation => {
                    if let Some(value) = self.get(kind) {
                        for tag in value.entries() {
                            set.insert(format!("usage_limitation:{tag}"));
                        }
                    }
                }
                _ => {}
            }
        }
        set
    }
}

/// Rank of a value under the per-kind restrictiveness order; higher rank is
/// more restrictive. Only defined for scalar kinds.
fn scalar_restrictiveness_rank(kind: TermKind, v: i8) -> u8 {
    match kind {
        // Proprietary (0) dominates ambiguous (2), which dominates explicit
        // grant (3); public domain (1) is least restrictive.
        TermKind::Copyright => match v {
            0 => 3,
            2 => 2,
            3 => 1,
            _ => 0,
        },
        TermKind::Copyleft => v as u8,
        // Denied (-1) dominates not-mentioned (0), which dominates granted (1).
        TermKind::PatentGrant => (1 - v) as u8,
        _ => v as u8,
    }
}

/// The more restrictive of two values of the same kind.
///
/// Obligations accumulate and permissions shrink under conservative merging:
/// scalar kinds use the declared per-kind order, tag lists resolve by union,
/// license lists by intersection. Commutative, associative, idempotent.
pub fn restrictiveness_max(
    kind: TermKind,
    a: &TermValue,
    b: &TermValue,
) -> Result<TermValue, ModelError> {
    for v in [a, b] {
        if !v.in_domain(kind) {
            return Err(ModelError::DomainViolation {
                kind,
                value: v.clone(),
            });
        }
    }
    let result = match (a, b) {
        (TermValue::Scalar(x), TermValue::Scalar(y)) => {
            if scalar_restrictiveness_rank(kind, *x) >= scalar_restrictiveness_rank(kind, *y) {
                TermValue::Scalar(*x)
            } else {
                TermValue::Scalar(*y)
            }
        }
        _ if kind.is_license_list() => {
            let xs: BTreeSet<&String> = a.entries().iter().collect();
            let ys: BTreeSet<&String> = b.entries().iter().collect();
            TermValue::license_list(xs.intersection(&ys).map(|s| s.as_str()))
        }
        _ => {
            let mut all: BTreeSet<&str> = a.entries().iter().map(String::as_str).collect();
            all.extend(b.entries().iter().map(String::as_str));
            TermValue::tag_list(all)
        }
    };
    Ok(result)
}

/// A license identity: identifier string (SPDX id when known), display name,
/// and whether the identifier appears in the bundled SPDX id table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LicenseId {
    pub identifier: String,
    pub display_name: String,
    pub canonical: bool,
}

impl LicenseId {
    /// Identity for an id from the bundled SPDX table.
    pub fn canonical(identifier: impl Into<String>, display_name: impl Into<String>) -> LicenseId {
        LicenseId {
            identifier: identifier.into(),
            display_name: display_name.into(),
            canonical: true,
        }
    }

    /// Identity for a license outside the SPDX table, under the
    /// `unknown:<raw>` sentinel convention.
    pub fn unknown(raw: impl AsRef<str>) -> LicenseId {
        let raw = raw.as_ref();
        LicenseId {
            identifier: format!("unknown:{raw}"),
            display_name: raw.to_string(),
            canonical: false,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.identifier
    }
}

impl fmt::Display for LicenseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.identifier)
    }
}

// ── serialization ──
//
// A term vector serializes to a stable JSON object keyed by the 15 kind
// names, plus a schema_version stamp and a provenance object:
//
// {
//   "schema_version": 1,
//   "terms": { "copyright": 3, ..., "secondary_license": ["GPL-2.0-only"],
//              "usage_limitation": null, ... },
//   "provenance": { "copyright": "knowledge-base-reuse", ... }
// }

impl Serialize for TermValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            TermValue::Scalar(v) => serializer.serialize_i8(*v),
            TermValue::LicenseList(items) | TermValue::TagList(items) => items.serialize(serializer),
            TermValue::Unset => serializer.serialize_none(),
        }
    }
}

fn value_from_json(kind: TermKind, raw: &serde_json::Value) -> Result<TermValue, String> {
    match raw {
        serde_json::Value::Null => Ok(TermValue::Unset),
        serde_json::Value::Number(n) => {
            let v = n
                .as_i64()
                .ok_or_else(|| format!("{kind}: non-integer scalar {n}"))?;
            i8::try_from(v)
                .map(TermValue::Scalar)
                .map_err(|_| format!("{kind}: scalar {v} out of range"))
        }
        serde_json::Value::Array(items) => {
            let mut entries = Vec::with_capacity(items.len());
            for item in items {
                match item.as_str() {
                    Some(s) => entries.push(s.to_string()),
                    None => return Err(format!("{kind}: non-string list entry {item}")),
                }
            }
            Ok(if kind.is_license_list() {
                TermValue::license_list(entries)
            } else {
                TermValue::tag_list(entries)
            })
        }
        other => Err(format!("{kind}: unsupported value {other}")),
    }
}

#[derive(Serialize, Deserialize)]
struct TermVectorWire {
    schema_version: u32,
    terms: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    provenance: BTreeMap<String, Provenance>,
}

impl Serialize for TermVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| {
                let raw = serde_json::to_value(v).map_err(serde::ser::Error::custom)?;
                Ok((k.name().to_string(), raw))
            })
            .collect::<Result<BTreeMap<_, _>, S::Error>>()?;
        let provenance = self
            .provenance
            .iter()
            .map(|(k, p)| (k.name().to_string(), *p))
            .collect();
        TermVectorWire {
            schema_version: SCHEMA_VERSION,
            terms,
            provenance,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TermVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = TermVectorWire::deserialize(deserializer)?;
        if wire.schema_version != SCHEMA_VERSION {
            return Err(D::Error::custom(format!(
                "unsupported term vector schema_version {}",
                wire.schema_version
            )));
        }
        let mut vector = TermVector::empty();
        for (name, raw) in &wire.terms {
            let kind = TermKind::from_name(name)
                .ok_or_else(|| D::Error::custom(format!("unknown term kind: {name}")))?;
            let value = value_from_json(kind, raw).map_err(D::Error::custom)?;
            vector.terms.insert(kind, value);
        }
        for (name, prov) in &wire.provenance {
            let kind = TermKind::from_name(name)
                .ok_or_else(|| D::Error::custom(format!("unknown term kind: {name}")))?;
            vector.provenance.insert(kind, *prov);
        }
        for kind in vector.terms.keys() {
            vector.provenance.entry(*kind).or_insert(Provenance::Default);
        }
        Ok(vector)
    }
}

/// Parse a bare term map (no schema envelope), as used by knowledge-base
/// annotation files. Every kind must be present.
pub fn term_map_from_json(
    terms: &BTreeMap<String, serde_json::Value>,
) -> Result<TermVector, String> {
    let mut vector = TermVector::empty();
    for (name, raw) in terms {
        let kind = TermKind::from_name(name).ok_or_else(|| format!("unknown term kind: {name}"))?;
        let value = value_from_json(kind, raw)?;
        vector.set(kind, value, Provenance::KnowledgeBaseReuse);
    }
    let violations = vector.validate();
    if violations.is_empty() {
        Ok(vector)
    } else {
        Err(violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; "))
    }
}
