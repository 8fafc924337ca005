//! Bundled SPDX identifier table, PyPI trove classifier mapping, and
//! detection of license references in short notices and metadata fields.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::fingerprint::normalize;
use crate::model::LicenseId;

const SPDX_IDS_JSON: &str = include_str!("../data/spdx_ids.json");
const CLASSIFIER_MAP_JSON: &str = include_str!("../data/classifier_map.json");

#[derive(Debug, Deserialize)]
struct SpdxEntryWire {
    id: String,
    name: String,
    #[serde(default)]
    aliases: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct FamilyWire {
    pattern: String,
    family: String,
}

#[derive(Debug, Deserialize)]
struct SpdxTableWire {
    licenses: Vec<SpdxEntryWire>,
    ambiguous_families: Vec<FamilyWire>,
}

#[derive(Debug, Deserialize)]
struct ClassifierWire {
    classifier: String,
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    family: Option<String>,
}

#[derive(Debug, Deserialize)]
struct ClassifierMapWire {
    classifiers: Vec<ClassifierWire>,
}

/// One known license identifier.
#[derive(Debug, Clone)]
pub struct SpdxEntry {
    pub id: String,
    pub name: String,
    pub aliases: Vec<String>,
}

/// What a classifier string or short reference resolved to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Detection {
    /// A specific identifier from the bundled table.
    Id(LicenseId),
    /// A recognizable license family without a usable version
    /// (e.g. a bare "BSD").
    AmbiguousFamily(String),
}

/// The bundled identifier table.
pub struct SpdxTable {
    entries: Vec<SpdxEntry>,
    // normalized alias text -> entry index
    by_alias: BTreeMap<String, usize>,
    // normalized family pattern -> family name
    families: BTreeMap<String, String>,
    // normalized classifier -> detection
    classifiers: BTreeMap<String, Detection>,
}

impl SpdxTable {
    fn build() -> SpdxTable {
        let wire: SpdxTableWire =
            serde_json::from_str(SPDX_IDS_JSON).expect("bundled spdx_ids.json is valid");
        let classifier_wire: ClassifierMapWire =
            serde_json::from_str(CLASSIFIER_MAP_JSON).expect("bundled classifier_map.json is valid");

        let entries: Vec<SpdxEntry> = wire
            .licenses
            .into_iter()
            .map(|e| SpdxEntry {
                id: e.id,
                name: e.name,
                aliases: e.aliases,
            })
            .collect();

        let mut by_alias = BTreeMap::new();
        for (i, entry) in entries.iter().enumerate() {
            by_alias.insert(normalize(&entry.id).as_str().to_string(), i);
            for alias in &entry.aliases {
                by_alias
                    .entry(normalize(alias).as_str().to_string())
                    .or_insert(i);
            }
        }

        let families = wire
            .ambiguous_families
            .into_iter()
            .map(|f| (normalize(&f.pattern).as_str().to_string(), f.family))
            .collect();

        let mut classifiers = BTreeMap::new();
        for c in classifier_wire.classifiers {
            let key = normalize(&c.classifier).as_str().to_string();
            let detection = match (c.id, c.family) {
                (Some(id), _) => {
                    let entry = entries
                        .iter()
                        .find(|e| e.id == id)
                        .unwrap_or_else(|| panic!("classifier maps to unknown id {id}"));
                    Detection::Id(LicenseId::canonical(&entry.id, &entry.name))
                }
                (None, Some(family)) => Detection::AmbiguousFamily(family),
                (None, None) => continue,
            };
            classifiers.insert(key, detection);
        }

        SpdxTable {
            entries,
            by_alias,
            families,
            classifiers,
        }
    }

    pub fn entries(&self) -> &[SpdxEntry] {
        &self.entries
    }

    /// Exact lookup by identifier or alias, case- and punctuation-insensitive.
    pub fn lookup(&self, s: &str) -> Option<&SpdxEntry> {
        let key = normalize(s);
        self.by_alias.get(key.as_str()).map(|i| &self.entries[*i])
    }

    /// Identity for an identifier string: canonical when it is in the table,
    /// otherwise the `unknown:<raw>` sentinel.
    pub fn license_id(&self, s: &str) -> LicenseId {
        match self.lookup(s) {
            Some(entry) => LicenseId::canonical(&entry.id, &entry.name),
            None => LicenseId::unknown(s),
        }
    }

    /// Resolve a PyPI trove classifier string.
    pub fn classify_classifier(&self, classifier: &str) -> Option<Detection> {
        self.classifiers
            .get(normalize(classifier).as_str())
            .cloned()
    }

    /// Detect a license reference in a short notice or metadata field.
    ///
    /// Tries an `SPDX-License-Identifier:` tag, then the longest
    /// alias/identifier match on word boundaries, then ambiguous family
    /// patterns. Intended for reference components and metadata fields, not
    /// full license texts.
    pub fn detect_reference(&self, text: &str) -> Option<Detection> {
        if let Some(tag_pos) = text.to_lowercase().find("spdx-license-identifier") {
            let after = &text[tag_pos + "spdx-license-identifier".len()..];
            let token = after
                .trim_start_matches([':', ' ', '\t'])
                .split_whitespace()
                .next();
            if let Some(token) = token {
                if let Some(entry) = self.lookup(token) {
                    return Some(Detection::Id(LicenseId::canonical(&entry.id, &entry.name)));
                }
            }
        }

        let haystack = format!(" {} ", normalize(text).as_str());
        let mut best: Option<(usize, &str, usize)> = None; // (alias_len, alias, entry idx)
        for (alias, idx) in &self.by_alias {
            if alias.is_empty() {
                continue;
            }
            let needle = format!(" {alias} ");
            if haystack.contains(&needle) {
                let better = match best {
                    Some((len, prev, _)) => {
                        alias.len() > len || (alias.len() == len && alias.as_str() < prev)
                    }
                    None => true,
                };
                if better {
                    best = Some((alias.len(), alias, *idx));
                }
            }
        }
        if let Some((_, _, idx)) = best {
            let entry = &self.entries[idx];
            return Some(Detection::Id(LicenseId::canonical(&entry.id, &entry.name)));
        }

        let mut best_family: Option<(usize, &str)> = None;
        for (pattern, family) in &self.families {
            let needle = format!(" {pattern} ");
            if haystack.contains(&needle) {
                let better = match best_family {
                    Some((len, _)) => pattern.len() > len,
                    None => true,
                };
                if better {
                    best_family = Some((pattern.len(), family));
                }
            }
        }
        best_family.map(|(_, family)| Detection::AmbiguousFamily(family.to_string()))
    }
}

/// Shared table instance parsed from the bundled data files.
pub fn table() -> &'static SpdxTable {
    static TABLE: OnceLock<SpdxTable> = OnceLock::new();
    TABLE.get_or_init(SpdxTable::build)
}
