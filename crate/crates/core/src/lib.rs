//! License variant analysis: structured license modeling, text fingerprinting,
//! diff-driven parsing with knowledge reuse, pairwise compatibility checking,
//! and dependency-graph compliance scanning.
//!
//! The crate is organized around a pipeline:
//!
//! 1. [`fingerprint`] and [`textproc`] provide text normalization, Winnowing
//!    similarity, sentence segmentation, and sentence-level diffing.
//! 2. [`kb`] stores an annotated corpus of standard licenses whose term values
//!    can be reused for unchanged text.
//! 3. [`gateway`] abstracts embedding and instruction-following model services
//!    (with deterministic offline implementations).
//! 4. [`parser`] turns a license text into a [`model::TermVector`], sending
//!    only novel sentences to the model.
//! 5. [`compat`] decides secondary/combinative compatibility for an ordered
//!    license pair.
//! 6. [`depgraph`] and [`pipeline`] resolve package dependency trees and scan
//!    them for incompatibilities.

pub mod compat;
pub mod depgraph;
pub mod fingerprint;
pub mod gateway;
pub mod kb;
pub mod model;
pub mod parser;
pub mod pipeline;
pub mod spdx;
pub mod textproc;
