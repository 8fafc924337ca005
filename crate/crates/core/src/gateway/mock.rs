//! Deterministic offline reasoning backend (to be completed alongside the knowledge base).
