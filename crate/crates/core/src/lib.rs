//! Multilingual legal parallel corpus toolkit.
//!
//! Documents identified by CELEX code are normalized into numbered
//! paragraphs, serialized as TEI-shaped XML, aligned pairwise by a
//! length-based and a lexicon-bootstrapped aligner, and exported as
//! stand-off pointer files, in-place bitexts and corpus statistics.

pub mod align;
pub mod celex;
pub mod config;
pub mod ingest;
pub mod lang;
pub mod pipeline;
pub mod standoff;
pub mod stats;
pub mod tei;

pub use celex::{format_celex, parse_celex, CelexId, Endpoint};
