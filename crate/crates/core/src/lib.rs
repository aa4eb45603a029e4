//! Diversity auditing for instruction corpora.
//!
//! The crate is split by concern: [`text`] and [`model`] hold records and
//! normalization, [`ingest`] reads and writes every on-disk format,
//! [`lexical`], [`semantic`] and [`structural`] compute metrics, and
//! [`audit`] samples, aggregates and serializes reports.

pub mod audit;
pub mod error;
pub mod ingest;
pub mod lexical;
pub mod lexicons;
pub mod model;
pub mod semantic;
pub mod stats;
pub mod structural;
pub mod text;

pub use error::{Error, Result};
pub use model::{align_annotations, compute_stats, unique_sentences, Corpus, CorpusStats, InstructionRecord};
pub use text::{normalize_text, Cleaner};
