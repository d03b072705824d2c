//! Multi-granular labelling of source repositories.
//!
//! Files are parsed into identifier term bags, scored against a weighted
//! keyword taxonomy by labelling functions, filtered by Jensen-Shannon
//! distance from the uniform distribution, and then rolled up into package-
//! and project-level label distributions.
//!
//! The pipeline stages live in their own modules:
//!
//! - [`taxonomy`]: label set, keyword weights and the IDF index
//! - [`ingest`]: git checkout, file enumeration and package derivation
//! - [`extract`]: grammar-aware identifier extraction and tokenization
//! - [`annotate`]: labelling functions, divergence filter, transforms, ensembles
//! - [`aggregate`]: package and project roll-ups
//! - [`persist`]: canonical JSON files and the relational store
//! - [`evaluate`]: Recall@k and hit-rate metrics against ground truth
//! - [`pipeline`]: the end-to-end run shared by the CLI and the HTTP API

pub mod aggregate;
pub mod annotate;
pub mod config;
pub mod evaluate;
pub mod extract;
pub mod ingest;
pub mod language;
pub mod persist;
pub mod pipeline;
pub mod taxonomy;

pub use language::Language;
pub use taxonomy::{KeywordIndex, Label, LabelId, Taxonomy};

/// Version string stamped into every analysis result.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
