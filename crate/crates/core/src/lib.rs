//! Common-author overlap analysis for grouped bibliographic records.
//!
//! The pipeline starts from exported record files (one file per "area" — a
//! keyword pull, a journal, any grouping of publications), reduces each to a
//! deduplicated list of author identities, and then measures how strongly
//! areas are related by the authors they share:
//!
//! 1. [`ingest`] — parse record exports and normalize author names into
//!    comparable keys.
//! 2. [`prob`] — convert a raw common-author count between two lists of
//!    sizes `n <= m` into a size-adjusted matching probability.
//! 3. [`overlap`] — assemble the pairwise comparison matrix for a set of
//!    areas.
//! 4. [`mc`] — simulate the exact sequential matching process to quantify
//!    the error of the closed-form approximation.
//! 5. [`stats`] — estimate the name-homonymy noise floor from cross-domain
//!    comparisons and summarize probability distributions.
//! 6. [`network`] — subtract the noise floor to obtain link strengths and
//!    export weighted relatedness graphs.
//!
//! [`synth`] generates planted two-domain datasets for end-to-end
//! validation, and [`report`] renders the comparative statistics table.

pub mod ingest;
pub mod mc;
pub mod network;
pub mod overlap;
pub mod prob;
pub mod report;
pub mod stats;
pub mod synth;

pub use ingest::{build_area_list, normalize_author, parse_records, AreaAuthorList, AuthorKey, FormatSpec, RawRecord};
pub use overlap::{count_common, overlap_matrix, OverlapMatrix, PairOverlap};
pub use prob::{estimate_p, expected_matches};
pub use stats::{cross_noise_sample, summarize, within_sample, DistributionSummary, NoiseModel, ProbabilitySample};

/// Errors produced by the analysis pipeline.
///
/// `Format`, `Normalization` and `Config` describe bad input data;
/// `Domain`, `Undefined` and `Capacity` describe invalid numerical
/// requests. The CLI maps the two groups to distinct exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Structurally invalid input file.
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    /// An author string with no usable letters. Callers are expected to
    /// skip the record and log the raw string.
    #[error("cannot normalize author string {raw:?}")]
    Normalization { raw: String },

    /// Inconsistent configuration (duplicate area names, unknown domain, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested quantity is undefined for these inputs
    /// (zero-size list, zero noise median, ...).
    #[error("undefined: {0}")]
    Undefined(String),

    /// The request exceeds a resource guard.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format { line, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
