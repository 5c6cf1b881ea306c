//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Syntax error in a line-oriented input file.
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("duplicate term id `{id}`")]
    DuplicateTermId { id: String },

    #[error("tree number `{tree_number}` assigned to both `{first}` and `{second}`")]
    DuplicateTreeNumber {
        tree_number: String,
        first: String,
        second: String,
    },

    #[error("term `{id}` has no tree numbers")]
    EmptyTreeNumbers { id: String },

    /// The prefix-derived parent relation must be acyclic; terms with several
    /// tree numbers can otherwise end up above and below each other.
    #[error("term `{id}` is its own ancestor in the derived hierarchy")]
    HierarchyCycle { id: String },

    #[error("unknown term id `{id}`")]
    UnknownTerm { id: String },

    #[error("record `{doc_id}` references unknown term `{term_id}`")]
    UnknownRecordTerm { doc_id: String, term_id: String },

    #[error("record `{doc_id}` has no term annotations")]
    EmptyRecord { doc_id: String },

    #[error("record `{doc_id}` annotates the same term twice")]
    DuplicateAnnotation { doc_id: String },

    #[error("duplicate document id `{doc_id}`")]
    DuplicateDocId { doc_id: String },

    #[error("unknown document id `{doc_id}`")]
    UnknownDocument { doc_id: String },

    #[error("the IC-weighted graph variant requires an information-content table")]
    MissingIcTable,

    #[error("no path between `{a}` and `{b}` (virtual root disabled)")]
    Unreachable { a: String, b: String },

    #[error("relevance grade `{value}` outside 0..=2")]
    InvalidGrade { value: String },

    #[error("topic threshold {0} outside (0, 1]")]
    InvalidThreshold(f64),

    #[error("effect size requires two non-empty groups")]
    EmptyGroup,

    #[error("histogram range [{lo}, {hi}] is empty or inverted")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("histogram needs at least one bin")]
    ZeroBins,

    #[error("no topic has {sample_size} documents in both grade classes")]
    NoEligibleTopics { sample_size: usize },

    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("not an index file (bad magic)")]
    BadMagic,

    #[error("unsupported index version {found} (this build reads version {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("index checksum mismatch; file is corrupt or truncated")]
    ChecksumMismatch,

    #[error("index encoding: {0}")]
    IndexEncoding(String),
}
