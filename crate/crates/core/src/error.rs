use alloc::string::String;

use thiserror::Error;

/// Errors raised by core operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown profile id `{0}`")]
    UnknownProfile(String),
    #[error("duplicate profile id `{0}`")]
    DuplicateProfile(String),
    #[error("invalid record `{id}`: {reason}")]
    InvalidRecord { id: String, reason: String },
    #[error("empty seed term list")]
    EmptySeedTerms,
    #[error("profile `{id}` has {count} tweets, above the cap of {cap}")]
    TweetCapExceeded { id: String, count: usize, cap: usize },
    #[error("empty block set")]
    EmptyBlockSet,
    #[error("unknown feature block `{0}`")]
    UnknownBlock(String),
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("single-class input")]
    SingleClass,
    #[error("vocabulary fingerprint mismatch: expected {expected}, found {found}")]
    FingerprintMismatch { expected: String, found: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("unknown hyperparameter `{key}` for {algorithm}")]
    UnknownHyperparam { algorithm: String, key: String },
    #[error("invalid value for hyperparameter `{key}`: {reason}")]
    InvalidHyperparam { key: String, reason: String },
    #[error("invalid fold count k={0}; need k >= 2")]
    InvalidFoldCount(usize),
    #[error("class `{class}` has {size} members, fewer than k={k}")]
    ClassTooSmall { class: String, size: usize, k: usize },
    #[error("empty lexicon")]
    EmptyLexicon,
    #[error("fixture entry `{key}`: {reason}")]
    InvalidFixture { key: String, reason: String },
    #[error("malformed fingerprint `{0}`")]
    MalformedFingerprint(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
