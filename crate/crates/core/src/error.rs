use crate::estimator::{CollectionMeta, ValidationReport};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("collection has no cases")]
    EmptyCollection,

    #[error("capability violation: {0}")]
    Capability(ValidationReport),

    #[error("estimator has not been fitted")]
    NotFitted,

    #[error("schema mismatch: fitted on {fitted:?}, got {found:?}")]
    SchemaMismatch {
        fitted: Box<CollectionMeta>,
        found: Box<CollectionMeta>,
    },

    #[error("schema mismatch: model expects {expected} features, got {found}")]
    FeatureWidth { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("inconsistent inputs: {0}")]
    Consistency(String),

    #[error("channel mismatch: {left} vs {right}")]
    ChannelMismatch { left: usize, right: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("band with window {window} admits no path between lengths {n} and {m}")]
    InfeasibleBand { window: f64, n: usize, m: usize },

    #[error("operation not supported for distance kind {0}")]
    UnsupportedKind(&'static str),

    #[error("pad target length {target} shorter than case length {length}")]
    TargetTooShort { target: usize, length: usize },

    #[error("series length {length} below required minimum {minimum}")]
    SeriesTooShort { length: usize, minimum: usize },

    #[error("all features have zero variance")]
    DegenerateFeatures,

    #[error("label kind mismatch: {0}")]
    KindMismatch(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("scale denominator is zero")]
    DegenerateScale,

    #[error("invalid distance spec: {0}")]
    InvalidSpec(String),

    #[error("case {index}: {source}")]
    Case {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Strips any `Case` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Case { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_capability(&self) -> bool {
        matches!(
            self.root(),
            Error::Capability(_) | Error::SchemaMismatch { .. } | Error::FeatureWidth { .. }
        )
    }
}
