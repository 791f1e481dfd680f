use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema mismatch: set over {found} attributes used with a schema of {expected}")]
    SchemaMismatch { expected: usize, found: usize },

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("lower bound {lower} is not contained in upper bound {upper}")]
    NotAnInterval { lower: String, upper: String },

    #[error("inconsistent base: example {example} cannot absorb implication {implication}")]
    Inconsistent {
        example: String,
        implication: String,
    },

    #[error("example {example} has no compatible completion")]
    NoCompletion { example: String },

    #[error("refusing to enumerate 2^{attributes} sets (limit is 2^{limit})")]
    EnumerationLimit { attributes: usize, limit: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("domain member {member} violates the background knowledge")]
    DomainOutsideBackground { member: String },

    #[error("corrupt journal at seq {seq}: {reason}")]
    CorruptJournal { seq: u64, reason: String },

    #[error("expert answer rejected ({reason}): {message}")]
    Rejected {
        reason: crate::engine::RejectReason,
        message: String,
    },

    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
