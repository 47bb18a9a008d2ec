use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("machine index {idx} out of range: space {space} holds {total} machines")]
    IndexOutOfRange { idx: u64, space: String, total: u64 },

    #[error("rule space {space} is too large to enumerate (count exceeds u64)")]
    SpaceTooLarge { space: String },

    #[error("no known halting cutoff for space {space}; an explicit cutoff is required")]
    CutoffRequired { space: String },

    #[error("invalid rule space: {0}")]
    InvalidSpace(String),

    #[error("distribution has no halting machines")]
    NoHaltingMachines,

    #[error("distribution is degenerate: {0}")]
    DegenerateDistribution(String),

    #[error("no observed block of shape {shape}; completion has no maximum to extend")]
    MissingShapeClass { shape: String },

    #[error("block shape {shape} exceeds table base shape {base}; decompose the object instead")]
    ShapeExceedsBase { shape: String, base: String },

    #[error("block {key} not present in table")]
    BlockNotInTable { key: String },

    #[error("table metadata mismatch: expected {expected}, found {found}")]
    MetadataMismatch { expected: String, found: String },

    #[error("table checksum mismatch: header {expected}, computed {computed}")]
    ChecksumMismatch { expected: String, computed: String },

    #[error("{path}:{line}: {msg}")]
    ParseError {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("object below block size: {0}")]
    ObjectBelowBlockSize(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported for tensors of dimension {dims}: {what}")]
    UnsupportedTensor { dims: usize, what: String },

    #[error("table has no complexity spread (max equals min)")]
    NoComplexitySpread,

    #[error("range error: {0}")]
    Range(String),

    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("rank correlation undefined for constant input ({0})")]
    ConstantInput(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("line graph undefined for an edgeless graph")]
    EdgelessGraph,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
