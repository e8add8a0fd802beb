use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported block size {0} (expected 64, 256 or 512)")]
    UnsupportedBlockSize(u64),

    #[error("capacity exceeded: {requested} exceeds the limit of {limit}")]
    Capacity { requested: u64, limit: u64 },

    #[error("count {value} at index {index} exceeds the block size {block_bits}")]
    Domain { index: usize, value: u64, block_bits: u64 },

    #[error("position {index} out of range for a universe of {len} bits")]
    OutOfRange { index: u64, len: u64 },

    #[error("select({k}) out of range: the bitmap holds {ones} set bits")]
    SelectOutOfRange { k: u64, ones: u64 },

    #[error("invalid bitmap file: {0}")]
    Format(String),

    #[error("unknown {kind} name `{name}`")]
    UnknownName { kind: &'static str, name: String },
}
