use crate::bitcore::Bit;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unsupported L0 block size {0} (expected 512, 1024 or 2048)")]
    UnsupportedBlockSize(usize),
    #[error("unsupported summary tree depth {0} (expected 2 or 3)")]
    UnsupportedLevels(u8),
    #[error("bit vector must not be empty")]
    EmptyBitVector,
    #[error("bit vector of {0} bits overflows the 47-bit L2 counter")]
    TooLong(usize),
    #[error("scan threshold alpha = {0} must be a power of two in 2..=64")]
    InvalidAlpha(usize),
    #[error("sample rates a = {a}, b = {b} must be powers of two with 1 <= b <= a")]
    InvalidSampleRates { a: usize, b: usize },
    #[error("parameter formula needs at least one sampled bit")]
    NoSampledBits,
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("rank index {index} out of range 0..={len}")]
    RankOutOfRange { index: usize, len: usize },
    #[error("select{bit} index {index} out of range 0..{count}")]
    SelectOutOfRange {
        bit: Bit,
        index: usize,
        count: usize,
    },
    #[error("select{0} support was not built")]
    SelectDisabled(Bit),
    #[error(
        "sample tree invariant violated: rank {rank} not within {budget} superblock(s) of superblock {start}"
    )]
    InvariantViolated {
        start: usize,
        rank: usize,
        budget: usize,
    },
    #[error("malformed component: {0}")]
    Malformed(&'static str),
}
