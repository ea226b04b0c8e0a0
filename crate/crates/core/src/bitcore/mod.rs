//! Bit storage and word-level primitives shared by every other module.
//!
//! Bit `i` of a sequence lives in word `i / 64` at bit `i % 64`, counted from
//! the least significant bit.

mod bitvec;
mod packed;
mod word;

use core::fmt;

pub use bitvec::BitVector;
pub use packed::{BitBuf, PackedArray};
pub use word::{
    bits_for_range, floor_log2, low_mask, popcount_word, rank_word_prefix, read_bits,
    select_in_word, select_in_word_portable, write_bits,
};

/// Which bit value a rank/select structure counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    /// Flips `word` so that the bits of this value read as 1-bits.
    #[inline(always)]
    pub fn normalize(self, word: u64) -> u64 {
        match self {
            Bit::One => word,
            Bit::Zero => !word,
        }
    }

    pub fn as_u64(self) -> u64 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn from_u64(v: u64) -> Option<Self> {
        match v {
            0 => Some(Bit::Zero),
            1 => Some(Bit::One),
            _ => None,
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u64())
    }
}
