use alloc::vec::Vec;

use crate::bitcore::{BitBuf, PackedArray};
use crate::{Error, Result};

pub const TAG_BITS: u8 = 0x01;
pub const TAG_L1: u8 = 0x02;
pub const TAG_L2: u8 = 0x03;
/// Base tag of the 1-bit sample tree; tree-local tags are added to it.
pub const TAG_SEL1: u8 = 0x10;
/// Base tag of the 0-bit sample tree.
pub const TAG_SEL0: u8 = 0x20;

pub const SUB_PARAMS: u8 = 0;
pub const SUB_TOP: u8 = 1;
pub const SUB_MID: u8 = 2;
pub const SUB_COUNTERS: u8 = 3;
pub const SUB_BOT: u8 = 4;
pub const SUB_PARAMS2: u8 = 8;
pub const SUB_TOP2: u8 = 9;
pub const SUB_DENSE: u8 = 10;

/// One raw component of a [`RankSelect`](super::RankSelect): `len` elements
/// of `width` bits packed into little-endian words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub tag: u8,
    pub width: u8,
    pub len: u64,
    pub words: Vec<u64>,
}

impl Part {
    pub fn new(tag: u8, width: u8, len: u64, words: Vec<u64>) -> Self {
        Self {
            tag,
            width,
            len,
            words,
        }
    }

    pub fn from_packed(tag: u8, arr: &PackedArray) -> Self {
        Self::new(
            tag,
            arr.width() as u8,
            arr.len() as u64,
            arr.words().to_vec(),
        )
    }

    pub fn from_bitbuf(tag: u8, buf: &BitBuf) -> Self {
        Self::new(tag, 1, buf.len() as u64, buf.words().to_vec())
    }

    pub fn from_u64s(tag: u8, values: &[u64]) -> Self {
        Self::new(tag, 64, values.len() as u64, values.to_vec())
    }

    /// Payload words implied by `len` and `width`.
    pub fn expected_words(&self) -> Option<usize> {
        let bits = self.len.checked_mul(self.width as u64)?;
        usize::try_from(bits.div_ceil(64)).ok()
    }

    pub fn to_packed(&self) -> Result<PackedArray> {
        PackedArray::from_words(self.width as u32, self.usize_len()?, self.words.clone())
    }

    pub fn to_bitbuf(&self) -> Result<BitBuf> {
        if self.width != 1 {
            return Err(Error::Malformed("bit stream component must have width 1"));
        }
        BitBuf::from_words(self.words.clone(), self.usize_len()?)
    }

    pub fn usize_len(&self) -> Result<usize> {
        usize::try_from(self.len).map_err(|_| Error::Malformed("component length overflows"))
    }
}

/// Cursor over a part list that hands out components in the order they were
/// written.
pub(crate) struct PartReader<'a> {
    parts: &'a [Part],
    pos: usize,
}

impl<'a> PartReader<'a> {
    pub(crate) fn new(parts: &'a [Part]) -> Self {
        Self { parts, pos: 0 }
    }

    pub(crate) fn next(&mut self, tag: u8) -> Result<&'a Part> {
        let part = self
            .parts
            .get(self.pos)
            .ok_or(Error::Malformed("missing component"))?;
        if part.tag != tag {
            return Err(Error::Malformed("unexpected component tag"));
        }
        self.pos += 1;
        Ok(part)
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if self.pos == self.parts.len() {
            Ok(())
        } else {
            Err(Error::Malformed("trailing components"))
        }
    }
}
