use alloc::vec;
use alloc::vec::Vec;

use super::{low_mask, read_bits, write_bits};
use crate::{Error, Result};

/// Fixed-width bit-compressed integer array.
///
/// Element `i` occupies bits `i * width .. (i + 1) * width` of a little-endian
/// word stream, so an element may straddle two words. `width == 0` stores
/// nothing and reads back zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PackedArray {
    width: u32,
    len: usize,
    words: Vec<u64>,
}

impl PackedArray {
    pub fn new(width: u32, len: usize) -> Self {
        assert!(width <= 64, "packed width {width} exceeds 64");
        Self {
            width,
            len,
            words: vec![0; (len * width as usize).div_ceil(64)],
        }
    }

    pub fn from_values(width: u32, values: &[u64]) -> Self {
        let mut arr = Self::new(width, values.len());
        for (i, &v) in values.iter().enumerate() {
            arr.set(i, v);
        }
        arr
    }

    pub fn from_words(width: u32, len: usize, words: Vec<u64>) -> Result<Self> {
        if width > 64 {
            return Err(Error::Malformed("packed array width exceeds 64"));
        }
        let bits = len
            .checked_mul(width as usize)
            .ok_or(Error::Malformed("packed array length overflows"))?;
        if words.len() != bits.div_ceil(64) {
            return Err(Error::Malformed(
                "packed array word count does not match its length",
            ));
        }
        Ok(Self { width, len, words })
    }

    #[inline(always)]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        read_bits(&self.words, i * self.width as usize, self.width)
    }

    pub fn set(&mut self, i: usize, value: u64) {
        assert!(
            i < self.len,
            "packed index {i} out of range for length {}",
            self.len
        );
        assert!(
            value <= low_mask(self.width),
            "value {value} does not fit in {} bits",
            self.width
        );
        write_bits(&mut self.words, i * self.width as usize, self.width, value);
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Payload size, `len * width`, without word rounding.
    pub fn bit_len(&self) -> u64 {
        self.len as u64 * self.width as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// Append-only bit stream for records of mixed field widths.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitBuf {
    words: Vec<u64>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Result<Self> {
        if words.len() != len.div_ceil(64) {
            return Err(Error::Malformed(
                "bit stream word count does not match its length",
            ));
        }
        Ok(Self { words, len })
    }

    pub fn push(&mut self, width: u32, value: u64) {
        debug_assert!(width <= 64 && value <= low_mask(width));
        let end = self.len + width as usize;
        if end.div_ceil(64) > self.words.len() {
            self.words.resize(end.div_ceil(64), 0);
        }
        write_bits(&mut self.words, self.len, width, value);
        self.len = end;
    }

    #[inline(always)]
    pub fn read(&self, offset: usize, width: u32) -> u64 {
        debug_assert!(offset + width as usize <= self.len);
        read_bits(&self.words, offset, width)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}
