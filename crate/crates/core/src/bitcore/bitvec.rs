use alloc::vec;
use alloc::vec::Vec;

use super::low_mask;
use crate::{Error, Result};

/// A plain sequence of `len` bits packed into 64-bit words.
///
/// Bits at positions `>= len` in the last word are always zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        v.clear_tail();
        v
    }

    /// Builds a vector whose bit `i` is `f(i)`.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for (w, word) in words.iter_mut().enumerate() {
            let base = w * 64;
            let end = (base + 64).min(len);
            let mut acc = 0u64;
            for i in base..end {
                acc |= (f(i) as u64) << (i - base);
            }
            *word = acc;
        }
        Self { words, len }
    }

    /// Wraps raw words. Fails if the word count does not match `len` or a bit
    /// past `len` is set.
    pub fn from_words(words: Vec<u64>, len: usize) -> Result<Self> {
        if words.len() != len.div_ceil(64) {
            return Err(Error::Malformed(
                "bit vector word count does not match its length",
            ));
        }
        let v = Self { words, len };
        if let Some(&last) = v.words.last() {
            if last & !low_mask(v.tail_bits()) != 0 {
                return Err(Error::Malformed("bit vector has bits set past its length"));
            }
        }
        Ok(v)
    }

    fn tail_bits(&self) -> u32 {
        match self.len % 64 {
            0 => 64,
            r => r as u32,
        }
    }

    fn clear_tail(&mut self) {
        let tail = self.tail_bits();
        if let Some(last) = self.words.last_mut() {
            *last &= low_mask(tail);
        }
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
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn into_words(self) -> Vec<u64> {
        self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    pub fn push(&mut self, value: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let iter = iter.into_iter();
        let mut v = BitVector {
            words: Vec::with_capacity(iter.size_hint().0.div_ceil(64)),
            len: 0,
        };
        for b in iter {
            v.push(b);
        }
        v
    }
}
