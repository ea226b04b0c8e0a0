//! Naive rank/select used as ground truth in tests.
//!
//! Nothing here shares code with the indexed structures: every answer comes
//! from reading bits one at a time.

use alloc::vec::Vec;

use crate::{Bit, BitVector};

fn matches(v: &BitVector, p: usize, bit: Bit) -> bool {
    v.get(p) == (bit == Bit::One)
}

/// Number of `bit`-bits in `v[0..i)`, by a linear scan.
pub fn naive_rank(v: &BitVector, bit: Bit, i: usize) -> usize {
    assert!(i <= v.len(), "rank index {i} out of range 0..={}", v.len());
    (0..i).filter(|&p| matches(v, p, bit)).count()
}

/// Position of the `bit`-bit with 0-based rank `i`, or `None`.
pub fn naive_select(v: &BitVector, bit: Bit, i: usize) -> Option<usize> {
    (0..v.len()).filter(|&p| matches(v, p, bit)).nth(i)
}

/// Per-block popcounts of `v` and their running totals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCounts {
    /// 1-bits in each block of `block_size` bits (the last may be partial).
    pub counts: Vec<usize>,
    /// `before[t]`: 1-bits in blocks `0..t`; one longer than `counts`.
    pub before: Vec<usize>,
}

impl BlockCounts {
    /// Inclusive running totals restarted every `group` blocks, e.g. L0
    /// prefixes within each L1-block.
    pub fn within_groups(&self, group: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.counts.len());
        let mut acc = 0;
        for (t, &c) in self.counts.iter().enumerate() {
            if t % group == 0 {
                acc = 0;
            }
            acc += c;
            out.push(acc);
        }
        out
    }
}

/// Block popcounts at any granularity `block_size >= 1`.
pub fn naive_block_counts(v: &BitVector, block_size: usize) -> BlockCounts {
    assert!(block_size >= 1);
    let mut counts = Vec::with_capacity(v.len().div_ceil(block_size));
    let mut before = Vec::with_capacity(counts.capacity() + 1);
    before.push(0);
    let mut start = 0;
    while start < v.len() {
        let end = (start + block_size).min(v.len());
        let c = (start..end).filter(|&p| v.get(p)).count();
        counts.push(c);
        before.push(before.last().unwrap() + c);
        start = end;
    }
    BlockCounts { counts, before }
}

/// Precomputed naive answers: sorted positions of both bit values.
#[derive(Clone, Debug)]
pub struct NaiveIndex {
    len: usize,
    ones: Vec<usize>,
    zeros: Vec<usize>,
}

impl NaiveIndex {
    pub fn new(v: &BitVector) -> Self {
        let mut ones = Vec::new();
        let mut zeros = Vec::new();
        for p in 0..v.len() {
            if v.get(p) {
                ones.push(p);
            } else {
                zeros.push(p);
            }
        }
        Self {
            len: v.len(),
            ones,
            zeros,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Sorted positions of every `bit`-bit.
    pub fn positions(&self, bit: Bit) -> &[usize] {
        match bit {
            Bit::One => &self.ones,
            Bit::Zero => &self.zeros,
        }
    }

    pub fn count(&self, bit: Bit) -> usize {
        self.positions(bit).len()
    }

    pub fn rank(&self, bit: Bit, i: usize) -> usize {
        assert!(i <= self.len);
        self.positions(bit).partition_point(|&p| p < i)
    }

    pub fn select(&self, bit: Bit, i: usize) -> usize {
        self.positions(bit)[i]
    }

    pub fn try_select(&self, bit: Bit, i: usize) -> Option<usize> {
        self.positions(bit).get(i).copied()
    }
}
