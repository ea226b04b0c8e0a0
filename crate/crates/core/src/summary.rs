//! The k-level summary tree (k = 2 or 3).
//!
//! Every 32 L0-blocks of `L0` bits form an L1-block whose counts fit in one
//! 512-bit record ([`L1Block`]). With `k = 3`, every 16 L1-blocks additionally
//! get a 512-bit [`L2Block`]. The largest block is the *superblock*; all
//! sample-tree offsets are counted in superblocks.
//!
//! `rank` reads one L1-block and at most `L0 / 64` words. `select` inside a
//! superblock reads one L2-block (k = 3), one L1-block and at most `L0 / 64`
//! words; [`SummaryTree::select_from`] adds a bounded linear scan over
//! superblock prefixes in front of that.

use alloc::vec::Vec;

use crate::bitcore::{rank_word_prefix, read_bits, select_in_word, write_bits, Bit, BitVector};
use crate::{Error, Result};

/// L0-blocks per L1-block.
pub const L0_PER_L1: usize = 32;
/// L1-blocks per L2-block.
pub const L1_PER_L2: usize = 16;

const DELTA_OFFSET: usize = 112;
const DELTA_BITS: u32 = 12;
const CUM_OFFSET: usize = DELTA_OFFSET + 24 * DELTA_BITS as usize;
const CUM_BITS: u32 = 16;

/// One cache line of L1 metadata.
///
/// Bit layout: `l1` (64) | reserved, zero (48) | 24 x 12-bit individual L0
/// counts | 7 x 16-bit cumulative L0 counts. L0-blocks `4t, 4t+1, 4t+2` carry
/// an individual count, block `4t+3` (t < 7) a cumulative one, and block 31 is
/// implied by the next block's `l1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[repr(C, align(64))]
pub struct L1Block {
    words: [u64; 8],
}

impl L1Block {
    /// Encodes a block from the 1-bits before it and its 32 L0 popcounts.
    pub fn new(l1: u64, l0_counts: &[u32; L0_PER_L1]) -> Self {
        let mut words = [0u64; 8];
        words[0] = l1;
        let mut cum = 0u32;
        for (t, &c) in l0_counts.iter().enumerate() {
            cum += c;
            let (q, r) = (t / 4, t % 4);
            if r < 3 {
                assert!(c < 1 << DELTA_BITS, "L0 count {c} overflows 12 bits");
                write_bits(
                    &mut words,
                    DELTA_OFFSET + (3 * q + r) * 12,
                    DELTA_BITS,
                    c as u64,
                );
            } else if q < 7 {
                assert!(
                    cum < 1 << CUM_BITS,
                    "cumulative L0 count {cum} overflows 16 bits"
                );
                write_bits(&mut words, CUM_OFFSET + q * 16, CUM_BITS, cum as u64);
            }
        }
        Self { words }
    }

    pub fn from_words(words: [u64; 8]) -> Self {
        Self { words }
    }

    pub fn words(&self) -> &[u64; 8] {
        &self.words
    }

    /// 1-bits before this L1-block.
    #[inline(always)]
    pub fn l1(&self) -> u64 {
        self.words[0]
    }

    /// Individual count `idx < 24` (L0-block `4 * (idx / 3) + idx % 3`).
    pub fn delta(&self, idx: usize) -> u32 {
        read_bits(&self.words, DELTA_OFFSET + idx * 12, DELTA_BITS) as u32
    }

    /// Cumulative count `q < 7`: 1-bits in L0-blocks `0..=4q+3`.
    #[inline(always)]
    pub fn cum(&self, q: usize) -> u32 {
        read_bits(&self.words, CUM_OFFSET + q * 16, CUM_BITS) as u32
    }

    /// 1-bits in L0-blocks `0..t` of this L1-block, `t < 32`.
    #[inline(always)]
    pub fn l0_prefix(&self, t: usize) -> u32 {
        let (q, r) = (t >> 2, t & 3);
        let base = if q == 0 { 0 } else { self.cum(q - 1) };
        if r == 0 {
            return base;
        }
        // the three individual counts of group q are adjacent
        let d = read_bits(&self.words, DELTA_OFFSET + q * 36, 36);
        let d0 = (d & 0xFFF) as u32;
        let d1 = (d >> 12 & 0xFFF) as u32;
        let d2 = (d >> 24 & 0xFFF) as u32;
        base + match r {
            1 => d0,
            2 => d0 + d1,
            _ => d0 + d1 + d2,
        }
    }

    /// All 32 inclusive cumulative L0 counts. `block_total` is the 1-count of
    /// the whole L1-block (next `l1` minus this `l1`), which supplies the
    /// value for L0-block 31.
    ///
    /// Each group of four lanes gets its three individual counts, is prefix
    /// summed in two shift-add steps and offset by the previous group's
    /// cumulative count.
    #[inline]
    pub fn cumulative_l0_counts(&self, block_total: u32) -> [u32; L0_PER_L1] {
        let mut lanes = [0u32; L0_PER_L1];
        let mut base = [0u32; L0_PER_L1];
        let mut tail = [0u32; L0_PER_L1];
        for q in 0..8 {
            let d = read_bits(&self.words, DELTA_OFFSET + q * 36, 36);
            lanes[4 * q] = (d & 0xFFF) as u32;
            lanes[4 * q + 1] = (d >> 12 & 0xFFF) as u32;
            lanes[4 * q + 2] = (d >> 24 & 0xFFF) as u32;
            let prev = if q == 0 { 0 } else { self.cum(q - 1) };
            let own = if q < 7 { self.cum(q) } else { block_total };
            base[4 * q..4 * q + 3].fill(prev);
            tail[4 * q + 3] = own;
        }
        for step in [1usize, 2] {
            let shifted = lanes;
            for t in 0..L0_PER_L1 {
                if t % 4 >= step {
                    lanes[t] += shifted[t - step];
                }
            }
        }
        for t in 0..L0_PER_L1 {
            lanes[t] = if t % 4 == 3 {
                tail[t]
            } else {
                lanes[t] + base[t]
            };
        }
        lanes
    }
}

/// One cache line of L2 metadata: `l2` (47 bits) | entry 0 (17 bits) |
/// entries 1..15 (32 bits each). Entry `t` counts the 1-bits in L1-blocks
/// `0..=t` of this L2-block; block 15 is implied by the next `l2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[repr(C, align(64))]
pub struct L2Block {
    words: [u64; 8],
}

pub const L2_ENTRIES: usize = 15;

impl L2Block {
    pub fn new(l2: u64, entries: &[u32; L2_ENTRIES]) -> Self {
        assert!(l2 < 1 << 47, "l2 counter {l2} overflows 47 bits");
        assert!(entries[0] < 1 << 17, "first L2 entry overflows 17 bits");
        let mut words = [0u64; 8];
        words[0] = l2 | (entries[0] as u64) << 47;
        for (t, &e) in entries.iter().enumerate().skip(1) {
            write_bits(&mut words, 64 + 32 * (t - 1), 32, e as u64);
        }
        Self { words }
    }

    pub fn from_words(words: [u64; 8]) -> Self {
        Self { words }
    }

    pub fn words(&self) -> &[u64; 8] {
        &self.words
    }

    #[inline(always)]
    pub fn l2(&self) -> u64 {
        self.words[0] & ((1 << 47) - 1)
    }

    #[inline(always)]
    pub fn entry(&self, t: usize) -> u32 {
        if t == 0 {
            (self.words[0] >> 47) as u32
        } else {
            read_bits(&self.words, 64 + 32 * (t - 1), 32) as u32
        }
    }

    pub fn entries(&self) -> [u32; L2_ENTRIES] {
        core::array::from_fn(|t| self.entry(t))
    }
}

/// Rank structure plus in-superblock select.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryTree {
    levels: u8,
    l0_log: u32,
    blocks: Vec<L1Block>,
    l2blocks: Vec<L2Block>,
    len: usize,
    ones: usize,
}

fn l0_log_for(l0: usize) -> Result<u32> {
    match l0 {
        512 | 1024 | 2048 => Ok(l0.trailing_zeros()),
        _ => Err(Error::UnsupportedBlockSize(l0)),
    }
}

impl SummaryTree {
    /// Builds the summary in one pass over `v`.
    pub fn build(v: &BitVector, l0: usize, levels: u8) -> Result<Self> {
        let l0_log = l0_log_for(l0)?;
        if levels != 2 && levels != 3 {
            return Err(Error::UnsupportedLevels(levels));
        }
        if v.is_empty() {
            return Err(Error::EmptyBitVector);
        }
        if levels == 3 && v.len() >= 1 << 47 {
            return Err(Error::TooLong(v.len()));
        }

        let words = v.words();
        let l0_words = l0 / 64;
        let l1_words = l0_words * L0_PER_L1;
        let num_blocks = words.len().div_ceil(l1_words);
        let mut blocks = Vec::with_capacity(num_blocks);
        let mut ones = 0u64;
        for chunk in words.chunks(l1_words) {
            let mut counts = [0u32; L0_PER_L1];
            for (t, l0_chunk) in chunk.chunks(l0_words).enumerate() {
                counts[t] = l0_chunk.iter().map(|w| w.count_ones()).sum();
            }
            blocks.push(L1Block::new(ones, &counts));
            ones += counts.iter().map(|&c| c as u64).sum::<u64>();
        }

        let mut l2blocks = Vec::new();
        if levels == 3 {
            let next_l1 = |j: usize| blocks.get(j).map_or(ones, |b: &L1Block| b.l1());
            for q in 0..num_blocks.div_ceil(L1_PER_L2) {
                let l2 = blocks[q * L1_PER_L2].l1();
                let entries: [u32; L2_ENTRIES] =
                    core::array::from_fn(|t| (next_l1(q * L1_PER_L2 + t + 1) - l2) as u32);
                l2blocks.push(L2Block::new(l2, &entries));
            }
        }

        Ok(Self {
            levels,
            l0_log,
            blocks,
            l2blocks,
            len: v.len(),
            ones: ones as usize,
        })
    }

    /// Reassembles a summary from stored blocks, checking the block counts
    /// against `v`.
    pub fn from_blocks(
        v: &BitVector,
        l0: usize,
        levels: u8,
        blocks: Vec<L1Block>,
        l2blocks: Vec<L2Block>,
    ) -> Result<Self> {
        let l0_log = l0_log_for(l0)?;
        if levels != 2 && levels != 3 {
            return Err(Error::UnsupportedLevels(levels));
        }
        if v.is_empty() {
            return Err(Error::EmptyBitVector);
        }
        let l1_log = l0_log + 5;
        let expect_l1 = v.len().div_ceil(1 << l1_log);
        let expect_l2 = if levels == 3 {
            v.len().div_ceil(1 << (l1_log + 4))
        } else {
            0
        };
        if blocks.len() != expect_l1 || l2blocks.len() != expect_l2 {
            return Err(Error::Malformed(
                "summary block count does not match the bit vector",
            ));
        }
        Ok(Self {
            levels,
            l0_log,
            blocks,
            l2blocks,
            len: v.len(),
            ones: v.count_ones(),
        })
    }

    pub fn levels(&self) -> u8 {
        self.levels
    }

    pub fn l0(&self) -> usize {
        1 << self.l0_log
    }

    pub fn l1_size(&self) -> usize {
        1 << self.l1_log()
    }

    #[inline(always)]
    fn l1_log(&self) -> u32 {
        self.l0_log + 5
    }

    #[inline(always)]
    fn sb_log(&self) -> u32 {
        if self.levels == 2 {
            self.l1_log()
        } else {
            self.l1_log() + 4
        }
    }

    /// Superblock size `L` in bits.
    pub fn superblock_size(&self) -> usize {
        1 << self.sb_log()
    }

    pub fn num_superblocks(&self) -> usize {
        self.len.div_ceil(self.superblock_size())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn count(&self, bit: Bit) -> usize {
        match bit {
            Bit::One => self.ones,
            Bit::Zero => self.len - self.ones,
        }
    }

    pub fn blocks(&self) -> &[L1Block] {
        &self.blocks
    }

    pub fn l2_blocks(&self) -> &[L2Block] {
        &self.l2blocks
    }

    /// Exact size in bits: 512 per L1-block and per L2-block.
    pub fn size_bits(&self) -> u64 {
        512 * (self.blocks.len() + self.l2blocks.len()) as u64
    }

    /// Number of 1-bits before position `i`, `i <= n`.
    #[inline]
    pub fn rank1(&self, v: &BitVector, i: usize) -> usize {
        assert!(
            i <= self.len,
            "rank index {i} out of range 0..={}",
            self.len
        );
        if i == self.len {
            return self.ones;
        }
        let block = &self.blocks[i >> self.l1_log()];
        let t = (i >> self.l0_log) & (L0_PER_L1 - 1);
        let mut rank = block.l1() as usize + block.l0_prefix(t) as usize;
        let words = v.words();
        let first = (i >> self.l0_log) << (self.l0_log - 6);
        let last = i >> 6;
        for w in &words[first..last] {
            rank += w.count_ones() as usize;
        }
        rank + rank_word_prefix(words[last], (i & 63) as u32) as usize
    }

    #[inline]
    pub fn rank0(&self, v: &BitVector, i: usize) -> usize {
        i - self.rank1(v, i)
    }

    /// 1-bits strictly before superblock `sb`; `sb == num_superblocks()`
    /// yields the total.
    #[inline(always)]
    pub fn superblock_prefix(&self, sb: usize) -> usize {
        if self.levels == 2 {
            self.blocks.get(sb).map_or(self.ones, |b| b.l1() as usize)
        } else {
            self.l2blocks.get(sb).map_or(self.ones, |b| b.l2() as usize)
        }
    }

    /// `bit`-bits strictly before superblock `sb`.
    #[inline(always)]
    pub fn superblock_prefix_of(&self, sb: usize, bit: Bit) -> usize {
        let ones = self.superblock_prefix(sb);
        match bit {
            Bit::One => ones,
            Bit::Zero => (sb << self.sb_log()).min(self.len) - ones,
        }
    }

    /// 1-bits inside L1-block `j`.
    #[inline(always)]
    fn l1_block_ones(&self, j: usize) -> u32 {
        let next = self.blocks.get(j + 1).map_or(self.ones as u64, |b| b.l1());
        (next - self.blocks[j].l1()) as u32
    }

    /// The 32 cumulative L0 counts of L1-block `j`.
    pub fn l1_cumulative(&self, j: usize) -> [u32; L0_PER_L1] {
        self.blocks[j].cumulative_l0_counts(self.l1_block_ones(j))
    }

    /// Position of the `bit`-bit with global rank `rank`, scanning at most
    /// `budget` superblocks starting at `start_sb`. Returns the position and
    /// the number of superblocks visited.
    #[inline]
    pub fn select_from(
        &self,
        v: &BitVector,
        start_sb: usize,
        rank: usize,
        bit: Bit,
        budget: usize,
    ) -> Result<(usize, usize)> {
        let violated = Error::InvariantViolated {
            start: start_sb,
            rank,
            budget,
        };
        let nsb = self.num_superblocks();
        if start_sb >= nsb {
            return Err(violated);
        }
        let mut sb = start_sb;
        let mut before = self.superblock_prefix_of(sb, bit);
        if rank < before {
            return Err(violated);
        }
        loop {
            let after = self.superblock_prefix_of(sb + 1, bit);
            if rank < after {
                break;
            }
            sb += 1;
            before = after;
            if sb - start_sb >= budget || sb >= nsb {
                return Err(violated);
            }
        }
        let probes = sb - start_sb + 1;
        let local = rank - before;
        let pos = if self.levels == 2 {
            self.select_in_l1(v, sb, local, bit)
        } else {
            self.select_in_l2(v, sb, local, bit)
        };
        Ok((pos, probes))
    }

    /// [`select_from`](Self::select_from) with a rank `j` counted from the
    /// start of `start_sb`.
    pub fn select_from_superblock(
        &self,
        v: &BitVector,
        start_sb: usize,
        j: usize,
        bit: Bit,
        budget: usize,
    ) -> Result<(usize, usize)> {
        if start_sb >= self.num_superblocks() {
            return Err(Error::InvariantViolated {
                start: start_sb,
                rank: j,
                budget,
            });
        }
        let rank = self.superblock_prefix_of(start_sb, bit) + j;
        self.select_from(v, start_sb, rank, bit, budget)
    }

    #[inline(always)]
    fn select_in_l2(&self, v: &BitVector, q: usize, mut local: usize, bit: Bit) -> usize {
        let block = &self.l2blocks[q];
        let l1 = self.l1_size();
        let mut counts = [0usize; L2_ENTRIES];
        for (t, c) in counts.iter_mut().enumerate() {
            let ones = block.entry(t) as usize;
            *c = match bit {
                Bit::One => ones,
                Bit::Zero => (t + 1) * l1 - ones,
            };
        }
        let idx: usize = counts.iter().map(|&c| (c <= local) as usize).sum();
        if idx > 0 {
            local -= counts[idx - 1];
        }
        self.select_in_l1(v, q * L1_PER_L2 + idx, local, bit)
    }

    #[inline(always)]
    fn select_in_l1(&self, v: &BitVector, j: usize, mut local: usize, bit: Bit) -> usize {
        let mut counts = self.l1_cumulative(j);
        if bit == Bit::Zero {
            for (t, c) in counts.iter_mut().enumerate() {
                *c = ((t as u32 + 1) << self.l0_log) - *c;
            }
        }
        let local32 = local as u32;
        let idx: usize = counts.iter().map(|&c| (c <= local32) as usize).sum();
        debug_assert!(idx < L0_PER_L1);
        if idx > 0 {
            local -= counts[idx - 1] as usize;
        }
        let start = (j << self.l1_log()) + (idx << self.l0_log);
        scan_words(v.words(), start >> 6, local, bit, 1 << (self.l0_log - 6))
    }

    #[doc(hidden)]
    pub fn corrupt_l1_for_testing(&mut self, j: usize) {
        self.blocks[j].words[0] += 1;
    }
}

#[inline(always)]
fn scan_words(words: &[u64], first: usize, mut local: usize, bit: Bit, max_words: usize) -> usize {
    let mut w = first;
    loop {
        debug_assert!(w < first + max_words, "select walked past its L0-block");
        let word = bit.normalize(words[w]);
        let c = word.count_ones() as usize;
        if local < c {
            return (w << 6) + select_in_word(word, local as u32) as usize;
        }
        local -= c;
        w += 1;
    }
}

/// Walks superblocks forward to find the one holding a given `bit`-bit.
/// Ranks passed to [`locate`](Self::locate) must be non-decreasing.
pub(crate) struct SuperblockCursor<'a> {
    summary: &'a SummaryTree,
    bit: Bit,
    sb: usize,
    next_prefix: usize,
}

impl<'a> SuperblockCursor<'a> {
    pub(crate) fn new(summary: &'a SummaryTree, bit: Bit) -> Self {
        Self {
            summary,
            bit,
            sb: 0,
            next_prefix: summary.superblock_prefix_of(1, bit),
        }
    }

    pub(crate) fn locate(&mut self, rank: usize) -> usize {
        debug_assert!(rank < self.summary.count(self.bit));
        while self.next_prefix <= rank {
            self.sb += 1;
            self.next_prefix = self.summary.superblock_prefix_of(self.sb + 1, self.bit);
        }
        self.sb
    }
}
