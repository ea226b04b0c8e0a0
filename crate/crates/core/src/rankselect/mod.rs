//! One structure answering all four queries, built from a configuration.

mod config;
pub(crate) mod parts;

use alloc::vec::Vec;

use crate::bitcore::BitVector;
use crate::sample2::{optimal_a2, SampleTree2};
use crate::sample3::params::{a_fast, a_min, default_grid, optimal_a, optimal_b};
use crate::sample3::{SampleTree3, SelectTrace};
use crate::summary::{L1Block, L2Block, SummaryTree};
use crate::{Bit, Error, Result};

pub use config::{APolicy, Preset, RsConfig, TreeKind, UnknownPreset};
use parts::PartReader;
pub use parts::{Part, TAG_BITS, TAG_L1, TAG_L2, TAG_SEL0, TAG_SEL1};

/// The select structure for one bit value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelectIndex {
    Three(SampleTree3),
    Two(SampleTree2),
}

impl SelectIndex {
    #[inline]
    pub fn select_traced(
        &self,
        summary: &SummaryTree,
        v: &BitVector,
        i: usize,
    ) -> Result<SelectTrace> {
        match self {
            SelectIndex::Three(t) => t.select_traced(summary, v, i),
            SelectIndex::Two(t) => t.select_traced(summary, v, i),
        }
    }

    pub fn measured_size(&self) -> u64 {
        match self {
            SelectIndex::Three(t) => t.measured_size(),
            SelectIndex::Two(t) => t.measured_size(),
        }
    }

    /// Resolved sample rates `(a, b)`; `b == a` for the two-level tree.
    pub fn rates(&self) -> (usize, usize) {
        match self {
            SelectIndex::Three(t) => (t.a(), t.b()),
            SelectIndex::Two(t) => (t.a(), t.a()),
        }
    }

    pub fn alpha(&self) -> usize {
        match self {
            SelectIndex::Three(t) => t.alpha(),
            SelectIndex::Two(t) => t.alpha(),
        }
    }

    fn to_parts(&self, base: u8) -> Vec<Part> {
        match self {
            SelectIndex::Three(t) => t.to_parts(base),
            SelectIndex::Two(t) => t.to_parts(base),
        }
    }
}

/// Space used by each component, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpaceReport {
    pub n: usize,
    pub summary_bits: u64,
    pub sel1_bits: u64,
    pub sel0_bits: u64,
}

impl SpaceReport {
    pub fn total_bits(&self) -> u64 {
        self.summary_bits + self.sel1_bits + self.sel0_bits
    }

    /// `bits` as a percentage of `n`.
    pub fn percent(&self, bits: u64) -> f64 {
        100.0 * bits as f64 / self.n as f64
    }

    pub fn summary_percent(&self) -> f64 {
        self.percent(self.summary_bits)
    }

    pub fn total_percent(&self) -> f64 {
        self.percent(self.total_bits())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankSelect {
    v: BitVector,
    summary: SummaryTree,
    sel1: SelectIndex,
    sel0: Option<SelectIndex>,
    config: RsConfig,
}

fn rates3(config: &RsConfig, summary: &SummaryTree, bit: Bit) -> Result<(usize, usize)> {
    let (n, m, l) = (summary.len(), summary.count(bit), summary.superblock_size());
    if m == 0 {
        return Ok((1, 1));
    }
    Ok(match config.a_policy {
        APolicy::Star => {
            let a = optimal_a(n, m, l, config.alpha)?;
            (a, optimal_b(a))
        }
        APolicy::Fast => {
            let a = a_fast(n, m, l, config.alpha)?;
            (a, optimal_b(a))
        }
        APolicy::Min => {
            let a = optimal_a(n, m, l, config.alpha)?;
            let grid = default_grid(a, optimal_b(a));
            a_min(summary, bit, config.alpha, &grid)?
        }
        APolicy::Explicit { a, b } => (a, b),
    })
}

fn rate2(config: &RsConfig, summary: &SummaryTree, bit: Bit) -> Result<usize> {
    let (n, m, l) = (summary.len(), summary.count(bit), summary.superblock_size());
    if m == 0 {
        return Ok(1);
    }
    Ok(match config.a_policy {
        APolicy::Star => optimal_a2(n, m, l, config.alpha)?,
        APolicy::Fast => a_fast(n, m, l, config.alpha)?,
        APolicy::Min => {
            let star = optimal_a2(n, m, l, config.alpha)?;
            let mut best = (u64::MAX, star);
            for shift in -3i32..=3 {
                let a = if shift >= 0 {
                    star << shift
                } else {
                    (star >> -shift).max(1)
                };
                let size = SampleTree2::build(summary, bit, a, config.alpha)?.measured_size();
                if size < best.0 || (size == best.0 && a > best.1) {
                    best = (size, a);
                }
            }
            best.1
        }
        APolicy::Explicit { a, .. } => a,
    })
}

fn build_index(config: &RsConfig, summary: &SummaryTree, bit: Bit) -> Result<SelectIndex> {
    Ok(match config.tree {
        TreeKind::ThreeStar => {
            let (a, b) = rates3(config, summary, bit)?;
            SelectIndex::Three(SampleTree3::build(summary, bit, a, b, config.alpha)?)
        }
        TreeKind::TwoStar => {
            let a = rate2(config, summary, bit)?;
            SelectIndex::Two(SampleTree2::build(summary, bit, a, config.alpha)?)
        }
    })
}

fn read_index(
    reader: &mut PartReader<'_>,
    config: &RsConfig,
    base: u8,
    summary: &SummaryTree,
    bit: Bit,
) -> Result<SelectIndex> {
    let index = match config.tree {
        TreeKind::ThreeStar => SelectIndex::Three(SampleTree3::read_parts(reader, base, summary)?),
        TreeKind::TwoStar => SelectIndex::Two(SampleTree2::read_parts(reader, base, summary)?),
    };
    let stored_bit = match &index {
        SelectIndex::Three(t) => t.bit(),
        SelectIndex::Two(t) => t.bit(),
    };
    if stored_bit != bit || index.alpha() != config.alpha {
        return Err(Error::Malformed(
            "sample tree does not match the configuration",
        ));
    }
    Ok(index)
}

fn words_to_blocks<B>(part: &Part, make: fn([u64; 8]) -> B) -> Result<Vec<B>> {
    if part.width != 64 || part.len % 8 != 0 || part.words.len() as u64 != part.len {
        return Err(Error::Malformed("summary block component shape"));
    }
    Ok(part
        .words
        .chunks_exact(8)
        .map(|c| make(c.try_into().expect("chunks of 8")))
        .collect())
}

impl RankSelect {
    /// Builds the summary tree and the configured sample trees over `v`.
    pub fn build(v: BitVector, config: RsConfig) -> Result<Self> {
        let summary = SummaryTree::build(&v, config.l0, config.levels)?;
        let sel1 = build_index(&config, &summary, Bit::One)?;
        let sel0 = if config.select0 {
            Some(build_index(&config, &summary, Bit::Zero)?)
        } else {
            None
        };
        Ok(Self {
            v,
            summary,
            sel1,
            sel0,
            config,
        })
    }

    pub fn config(&self) -> &RsConfig {
        &self.config
    }

    pub fn bit_vector(&self) -> &BitVector {
        &self.v
    }

    pub fn summary(&self) -> &SummaryTree {
        &self.summary
    }

    pub fn select_index(&self, bit: Bit) -> Option<&SelectIndex> {
        match bit {
            Bit::One => Some(&self.sel1),
            Bit::Zero => self.sel0.as_ref(),
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.summary.count_ones()
    }

    pub fn count(&self, bit: Bit) -> usize {
        self.summary.count(bit)
    }

    /// 1-bits in `[0, i)`, `i <= n`.
    #[inline]
    pub fn rank1(&self, i: usize) -> Result<usize> {
        if i > self.v.len() {
            return Err(Error::RankOutOfRange {
                index: i,
                len: self.v.len(),
            });
        }
        Ok(self.summary.rank1(&self.v, i))
    }

    /// 0-bits in `[0, i)`, `i <= n`.
    #[inline]
    pub fn rank0(&self, i: usize) -> Result<usize> {
        self.rank1(i).map(|r| i - r)
    }

    #[inline]
    pub fn rank(&self, bit: Bit, i: usize) -> Result<usize> {
        match bit {
            Bit::One => self.rank1(i),
            Bit::Zero => self.rank0(i),
        }
    }

    /// Position of the 1-bit with 0-based rank `i`.
    #[inline]
    pub fn select1(&self, i: usize) -> Result<usize> {
        self.select(Bit::One, i)
    }

    /// Position of the 0-bit with 0-based rank `i`.
    #[inline]
    pub fn select0(&self, i: usize) -> Result<usize> {
        self.select(Bit::Zero, i)
    }

    #[inline]
    pub fn select(&self, bit: Bit, i: usize) -> Result<usize> {
        self.select_traced(bit, i).map(|t| t.position)
    }

    #[inline]
    pub fn select_traced(&self, bit: Bit, i: usize) -> Result<SelectTrace> {
        self.select_index(bit)
            .ok_or(Error::SelectDisabled(bit))?
            .select_traced(&self.summary, &self.v, i)
    }

    pub fn space_report(&self) -> SpaceReport {
        SpaceReport {
            n: self.v.len(),
            summary_bits: self.summary.size_bits(),
            sel1_bits: self.sel1.measured_size(),
            sel0_bits: self.sel0.as_ref().map_or(0, SelectIndex::measured_size),
        }
    }

    /// Every stored component, in a fixed order: bit vector, L1-blocks,
    /// L2-blocks, then the 1-bit and (if built) 0-bit sample trees.
    pub fn parts(&self) -> Vec<Part> {
        let blocks = |words: &mut dyn Iterator<Item = &[u64; 8]>| {
            words.flatten().copied().collect::<Vec<u64>>()
        };
        let l1 = blocks(&mut self.summary.blocks().iter().map(L1Block::words));
        let l2 = blocks(&mut self.summary.l2_blocks().iter().map(L2Block::words));
        let mut parts = Vec::new();
        parts.push(Part::new(
            TAG_BITS,
            1,
            self.v.len() as u64,
            self.v.words().to_vec(),
        ));
        parts.push(Part::from_u64s(TAG_L1, &l1));
        parts.push(Part::from_u64s(TAG_L2, &l2));
        parts.extend(self.sel1.to_parts(TAG_SEL1));
        if let Some(sel0) = &self.sel0 {
            parts.extend(sel0.to_parts(TAG_SEL0));
        }
        parts
    }

    /// Reassembles a structure from [`parts`](Self::parts) output, checking
    /// component shapes against `config`.
    pub fn from_parts(config: RsConfig, parts: &[Part]) -> Result<Self> {
        let mut reader = PartReader::new(parts);
        let bits = reader.next(TAG_BITS)?;
        if bits.width != 1 {
            return Err(Error::Malformed("bit vector component must have width 1"));
        }
        let v = BitVector::from_words(bits.words.clone(), bits.usize_len()?)?;
        let l1 = words_to_blocks(reader.next(TAG_L1)?, L1Block::from_words)?;
        let l2 = words_to_blocks(reader.next(TAG_L2)?, L2Block::from_words)?;
        let summary = SummaryTree::from_blocks(&v, config.l0, config.levels, l1, l2)?;
        let sel1 = read_index(&mut reader, &config, TAG_SEL1, &summary, Bit::One)?;
        let sel0 = if config.select0 {
            Some(read_index(
                &mut reader,
                &config,
                TAG_SEL0,
                &summary,
                Bit::Zero,
            )?)
        } else {
            None
        };
        reader.finish()?;
        Ok(Self {
            v,
            summary,
            sel1,
            sel0,
            config,
        })
    }

    /// Breaks the stored count of L1-block `j`. Test hook for fault injection.
    #[doc(hidden)]
    pub fn corrupt_summary_for_testing(&mut self, j: usize) {
        self.summary.corrupt_l1_for_testing(j);
    }
}
