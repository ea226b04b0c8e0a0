//! The bit-compressed three-level sample tree.
//!
//! The top array `T` samples the superblock of every `a`-th sampled bit. When
//! two neighbouring top samples are `alpha` or more superblocks apart, the gap
//! gets a *mid-group* of `a / b` finer samples (every `b`-th bit), stored with
//! just enough bits for offsets inside the gap. Mid gaps that are still
//! `alpha` or wider get a *bot-group* with the exact superblock of each of the
//! `b` bits they cover. A query therefore scans at most `alpha` superblocks.
//!
//! Arrays are split by field width: mid-groups live in `M[rho]`, the counter
//! runs that locate bot-groups in `K[rho_hat]`, and bot-groups in `B[w]`
//! (entries of `w + 1` bits for gaps of `2^w ..= 2^(w+1) - 1` superblocks).

mod build;
pub mod params;

use alloc::vec::Vec;

use crate::bitcore::{bits_for_range, floor_log2, low_mask, BitBuf, BitVector, PackedArray};
use crate::rankselect::parts::{PartReader, SUB_BOT, SUB_COUNTERS, SUB_MID, SUB_PARAMS, SUB_TOP};
use crate::rankselect::Part;
use crate::summary::SummaryTree;
use crate::{Bit, Error, Result};

pub use params::{a_fast, a_min, default_grid, optimal_a, optimal_b, space_bound_lemma3};

/// Bits of the fixed parameter header counted by
/// [`SampleTree3::measured_size`].
pub const HEADER_BITS: u64 = 16 * 64;

/// Sample-tree level that resolved a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SampleLevel {
    Top,
    Mid,
    Bot,
}

/// A select answer with the work it took.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelectTrace {
    pub position: usize,
    /// Superblock prefixes read by the final linear scan.
    pub probes: usize,
    pub level: SampleLevel,
}

/// Global field widths fixed after construction pass 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Widths {
    pub o: u32,
    pub g: u32,
    pub kappa: u32,
    pub rho_hat: u32,
    pub h: u32,
    pub c: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleTree3 {
    bit: Bit,
    a_log: u32,
    b_log: u32,
    alpha_log: u32,
    sb_size: usize,
    count: usize,
    nsb: usize,
    widths: Widths,
    top: PackedArray,
    mid: Vec<BitBuf>,
    counters: Vec<PackedArray>,
    bot: Vec<PackedArray>,
}

impl SampleTree3 {
    /// Builds the tree over the `bit`-bits counted by `summary`. `a`, `b` and
    /// `alpha` must be powers of two with `b <= a` and `2 <= alpha <= 64`.
    pub fn build(
        summary: &SummaryTree,
        bit: Bit,
        a: usize,
        b: usize,
        alpha: usize,
    ) -> Result<Self> {
        build::build(summary, bit, a, b, alpha)
    }

    pub fn bit(&self) -> Bit {
        self.bit
    }

    pub fn a(&self) -> usize {
        1 << self.a_log
    }

    pub fn b(&self) -> usize {
        1 << self.b_log
    }

    pub fn alpha(&self) -> usize {
        1 << self.alpha_log
    }

    /// Number of sampled bits.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn widths(&self) -> Widths {
        self.widths
    }

    /// Top entries including the sentinel.
    pub fn top_len(&self) -> usize {
        self.top.len()
    }

    /// Number of mid-groups, i.e. split top entries.
    pub fn mid_groups(&self) -> usize {
        let stride = |rho: usize| self.group_stride(rho);
        self.mid
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_empty())
            .map(|(rho, m)| m.len() / stride(rho))
            .sum()
    }

    /// Number of bot-groups across all classes.
    pub fn bot_groups(&self) -> usize {
        self.bot.iter().map(|b| b.len() >> self.b_log).sum()
    }

    /// Exact size in bits of every array plus [`HEADER_BITS`].
    pub fn measured_size(&self) -> u64 {
        self.top.bit_len()
            + self.mid.iter().map(|m| m.len() as u64).sum::<u64>()
            + self.counters.iter().map(PackedArray::bit_len).sum::<u64>()
            + self.bot.iter().map(PackedArray::bit_len).sum::<u64>()
            + HEADER_BITS
    }

    #[inline(always)]
    fn group_stride(&self, rho: usize) -> usize {
        (self.widths.rho_hat + self.widths.h) as usize + (rho << (self.a_log - self.b_log))
    }

    #[inline(always)]
    fn top_entry(&self, j: usize) -> (usize, usize, u32) {
        let t = self.top.get(j);
        let w = self.widths;
        let o = (t & low_mask(w.o)) as usize;
        let g = (t >> w.o & low_mask(w.g)) as usize;
        let kappa = (t >> (w.o + w.g) & low_mask(w.kappa)) as u32;
        (o, g, kappa)
    }

    #[inline(always)]
    fn top_offset(&self, j: usize) -> usize {
        (self.top.get(j) & low_mask(self.widths.o)) as usize
    }

    /// Position of the `bit`-bit with rank `i`.
    #[inline]
    pub fn select(&self, summary: &SummaryTree, v: &BitVector, i: usize) -> Result<usize> {
        self.select_traced(summary, v, i).map(|t| t.position)
    }

    /// [`select`](Self::select) plus the probe count and the level that
    /// answered.
    #[inline]
    pub fn select_traced(
        &self,
        summary: &SummaryTree,
        v: &BitVector,
        i: usize,
    ) -> Result<SelectTrace> {
        if i >= self.count {
            return Err(Error::SelectOutOfRange {
                bit: self.bit,
                index: i,
                count: self.count,
            });
        }
        let alpha = self.alpha();
        let j = i >> self.a_log;
        let (o, g, kappa) = self.top_entry(j);
        let r = self.top_offset(j + 1) - o;
        if r < alpha {
            let (position, probes) = summary.select_from(v, o, i, self.bit, alpha)?;
            return Ok(SelectTrace {
                position,
                probes,
                level: SampleLevel::Top,
            });
        }

        let ow = bits_for_range(r as u64 + 1);
        let rho = (ow + kappa) as usize;
        let m = &self.mid[rho];
        let base = g * self.group_stride(rho);
        let rho_hat = m.read(base, self.widths.rho_hat) as usize;
        let h = m.read(base + self.widths.rho_hat as usize, self.widths.h) as usize;
        let first = base + (self.widths.rho_hat + self.widths.h) as usize;
        let e = (i & (self.a() - 1)) >> self.b_log;
        let entry = m.read(first + e * rho, rho as u32);
        let off = (entry & low_mask(ow)) as usize;
        let c = (entry >> ow) as usize;
        let next = if e + 1 < 1 << (self.a_log - self.b_log) {
            (m.read(first + (e + 1) * rho, rho as u32) & low_mask(ow)) as usize
        } else {
            r
        };
        let gap = next - off;
        if gap < alpha {
            let (position, probes) = summary.select_from(v, o + off, i, self.bit, alpha)?;
            return Ok(SelectTrace {
                position,
                probes,
                level: SampleLevel::Mid,
            });
        }

        let w = floor_log2(gap as u64) as usize;
        debug_assert!(w <= rho_hat);
        let run = &self.counters[rho_hat];
        let cnt = run.get(h + w - self.alpha_log as usize) as usize;
        let idx = ((c + cnt) << self.b_log) + (i & (self.b() - 1));
        let off2 = self.bot[w].get(idx) as usize;
        let (position, probes) = summary.select_from(v, o + off + off2, i, self.bit, 1)?;
        Ok(SelectTrace {
            position,
            probes,
            level: SampleLevel::Bot,
        })
    }

    fn params(&self) -> [u64; 16] {
        let w = self.widths;
        [
            self.bit.as_u64(),
            self.a() as u64,
            self.b() as u64,
            self.alpha() as u64,
            self.sb_size as u64,
            self.count as u64,
            self.nsb as u64,
            w.o as u64,
            w.g as u64,
            w.kappa as u64,
            w.rho_hat as u64,
            w.h as u64,
            w.c as u64,
            self.mid.len() as u64,
            self.counters.len() as u64,
            self.bot.len() as u64,
        ]
    }

    /// Components in write order, tags offset by `base`.
    pub fn to_parts(&self, base: u8) -> Vec<Part> {
        let mut parts =
            Vec::with_capacity(2 + self.mid.len() + self.counters.len() + self.bot.len());
        parts.push(Part::from_u64s(base + SUB_PARAMS, &self.params()));
        parts.push(Part::from_packed(base + SUB_TOP, &self.top));
        parts.extend(
            self.mid
                .iter()
                .map(|m| Part::from_bitbuf(base + SUB_MID, m)),
        );
        parts.extend(
            self.counters
                .iter()
                .map(|k| Part::from_packed(base + SUB_COUNTERS, k)),
        );
        parts.extend(
            self.bot
                .iter()
                .map(|b| Part::from_packed(base + SUB_BOT, b)),
        );
        parts
    }

    /// Inverse of [`to_parts`](Self::to_parts); checks every shape against
    /// `summary`.
    pub(crate) fn read_parts(
        reader: &mut PartReader<'_>,
        base: u8,
        summary: &SummaryTree,
    ) -> Result<Self> {
        let p = reader.next(base + SUB_PARAMS)?;
        if p.width != 64 || p.len != 16 || p.words.len() != 16 {
            return Err(Error::Malformed("sample tree parameter block"));
        }
        let q = &p.words;
        let bit = Bit::from_u64(q[0]).ok_or(Error::Malformed("sample tree bit value"))?;
        let to_usize = |x: u64| {
            usize::try_from(x).map_err(|_| Error::Malformed("sample tree parameter overflows"))
        };
        let (a, b, alpha) = (to_usize(q[1])?, to_usize(q[2])?, to_usize(q[3])?);
        build::validate(a, b, alpha)?;
        let width = |x: u64| {
            if x <= 64 {
                Ok(x as u32)
            } else {
                Err(Error::Malformed("sample tree field width exceeds 64"))
            }
        };
        let widths = Widths {
            o: width(q[7])?,
            g: width(q[8])?,
            kappa: width(q[9])?,
            rho_hat: width(q[10])?,
            h: width(q[11])?,
            c: width(q[12])?,
        };
        let (sb_size, count, nsb) = (to_usize(q[4])?, to_usize(q[5])?, to_usize(q[6])?);
        if sb_size != summary.superblock_size()
            || count != summary.count(bit)
            || nsb != summary.num_superblocks()
        {
            return Err(Error::Malformed("sample tree does not match the summary"));
        }
        let (mid_len, counter_len, bot_len) =
            (to_usize(q[13])?, to_usize(q[14])?, to_usize(q[15])?);
        if mid_len > 129 || counter_len > 65 || bot_len > 65 {
            return Err(Error::Malformed("sample tree family count"));
        }

        let top_part = reader.next(base + SUB_TOP)?;
        if top_part.width as u32 != widths.o + widths.g + widths.kappa
            || top_part.len != count.div_ceil(a) as u64 + 1
        {
            return Err(Error::Malformed("sample tree top array shape"));
        }
        let top = top_part.to_packed()?;
        let mut mid = Vec::with_capacity(mid_len);
        for _ in 0..mid_len {
            mid.push(reader.next(base + SUB_MID)?.to_bitbuf()?);
        }
        let mut counters = Vec::with_capacity(counter_len);
        for _ in 0..counter_len {
            let k = reader.next(base + SUB_COUNTERS)?;
            if k.width as u32 != widths.c {
                return Err(Error::Malformed("counter array width"));
            }
            counters.push(k.to_packed()?);
        }
        let mut bot = Vec::with_capacity(bot_len);
        for w in 0..bot_len {
            let part = reader.next(base + SUB_BOT)?;
            if part.width as usize != w + 1 || part.len % b as u64 != 0 {
                return Err(Error::Malformed("bot array shape"));
            }
            bot.push(part.to_packed()?);
        }
        let tree = Self {
            bit,
            a_log: a.trailing_zeros(),
            b_log: b.trailing_zeros(),
            alpha_log: alpha.trailing_zeros(),
            sb_size,
            count,
            nsb,
            widths,
            top,
            mid,
            counters,
            bot,
        };
        for (rho, m) in tree.mid.iter().enumerate() {
            if !m.is_empty() && m.len() % tree.group_stride(rho) != 0 {
                return Err(Error::Malformed(
                    "mid array is not a whole number of groups",
                ));
            }
        }
        Ok(tree)
    }
}

#[cfg(test)]
mod tests;
