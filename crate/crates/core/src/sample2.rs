//! The two-level sample tree: a top sample of every `a`-th bit and, for top
//! gaps of `alpha` or more superblocks, a dense group holding the exact
//! superblock of all `a` bits in the gap.
//!
//! Kept as a baseline to compare space and to cross-check the three-level
//! tree.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitcore::{bits_for_range, low_mask, BitVector, PackedArray};
use crate::rankselect::parts::{PartReader, SUB_DENSE, SUB_PARAMS2, SUB_TOP2};
use crate::rankselect::Part;
use crate::sample3::params::{round_up_pow2, MAX_RATE};
use crate::sample3::{SampleLevel, SelectTrace};
use crate::summary::{SummaryTree, SuperblockCursor};
use crate::{Bit, Error, Result};

/// Fixed parameter header counted by [`SampleTree2::measured_size`].
pub const HEADER_BITS2: u64 = 10 * 64;

fn clog(x: f64) -> f64 {
    if x > 2.0 {
        libm::log2(x)
    } else {
        1.0
    }
}

/// Asymptotic size `2 (m/a) log(n/L) + (a n / (alpha L)) log alpha` in bits.
pub fn space_bound2(n: usize, m: usize, sb_size: usize, a: f64, alpha: usize) -> f64 {
    let (n, m, l, al) = (n as f64, m as f64, sb_size as f64, alpha as f64);
    2.0 * (m / a) * clog(n / l) + a * n / (al * l) * libm::log2(al)
}

/// Power-of-two `a` minimizing [`space_bound2`]: the better of the two
/// powers of two around `sqrt(2 m log(n/L) alpha L / (n log alpha))`.
pub fn optimal_a2(n: usize, m: usize, sb_size: usize, alpha: usize) -> Result<usize> {
    if !(alpha.is_power_of_two() && (2..=64).contains(&alpha)) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if m == 0 {
        return Err(Error::NoSampledBits);
    }
    let (nf, mf, l, al) = (n as f64, m as f64, sb_size as f64, alpha as f64);
    let real = libm::sqrt(2.0 * mf * clog(nf / l) * al * l / (nf * libm::log2(al)));
    let hi = round_up_pow2(real);
    let lo = (hi / 2).max(1);
    let s = |a: usize| space_bound2(n, m, sb_size, a as f64, alpha);
    Ok(if s(lo) < s(hi) { lo } else { hi })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleTree2 {
    bit: Bit,
    a_log: u32,
    alpha_log: u32,
    sb_size: usize,
    count: usize,
    nsb: usize,
    width_o: u32,
    width_g: u32,
    top: PackedArray,
    dense: Vec<PackedArray>,
}

impl SampleTree2 {
    pub fn build(summary: &SummaryTree, bit: Bit, a: usize, alpha: usize) -> Result<Self> {
        if !(alpha.is_power_of_two() && (2..=64).contains(&alpha)) {
            return Err(Error::InvalidAlpha(alpha));
        }
        if !(a.is_power_of_two() && a <= MAX_RATE) {
            return Err(Error::InvalidSampleRates { a, b: a });
        }
        let count = summary.count(bit);
        let nsb = summary.num_superblocks();
        let ntop = count.div_ceil(a);

        let mut top_cur = SuperblockCursor::new(summary, bit);
        let mut dense_cur = SuperblockCursor::new(summary, bit);
        let mut top_o: Vec<u64> = (0..ntop).map(|j| top_cur.locate(j * a) as u64).collect();
        top_o.push(nsb as u64);

        let mut g_of = vec![0u64; ntop + 1];
        let mut dense_vals: Vec<Vec<u64>> = Vec::new();
        for j in 0..ntop {
            let r = top_o[j + 1] - top_o[j];
            if r < alpha as u64 {
                continue;
            }
            let rho = bits_for_range(r + 1) as usize;
            if dense_vals.len() <= rho {
                dense_vals.resize(rho + 1, Vec::new());
            }
            g_of[j] = (dense_vals[rho].len() / a) as u64;
            let mut last = 0;
            for t in 0..a {
                let ord = j * a + t;
                if ord < count {
                    last = dense_cur.locate(ord) as u64 - top_o[j];
                }
                dense_vals[rho].push(last);
            }
        }

        let width_o = bits_for_range(nsb as u64 + 1);
        let width_g = bits_for_range(g_of.iter().copied().max().unwrap_or(0) + 1);
        if width_o + width_g > 64 {
            return Err(Error::TooLong(summary.len()));
        }
        let mut top = PackedArray::new(width_o + width_g, ntop + 1);
        for j in 0..=ntop {
            top.set(j, top_o[j] | g_of[j] << width_o);
        }
        let dense = dense_vals
            .iter()
            .enumerate()
            .map(|(rho, vals)| PackedArray::from_values(rho as u32, vals))
            .collect();

        Ok(Self {
            bit,
            a_log: a.trailing_zeros(),
            alpha_log: alpha.trailing_zeros(),
            sb_size: summary.superblock_size(),
            count,
            nsb,
            width_o,
            width_g,
            top,
            dense,
        })
    }

    pub fn bit(&self) -> Bit {
        self.bit
    }

    pub fn a(&self) -> usize {
        1 << self.a_log
    }

    pub fn alpha(&self) -> usize {
        1 << self.alpha_log
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dense_groups(&self) -> usize {
        self.dense.iter().map(|d| d.len() >> self.a_log).sum()
    }

    pub fn measured_size(&self) -> u64 {
        self.top.bit_len() + self.dense.iter().map(PackedArray::bit_len).sum::<u64>() + HEADER_BITS2
    }

    #[inline]
    pub fn select(&self, summary: &SummaryTree, v: &BitVector, i: usize) -> Result<usize> {
        self.select_traced(summary, v, i).map(|t| t.position)
    }

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
        let j = i >> self.a_log;
        let t = self.top.get(j);
        let o = (t & low_mask(self.width_o)) as usize;
        let r = (self.top.get(j + 1) & low_mask(self.width_o)) as usize - o;
        if r < self.alpha() {
            let (position, probes) = summary.select_from(v, o, i, self.bit, self.alpha())?;
            return Ok(SelectTrace {
                position,
                probes,
                level: SampleLevel::Top,
            });
        }
        let g = (t >> self.width_o) as usize;
        let rho = bits_for_range(r as u64 + 1) as usize;
        let off = self.dense[rho].get((g << self.a_log) + (i & (self.a() - 1))) as usize;
        let (position, probes) = summary.select_from(v, o + off, i, self.bit, 1)?;
        Ok(SelectTrace {
            position,
            probes,
            level: SampleLevel::Mid,
        })
    }

    pub fn to_parts(&self, base: u8) -> Vec<Part> {
        let params = [
            self.bit.as_u64(),
            self.a() as u64,
            self.alpha() as u64,
            self.sb_size as u64,
            self.count as u64,
            self.nsb as u64,
            self.width_o as u64,
            self.width_g as u64,
            self.dense.len() as u64,
            0,
        ];
        let mut parts = vec![
            Part::from_u64s(base + SUB_PARAMS2, &params),
            Part::from_packed(base + SUB_TOP2, &self.top),
        ];
        parts.extend(
            self.dense
                .iter()
                .map(|d| Part::from_packed(base + SUB_DENSE, d)),
        );
        parts
    }

    pub(crate) fn read_parts(
        reader: &mut PartReader<'_>,
        base: u8,
        summary: &SummaryTree,
    ) -> Result<Self> {
        let p = reader.next(base + SUB_PARAMS2)?;
        if p.width != 64 || p.len != 10 || p.words.len() != 10 {
            return Err(Error::Malformed("sample tree parameter block"));
        }
        let q = &p.words;
        let to_usize = |x: u64| {
            usize::try_from(x).map_err(|_| Error::Malformed("sample tree parameter overflows"))
        };
        let bit = Bit::from_u64(q[0]).ok_or(Error::Malformed("sample tree bit value"))?;
        let (a, alpha) = (to_usize(q[1])?, to_usize(q[2])?);
        if !(alpha.is_power_of_two() && (2..=64).contains(&alpha)) {
            return Err(Error::InvalidAlpha(alpha));
        }
        if !(a.is_power_of_two() && a <= MAX_RATE) {
            return Err(Error::InvalidSampleRates { a, b: a });
        }
        let (sb_size, count, nsb) = (to_usize(q[3])?, to_usize(q[4])?, to_usize(q[5])?);
        if sb_size != summary.superblock_size()
            || count != summary.count(bit)
            || nsb != summary.num_superblocks()
        {
            return Err(Error::Malformed("sample tree does not match the summary"));
        }
        let (width_o, width_g, dense_len) = (q[6], q[7], to_usize(q[8])?);
        if width_o + width_g > 64 || dense_len > 65 {
            return Err(Error::Malformed("sample tree widths"));
        }
        let top_part = reader.next(base + SUB_TOP2)?;
        if top_part.width as u64 != width_o + width_g
            || top_part.len != count.div_ceil(a) as u64 + 1
        {
            return Err(Error::Malformed("sample tree top array shape"));
        }
        let top = top_part.to_packed()?;
        let mut dense = Vec::with_capacity(dense_len);
        for rho in 0..dense_len {
            let d = reader.next(base + SUB_DENSE)?;
            if d.width as usize != rho || d.len % a as u64 != 0 {
                return Err(Error::Malformed("dense array shape"));
            }
            dense.push(d.to_packed()?);
        }
        Ok(Self {
            bit,
            a_log: a.trailing_zeros(),
            alpha_log: alpha.trailing_zeros(),
            sb_size,
            count,
            nsb,
            width_o: width_o as u32,
            width_g: width_g as u32,
            top,
            dense,
        })
    }
}
