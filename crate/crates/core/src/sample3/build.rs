//! Two-pass construction of the 3-level sample tree.
//!
//! Pass 1 walks the sampled bits once through three monotone superblock
//! cursors (top, mid, bot) and records every offset, class and counter along
//! with the maxima that fix the global field widths. Pass 2 packs everything
//! at those widths.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitcore::{bits_for_range, floor_log2, BitBuf, PackedArray};
use crate::summary::{SummaryTree, SuperblockCursor};
use crate::{Bit, Error, Result};

use super::{SampleTree3, Widths};

struct TopPlan {
    o: u64,
    g: u64,
    kappa: u64,
}

struct MidPlan {
    rho: usize,
    rho_hat: u64,
    h: u64,
    /// `(offset, c)` per entry, `a / b` of them.
    entries: Vec<(u64, u64)>,
    offset_width: u32,
}

pub(super) fn validate(a: usize, b: usize, alpha: usize) -> Result<()> {
    if !(alpha.is_power_of_two() && (2..=64).contains(&alpha)) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if !(a.is_power_of_two() && b.is_power_of_two() && b <= a && a <= super::params::MAX_RATE) {
        return Err(Error::InvalidSampleRates { a, b });
    }
    Ok(())
}

pub(super) fn build(
    summary: &SummaryTree,
    bit: Bit,
    a: usize,
    b: usize,
    alpha: usize,
) -> Result<SampleTree3> {
    validate(a, b, alpha)?;
    let count = summary.count(bit);
    let nsb = summary.num_superblocks();
    let log_alpha = alpha.trailing_zeros() as usize;
    let per_group = a / b;

    // pass 1
    let mut top_cur = SuperblockCursor::new(summary, bit);
    let mut mid_cur = SuperblockCursor::new(summary, bit);
    let mut bot_cur = SuperblockCursor::new(summary, bit);

    let ntop = count.div_ceil(a);
    let mut top_o: Vec<u64> = (0..ntop).map(|j| top_cur.locate(j * a) as u64).collect();
    top_o.push(nsb as u64);

    let mut tops = Vec::with_capacity(ntop + 1);
    let mut mids: Vec<MidPlan> = Vec::new();
    // per mid-width ordinal of the next group
    let mut groups_per_rho: Vec<u64> = Vec::new();
    // global count of bot-groups per class, and the counter runs per rho_hat
    let mut class_total: Vec<u64> = Vec::new();
    let mut counters: Vec<Vec<u64>> = Vec::new();
    let mut bots: Vec<Vec<u64>> = Vec::new();

    let mut local_class = vec![0u64; 65];
    let mut entries: Vec<(u64, u64)> = Vec::with_capacity(per_group);
    for j in 0..ntop {
        let o = top_o[j];
        let r = top_o[j + 1] - o;
        if r < alpha as u64 {
            tops.push(TopPlan { o, g: 0, kappa: 0 });
            continue;
        }

        let offsets: Vec<u64> = (0..per_group)
            .map(|e| {
                let ord = j * a + e * b;
                if ord < count {
                    mid_cur.locate(ord) as u64 - o
                } else {
                    r
                }
            })
            .collect();

        entries.clear();
        local_class.fill(0);
        let mut rho_hat = 0u64;
        let mut c_max = 0u64;
        for e in 0..per_group {
            let next = offsets.get(e + 1).copied().unwrap_or(r);
            let gap = next - offsets[e];
            if gap < alpha as u64 {
                entries.push((offsets[e], 0));
                continue;
            }
            let w = floor_log2(gap) as usize;
            if class_total.len() <= w {
                class_total.resize(w + 1, 0);
                bots.resize(w + 1, Vec::new());
            }
            let c = local_class[w];
            local_class[w] += 1;
            c_max = c_max.max(c);
            rho_hat = rho_hat.max(w as u64);
            entries.push((offsets[e], c));

            let base = o + offsets[e];
            let mut last = 0;
            for t in 0..b {
                let ord = j * a + e * b + t;
                if ord < count {
                    last = bot_cur.locate(ord) as u64 - base;
                }
                bots[w].push(last);
            }
        }

        let h = if rho_hat == 0 {
            0
        } else {
            let rh = rho_hat as usize;
            if counters.len() <= rh {
                counters.resize(rh + 1, Vec::new());
            }
            let h = counters[rh].len() as u64;
            for w in log_alpha..=rh {
                counters[rh].push(class_total.get(w).copied().unwrap_or(0));
            }
            h
        };
        for (w, &k) in local_class.iter().enumerate() {
            if k > 0 {
                class_total[w] += k;
            }
        }

        let offset_width = bits_for_range(r + 1);
        let kappa = bits_for_range(c_max + 1);
        let rho = (offset_width + kappa) as usize;
        if groups_per_rho.len() <= rho {
            groups_per_rho.resize(rho + 1, 0);
        }
        let g = groups_per_rho[rho];
        groups_per_rho[rho] += 1;
        tops.push(TopPlan {
            o,
            g,
            kappa: kappa as u64,
        });
        mids.push(MidPlan {
            rho,
            rho_hat,
            h,
            entries: entries.clone(),
            offset_width,
        });
    }
    tops.push(TopPlan {
        o: nsb as u64,
        g: 0,
        kappa: 0,
    });

    let max_of = |it: &mut dyn Iterator<Item = u64>| it.max().unwrap_or(0);
    let widths = Widths {
        o: bits_for_range(nsb as u64 + 1),
        g: bits_for_range(max_of(&mut tops.iter().map(|t| t.g)) + 1),
        kappa: bits_for_range(max_of(&mut tops.iter().map(|t| t.kappa)) + 1),
        rho_hat: bits_for_range(max_of(&mut mids.iter().map(|m| m.rho_hat)) + 1),
        h: bits_for_range(max_of(&mut mids.iter().map(|m| m.h)) + 1),
        c: bits_for_range(max_of(&mut counters.iter().flatten().copied()) + 1),
    };
    if widths.o + widths.g + widths.kappa > 64 {
        return Err(Error::TooLong(summary.len()));
    }

    // pass 2
    let top_width = widths.o + widths.g + widths.kappa;
    let mut top = PackedArray::new(top_width, tops.len());
    for (j, t) in tops.iter().enumerate() {
        top.set(j, t.o | t.g << widths.o | t.kappa << (widths.o + widths.g));
    }

    let mut mid = vec![BitBuf::new(); groups_per_rho.len()];
    for m in &mids {
        let buf = &mut mid[m.rho];
        buf.push(widths.rho_hat, m.rho_hat);
        buf.push(widths.h, m.h);
        for &(off, c) in &m.entries {
            buf.push(m.rho as u32, off | c << m.offset_width);
        }
    }

    let counters = counters
        .iter()
        .map(|run| PackedArray::from_values(widths.c, run))
        .collect();
    let bot = bots
        .iter()
        .enumerate()
        .map(|(w, vals)| PackedArray::from_values(w as u32 + 1, vals))
        .collect();

    Ok(SampleTree3 {
        bit,
        a_log: a.trailing_zeros(),
        b_log: b.trailing_zeros(),
        alpha_log: alpha.trailing_zeros(),
        sb_size: summary.superblock_size(),
        count,
        nsb,
        widths,
        top,
        mid,
        counters,
        bot,
    })
}
