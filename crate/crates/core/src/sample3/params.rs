//! Sampling-rate formulas and the space bound used to check them.
//!
//! All logarithms are base 2. `clog(x) = max(1, log2 x)` keeps the formulas
//! finite for tiny arguments.

use alloc::vec::Vec;

use crate::summary::SummaryTree;
use crate::{Bit, Error, Result};

use super::SampleTree3;

/// Largest sampling rate the formulas will return.
pub const MAX_RATE: usize = 1 << 40;

fn clog(x: f64) -> f64 {
    if x > 2.0 {
        libm::log2(x)
    } else {
        1.0
    }
}

/// Smallest power of two `>= x`, at least 1 and at most [`MAX_RATE`].
pub fn round_up_pow2(x: f64) -> usize {
    // also catches NaN
    if x.partial_cmp(&1.0) != Some(core::cmp::Ordering::Greater) {
        return 1;
    }
    if x >= MAX_RATE as f64 {
        return MAX_RATE;
    }
    (libm::ceil(x) as usize).next_power_of_two()
}

fn check_alpha(alpha: usize) -> Result<()> {
    if alpha.is_power_of_two() && (2..=64).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Real-valued top-level rate that minimizes the 3-level space bound:
/// `((3m / (sqrt(2) n)) * (alpha / log alpha) * L * log(n / L))^(2/3)`.
pub fn optimal_a_real(n: usize, m: usize, sb_size: usize, alpha: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if m == 0 {
        return Err(Error::NoSampledBits);
    }
    let (n, m, l, al) = (n as f64, m as f64, sb_size as f64, alpha as f64);
    let base = 3.0 * m / (core::f64::consts::SQRT_2 * n) * (al / libm::log2(al)) * l * clog(n / l);
    Ok(libm::pow(base, 2.0 / 3.0))
}

/// `a*`: [`optimal_a_real`] rounded up to a power of two.
pub fn optimal_a(n: usize, m: usize, sb_size: usize, alpha: usize) -> Result<usize> {
    Ok(round_up_pow2(optimal_a_real(n, m, sb_size, alpha)?))
}

/// `b*`: next power of two `>= sqrt(2a)`, capped at `a`.
pub fn optimal_b(a: usize) -> usize {
    round_up_pow2(libm::sqrt(2.0 * a as f64)).min(a).max(1)
}

/// Rate that keeps top-level gaps near `alpha / 3` superblocks on uniform
/// inputs: `max(1, pow2(alpha * L * m / (3n)))`.
pub fn a_fast(n: usize, m: usize, sb_size: usize, alpha: usize) -> Result<usize> {
    check_alpha(alpha)?;
    if m == 0 {
        return Err(Error::NoSampledBits);
    }
    let x = alpha as f64 * sb_size as f64 * m as f64 / (3.0 * n as f64);
    Ok(round_up_pow2(x))
}

/// Asymptotic space of the 3-level tree in bits, lower order terms dropped.
pub fn space_bound_lemma3(
    n: usize,
    m: usize,
    sb_size: usize,
    a: usize,
    b: usize,
    alpha: usize,
) -> f64 {
    bound_terms(n, m, sb_size, a, b, alpha).iter().sum()
}

/// The four summands of [`space_bound_lemma3`]: top array, group
/// addressing, mid-groups, bot-groups.
fn bound_terms(n: usize, m: usize, sb_size: usize, a: usize, b: usize, alpha: usize) -> [f64; 4] {
    let (nf, mf, l, af, bf, al) = (
        n as f64,
        m as f64,
        sb_size as f64,
        a as f64,
        b as f64,
        alpha as f64,
    );
    let s = nf / (al * l);
    let t = mf / af;
    let g = s.min(t);
    let top = t * (clog(nf / l) + clog(g) + clog(clog(af / bf)));
    let bot = s * bf * clog(al);
    if g <= 0.0 {
        return [top, 0.0, 0.0, bot];
    }
    let spread = clog(al * s / g);
    let groups = g * (clog(s / g) + 1.0) * clog(s);
    let mid = g * (2.0 * (af / bf) * spread + clog(spread) + clog(g));
    [top, groups, mid, bot]
}

/// The default search grid around `(a*, b*)`: `a` in `a*/8 ..= 8a*`, `b` in
/// `b*/8 ..= 8b*`, powers of two with `1 <= b <= a`.
pub fn default_grid(a_star: usize, b_star: usize) -> Vec<(usize, usize)> {
    let mut grid = Vec::new();
    for sa in -3i32..=3 {
        let a = scale(a_star, sa);
        for sb in -3i32..=3 {
            let b = scale(b_star, sb);
            if b <= a && !grid.contains(&(a, b)) {
                grid.push((a, b));
            }
        }
    }
    grid
}

fn scale(x: usize, shift: i32) -> usize {
    if shift >= 0 {
        (x << shift).min(MAX_RATE)
    } else {
        (x >> -shift).max(1)
    }
}

/// Builds a tree for every grid pair and returns the pair with the smallest
/// [`SampleTree3::measured_size`]. Ties go to the larger `a`, then the larger
/// `b`.
pub fn a_min(
    summary: &SummaryTree,
    bit: Bit,
    alpha: usize,
    grid: &[(usize, usize)],
) -> Result<(usize, usize)> {
    let mut best: Option<(u64, usize, usize)> = None;
    for &(a, b) in grid {
        let size = SampleTree3::build(summary, bit, a, b, alpha)?.measured_size();
        let better = match best {
            None => true,
            Some((bs, ba, bb)) => size < bs || (size == bs && (a, b) > (ba, bb)),
        };
        if better {
            best = Some((size, a, b));
        }
    }
    best.map(|(_, a, b)| (a, b)).ok_or(Error::EmptyGrid)
}
