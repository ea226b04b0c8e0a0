/// Minimal number of bits that can hold every value in `0..r`.
///
/// `bits_for_range(1) == 0`; for `r >= 2` this is `ceil(log2(r))`, computed
/// from the leading-zero count of `r - 1`.
#[inline(always)]
pub const fn bits_for_range(r: u64) -> u32 {
    debug_assert!(r >= 1, "bits_for_range(0) is undefined");
    if r <= 1 {
        0
    } else {
        64 - (r - 1).leading_zeros()
    }
}

/// `floor(log2(x))` for `x >= 1`.
#[inline(always)]
pub const fn floor_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    63 - x.leading_zeros()
}

/// Word with the low `width` bits set, `width <= 64`.
#[inline(always)]
pub const fn low_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[inline(always)]
pub const fn popcount_word(w: u64) -> u32 {
    w.count_ones()
}

/// Number of set bits among positions `0..i` of `w`.
#[inline(always)]
pub const fn rank_word_prefix(w: u64, i: u32) -> u32 {
    debug_assert!(i <= 64);
    (w & low_mask(i)).count_ones()
}

/// Position of the set bit with 0-based rank `j` in `w`.
///
/// Uses `pdep` + `tzcnt` when the target has BMI2, and a byte-wise broadword
/// search otherwise. Both return identical results.
#[inline(always)]
pub fn select_in_word(w: u64, j: u32) -> u32 {
    debug_assert!(j < w.count_ones(), "select_in_word: rank {j} >= popcount");
    #[cfg(all(target_arch = "x86_64", target_feature = "bmi2"))]
    {
        // SAFETY: the bmi2 target feature is statically enabled.
        unsafe { core::arch::x86_64::_pdep_u64(1u64 << j, w).trailing_zeros() }
    }
    #[cfg(not(all(target_arch = "x86_64", target_feature = "bmi2")))]
    {
        select_in_word_portable(w, j)
    }
}

const fn build_select_in_byte() -> [u8; 256 * 8] {
    let mut table = [8u8; 256 * 8];
    let mut byte = 0;
    while byte < 256 {
        let mut seen = 0;
        let mut bit = 0;
        while bit < 8 {
            if byte & (1 << bit) != 0 {
                table[byte * 8 + seen] = bit as u8;
                seen += 1;
            }
            bit += 1;
        }
        byte += 1;
    }
    table
}

static SELECT_IN_BYTE: [u8; 256 * 8] = build_select_in_byte();

const ONES_STEP_8: u64 = 0x0101_0101_0101_0101;

/// Portable fallback for [`select_in_word`].
#[inline]
pub fn select_in_word_portable(w: u64, j: u32) -> u32 {
    debug_assert!(j < w.count_ones());
    // Per-byte popcounts, then inclusive byte prefix sums via one multiply.
    let mut s = w - ((w >> 1) & 0x5555_5555_5555_5555);
    s = (s & 0x3333_3333_3333_3333) + ((s >> 2) & 0x3333_3333_3333_3333);
    s = (s + (s >> 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    let prefix = s.wrapping_mul(ONES_STEP_8);

    let mut byte = 0u32;
    let mut before = 0u32;
    while byte < 8 {
        let upto = ((prefix >> (8 * byte)) & 0xFF) as u32;
        if upto > j {
            break;
        }
        before = upto;
        byte += 1;
    }
    let b = ((w >> (8 * byte)) & 0xFF) as usize;
    8 * byte + SELECT_IN_BYTE[b * 8 + (j - before) as usize] as u32
}

/// Reads `width <= 64` bits starting at bit offset `offset`.
#[inline(always)]
pub fn read_bits(words: &[u64], offset: usize, width: u32) -> u64 {
    if width == 0 {
        return 0;
    }
    let idx = offset >> 6;
    let shift = (offset & 63) as u32;
    let mut v = words[idx] >> shift;
    if shift + width > 64 {
        v |= words[idx + 1] << (64 - shift);
    }
    v & low_mask(width)
}

/// Overwrites `width <= 64` bits at `offset` with the low bits of `value`.
#[inline]
pub fn write_bits(words: &mut [u64], offset: usize, width: u32, value: u64) {
    if width == 0 {
        return;
    }
    debug_assert!(width == 64 || value >> width == 0);
    let idx = offset >> 6;
    let shift = (offset & 63) as u32;
    let mask = low_mask(width);
    words[idx] = (words[idx] & !(mask << shift)) | (value << shift);
    if shift + width > 64 {
        let spill = 64 - shift;
        let hi_mask = mask >> spill;
        words[idx + 1] = (words[idx + 1] & !hi_mask) | (value >> spill);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_rank(w: u64, i: u32) -> u32 {
        (0..i).filter(|&t| w >> t & 1 == 1).count() as u32
    }

    fn brute_select(w: u64, j: u32) -> u32 {
        let mut seen = 0;
        for p in 0..64 {
            if w >> p & 1 == 1 {
                if seen == j {
                    return p;
                }
                seen += 1;
            }
        }
        unreachable!()
    }

    #[test]
    fn bits_for_range_examples() {
        assert_eq!(bits_for_range(1), 0);
        assert_eq!(bits_for_range(2), 1);
        // smallest w with 2^w >= 9, by exhaustive check
        let w = (0..=8).find(|&w| 1u64 << w >= 9).unwrap();
        assert_eq!(w, 4);
        assert_eq!(bits_for_range(9), 4);
        assert_eq!(bits_for_range(u64::MAX), 64);
        for k in 0..64 {
            assert_eq!(bits_for_range(1 << k), k);
        }
    }

    #[test]
    fn bits_for_range_is_minimal() {
        for r in 1..5000u64 {
            let w = bits_for_range(r);
            assert!(r - 1 <= low_mask(w));
            if w > 0 {
                assert!(r - 1 > low_mask(w - 1));
            }
        }
    }

    #[test]
    fn popcount_examples() {
        assert_eq!(popcount_word(0), 0);
        assert_eq!(popcount_word(u64::MAX), 64);
        assert_eq!(popcount_word(0xB2), brute_rank(0xB2, 64));
        assert_eq!(popcount_word(0xB2), 4);
    }

    #[test]
    fn rank_prefix_examples() {
        assert_eq!(rank_word_prefix(0xDEAD_BEEF, 0), 0);
        assert_eq!(rank_word_prefix(u64::MAX, 17), 17);
        assert_eq!(brute_rank(0xB2, 5), 2);
        assert_eq!(rank_word_prefix(0xB2, 5), 2);
        assert_eq!(rank_word_prefix(u64::MAX, 64), 64);
    }

    #[test]
    fn select_examples() {
        assert_eq!(select_in_word(1, 0), 0);
        assert_eq!(select_in_word(1 << 63, 0), 63);
        assert_eq!(brute_select(0xB2, 2), 5);
        assert_eq!(select_in_word(0xB2, 2), 5);
        assert_eq!(select_in_word(u64::MAX, 63), 63);
    }

    #[test]
    #[should_panic]
    #[cfg(debug_assertions)]
    fn select_past_popcount_traps_in_debug() {
        select_in_word(0xB2, 4);
    }

    #[test]
    fn read_write_bits_straddle() {
        let mut words = [0u64; 3];
        write_bits(&mut words, 60, 12, 0xABC);
        assert_eq!(read_bits(&words, 60, 12), 0xABC);
        write_bits(&mut words, 64, 64, u64::MAX);
        assert_eq!(read_bits(&words, 60, 4), 0xC);
        assert_eq!(read_bits(&words, 64, 64), u64::MAX);
        write_bits(&mut words, 100, 20, 0);
        assert_eq!(
            read_bits(&words, 64, 36),
            low_mask(36) & !(low_mask(20) << 36)
        );
    }

    proptest! {
        #[test]
        fn select_then_rank_is_identity(w in any::<u64>(), j in 0u32..64) {
            let pc = w.count_ones();
            prop_assume!(pc > 0);
            let j = j % pc;
            let p = select_in_word(w, j);
            prop_assert!(w >> p & 1 == 1);
            prop_assert_eq!(rank_word_prefix(w, p), j);
            prop_assert_eq!(select_in_word_portable(w, j), brute_select(w, j));
            prop_assert_eq!(p, brute_select(w, j));
        }

        #[test]
        fn rank_matches_bit_sum(w in any::<u64>(), i in 0u32..=64) {
            prop_assert_eq!(rank_word_prefix(w, i), brute_rank(w, i));
        }

        #[test]
        fn bits_for_range_monotone(r in 1u64..u64::MAX) {
            prop_assert!(bits_for_range(r) <= bits_for_range(r + 1));
        }

        #[test]
        fn write_then_read(offset in 0usize..128, width in 0u32..=64, value in any::<u64>(), noise in any::<[u64; 3]>()) {
            let mut words = noise;
            let value = value & low_mask(width);
            write_bits(&mut words, offset, width, value);
            prop_assert_eq!(read_bits(&words, offset, width), value);
            // bits outside the field are untouched
            for p in 0..192 {
                if p < offset || p >= offset + width as usize {
                    prop_assert_eq!(read_bits(&words, p, 1), read_bits(&noise, p, 1));
                }
            }
        }
    }
}
