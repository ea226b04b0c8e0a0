use super::*;
use crate::oracle::NaiveIndex;
use crate::rankselect::parts::PartReader;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};

fn check_all(v: &BitVector, st: &SummaryTree, t: &SampleTree3) -> [usize; 3] {
    let oracle = NaiveIndex::new(v);
    let bit = t.bit();
    assert_eq!(t.count(), oracle.count(bit));
    let mut levels = [0usize; 3];
    for i in 0..oracle.count(bit) {
        let x = t.select_traced(st, v, i).unwrap();
        assert_eq!(x.position, oracle.select(bit, i), "rank {i}");
        assert!(x.probes <= t.alpha(), "rank {i}: {} probes", x.probes);
        if x.level == SampleLevel::Bot {
            assert_eq!(x.probes, 1);
        }
        levels[x.level as usize] += 1;
    }
    assert!(t.select(st, v, oracle.count(bit)).is_err());
    levels
}

#[test]
fn all_zeros_has_only_the_sentinel() {
    let v = BitVector::zeros(1 << 16);
    let st = SummaryTree::build(&v, 512, 2).unwrap();
    let t = SampleTree3::build(&st, Bit::One, 1, 1, 8).unwrap();
    assert_eq!(t.top_len(), 1);
    assert_eq!(t.mid_groups(), 0);
    assert_eq!(t.bot_groups(), 0);
    let w = t.widths();
    assert_eq!(
        t.measured_size(),
        (w.o + w.g + w.kappa) as u64 + HEADER_BITS
    );
    assert!(t.select(&st, &v, 0).is_err());
}

#[test]
fn all_ones_stays_at_top_level() {
    let v = BitVector::ones(1 << 20);
    let st = SummaryTree::build(&v, 2048, 2).unwrap();
    let t = SampleTree3::build(&st, Bit::One, 4096, 64, 8).unwrap();
    assert_eq!(t.mid_groups(), 0);
    let w = t.widths();
    // 16 superblocks, sentinel offset 16 needs 5 bits
    assert_eq!((w.o, w.g, w.kappa), (5, 0, 0));
    assert_eq!(t.measured_size(), ((1 << 20) / 4096 + 1) * 5 + HEADER_BITS);
    for i in (0..v.len()).step_by(1013) {
        assert_eq!(t.select(&st, &v, i).unwrap(), i);
    }
}

#[test]
fn alternating_bits() {
    let v = BitVector::from_fn(64, |i| i % 2 == 0);
    let st = SummaryTree::build(&v, 512, 2).unwrap();
    let t = SampleTree3::build(&st, Bit::One, 4, 2, 2).unwrap();
    assert_eq!(t.select(&st, &v, 3).unwrap(), 6);
}

fn gap_vector() -> BitVector {
    // 10^5 ones, 10^6 zeros, 10^5 ones
    BitVector::from_fn(1_200_000, |i| !(100_000..1_100_000).contains(&i))
}

#[test]
fn gap_instance_descends() {
    let v = gap_vector();
    let st = SummaryTree::build(&v, 512, 2).unwrap();
    let m = v.count_ones();
    let a = optimal_a(v.len(), m, st.superblock_size(), 8).unwrap();
    let t = SampleTree3::build(&st, Bit::One, a, optimal_b(a), 8).unwrap();
    assert!(t.mid_groups() >= 1);
    let x = t.select_traced(&st, &v, 100_000).unwrap();
    assert_eq!(x.position, 1_100_000);
    assert_ne!(x.level, SampleLevel::Top);
    check_all(&v, &st, &t);
}

#[test]
fn sparse_vector_reaches_bot_level() {
    let mut rng = StdRng::seed_from_u64(31);
    let v = BitVector::from_fn(1 << 24, |_| rng.gen_bool(1e-4));
    let st = SummaryTree::build(&v, 512, 2).unwrap();
    let t = SampleTree3::build(&st, Bit::One, 4096, 64, 2).unwrap();
    assert!(t.bot_groups() > 0);
    let levels = check_all(&v, &st, &t);
    assert!(levels[SampleLevel::Bot as usize] > 0);
}

#[test]
fn uniform_exhaustive() {
    let mut rng = StdRng::seed_from_u64(9);
    let v = BitVector::from_fn(1 << 22, |_| rng.gen_bool(0.5));
    for (l0, k) in [(512, 2), (2048, 3)] {
        let st = SummaryTree::build(&v, l0, k).unwrap();
        for bit in [Bit::One, Bit::Zero] {
            let m = st.count(bit);
            let a = optimal_a(v.len(), m, st.superblock_size(), 16).unwrap();
            let t = SampleTree3::build(&st, bit, a, optimal_b(a), 16).unwrap();
            check_all(&v, &st, &t);
        }
    }
}

#[test]
fn size_within_bound_at_optimal_rates() {
    let mut rng = StdRng::seed_from_u64(33);
    for (n, p, alpha) in [(1 << 22, 0.5, 16), (1 << 22, 0.01, 8), (1 << 23, 0.001, 4)] {
        let v = BitVector::from_fn(n, |_| rng.gen_bool(p));
        let st = SummaryTree::build(&v, 512, 2).unwrap();
        let m = v.count_ones();
        let l = st.superblock_size();
        let a = optimal_a(n, m, l, alpha).unwrap();
        let b = optimal_b(a);
        let t = SampleTree3::build(&st, Bit::One, a, b, alpha).unwrap();
        let bound = space_bound_lemma3(n, m, l, a, b, alpha);
        assert!((t.measured_size() as f64) <= 1.25 * bound + 64.0 * 66.0);
    }
}

#[test]
fn a_min_singleton_and_exhaustive() {
    let v = BitVector::ones(1 << 18);
    let st = SummaryTree::build(&v, 512, 2).unwrap();
    assert_eq!(a_min(&st, Bit::One, 8, &[(256, 16)]).unwrap(), (256, 16));
    assert_eq!(a_min(&st, Bit::One, 8, &[]), Err(Error::EmptyGrid));

    let mut grid = Vec::new();
    for a in 0..12 {
        for b in 0..=a {
            grid.push((1usize << a, 1usize << b));
        }
    }
    // brute-force minimum with the same tie-break
    let mut best = (u64::MAX, 0, 0);
    for &(a, b) in &grid {
        let size = SampleTree3::build(&st, Bit::One, a, b, 8)
            .unwrap()
            .measured_size();
        if size < best.0 || (size == best.0 && (a, b) > (best.1, best.2)) {
            best = (size, a, b);
        }
    }
    assert_eq!(a_min(&st, Bit::One, 8, &grid).unwrap(), (best.1, best.2));
}

#[test]
fn a_min_no_larger_than_star() {
    let mut rng = StdRng::seed_from_u64(34);
    let v = BitVector::from_fn(1 << 22, |_| rng.gen_bool(0.5));
    let st = SummaryTree::build(&v, 512, 2).unwrap();
    let m = v.count_ones();
    let a = optimal_a(v.len(), m, st.superblock_size(), 16).unwrap();
    let b = optimal_b(a);
    let (am, bm) = a_min(&st, Bit::One, 16, &default_grid(a, b)).unwrap();
    let star = SampleTree3::build(&st, Bit::One, a, b, 16)
        .unwrap()
        .measured_size();
    let min = SampleTree3::build(&st, Bit::One, am, bm, 16)
        .unwrap()
        .measured_size();
    assert!(min <= star);
    assert!(star <= 4 * min);
}

#[test]
fn rejects_bad_rates() {
    let v = BitVector::ones(1000);
    let st = SummaryTree::build(&v, 512, 2).unwrap();
    assert_eq!(
        SampleTree3::build(&st, Bit::One, 8, 16, 8),
        Err(Error::InvalidSampleRates { a: 8, b: 16 })
    );
    assert_eq!(
        SampleTree3::build(&st, Bit::One, 12, 4, 8),
        Err(Error::InvalidSampleRates { a: 12, b: 4 })
    );
    assert_eq!(
        SampleTree3::build(&st, Bit::One, 8, 4, 1),
        Err(Error::InvalidAlpha(1))
    );
    assert_eq!(
        SampleTree3::build(&st, Bit::One, 8, 4, 128),
        Err(Error::InvalidAlpha(128))
    );
}

#[test]
fn parts_round_trip_and_size_consistency() {
    let mut rng = StdRng::seed_from_u64(35);
    let v = BitVector::from_fn(1 << 22, |_| rng.gen_bool(2e-4));
    let st = SummaryTree::build(&v, 512, 2).unwrap();
    let t = SampleTree3::build(&st, Bit::One, 256, 16, 2).unwrap();
    assert!(t.bot_groups() > 0);
    let parts = t.to_parts(0x10);
    let payload: u64 = parts.iter().map(|p| p.len * p.width as u64).sum();
    assert_eq!(payload, t.measured_size());
    let mut reader = PartReader::new(&parts);
    let back = SampleTree3::read_parts(&mut reader, 0x10, &st).unwrap();
    reader.finish().unwrap();
    assert_eq!(back, t);
}

fn clustered_vector(n: usize, runs: &[(usize, usize, f64)], seed: u64) -> BitVector {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut bits = Vec::with_capacity(n);
    let mut r = 0;
    while bits.len() < n {
        let (len, _, p) = runs[r % runs.len()];
        for _ in 0..len {
            if bits.len() == n {
                break;
            }
            bits.push(rng.gen_bool(p));
        }
        r += 1;
    }
    bits.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clustered_vectors_match_oracle(
        seed in any::<u64>(),
        n in 1usize..400_000,
        dense_len in 1usize..50_000,
        sparse_len in 1usize..300_000,
        p_dense in 0.0f64..=1.0,
        p_sparse in 0.0f64..0.001,
        a_log in 0u32..12,
        b_shift in 0u32..12,
        alpha_log in 1u32..=6,
        zero in any::<bool>(),
        k in 2u8..=3,
    ) {
        let v = clustered_vector(n, &[(dense_len, 0, p_dense), (sparse_len, 0, p_sparse)], seed);
        let st = SummaryTree::build(&v, 512, k).unwrap();
        let bit = if zero { Bit::Zero } else { Bit::One };
        let a = 1usize << a_log;
        let b = 1usize << a_log.saturating_sub(b_shift);
        let t = SampleTree3::build(&st, bit, a, b, 1 << alpha_log).unwrap();
        check_all(&v, &st, &t);
    }
}
