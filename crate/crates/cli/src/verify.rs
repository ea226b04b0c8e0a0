//! Checks every query of a built index against a bit-by-bit walk.
//!
//! The walk is split into contiguous shards, one per thread. Each shard starts
//! from the popcount of the words before it and then advances one bit at a
//! time, so memory use stays constant however long the vector is.

use std::fmt;
use std::thread;

use rs3::{Bit, RankSelect};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    /// Bit position whose checks failed.
    pub position: usize,
    pub op: &'static str,
    pub arg: usize,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at bit {}: {}({}): expected {}, got {}",
            self.position, self.op, self.arg, self.expected, self.got
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: u64,
    /// The failing check with the smallest bit position, if any.
    pub first_failure: Option<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

fn check(
    position: usize,
    op: &'static str,
    arg: usize,
    expected: usize,
    got: rs3::Result<usize>,
) -> Option<Mismatch> {
    match got {
        Ok(g) if g == expected => None,
        Ok(g) => Some(Mismatch {
            position,
            op,
            arg,
            expected: expected.to_string(),
            got: g.to_string(),
        }),
        Err(e) => Some(Mismatch {
            position,
            op,
            arg,
            expected: expected.to_string(),
            got: format!("error: {e}"),
        }),
    }
}

/// Returns `(checks, first mismatch)` for positions `lo..hi`.
fn check_shard(rs: &RankSelect, lo: usize, hi: usize) -> (u64, Option<Mismatch>) {
    let v = rs.bit_vector();
    let words = v.words();
    let mut ones: usize = words[..lo / 64]
        .iter()
        .map(|w| w.count_ones() as usize)
        .sum();
    for p in (lo / 64) * 64..lo {
        ones += v.get(p) as usize;
    }
    let sel0 = rs.select_index(Bit::Zero).is_some();
    let mut checks = 0u64;
    for p in lo..hi {
        let zeros = p - ones;
        let mut found = check(p, "rank1", p, ones, rs.rank1(p))
            .or_else(|| check(p, "rank0", p, zeros, rs.rank0(p)));
        checks += 2;
        if found.is_none() {
            if v.get(p) {
                found = check(p, "select1", ones, p, rs.select1(ones));
                checks += 1;
            } else if sel0 {
                found = check(p, "select0", zeros, p, rs.select0(zeros));
                checks += 1;
            }
        }
        if let Some(m) = found {
            return (checks, Some(m));
        }
        ones += v.get(p) as usize;
    }
    (checks, None)
}

/// Runs the full check on `threads` threads (at least one).
pub fn verify(rs: &RankSelect, threads: usize) -> VerifyReport {
    let n = rs.len();
    let threads = threads.clamp(1, n.div_ceil(4096).max(1));
    let shard = n.div_ceil(threads).next_multiple_of(64);
    let results: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let (lo, hi) = ((t * shard).min(n), ((t + 1) * shard).min(n));
                s.spawn(move || check_shard(rs, lo, hi))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verify shard panicked"))
            .collect()
    });

    let mut report = VerifyReport::default();
    let mut first: Option<Mismatch> = None;
    for (checks, fail) in results {
        report.checks += checks;
        // shards are in position order
        first = first.or(fail);
    }

    // end-of-range behaviour
    let m = rs.count_ones();
    let tail = [
        check(n, "rank1", n, m, rs.rank1(n)),
        check(n, "rank0", n, n - m, rs.rank0(n)),
        rs.rank1(n + 1).ok().map(|g| Mismatch {
            position: n,
            op: "rank1",
            arg: n + 1,
            expected: "an out-of-range error".into(),
            got: g.to_string(),
        }),
        rs.select1(m).ok().map(|g| Mismatch {
            position: n,
            op: "select1",
            arg: m,
            expected: "an out-of-range error".into(),
            got: g.to_string(),
        }),
    ];
    report.checks += tail.len() as u64;
    report.first_failure = first.or_else(|| tail.into_iter().flatten().next());
    report
}
