//! Query-latency measurement and CSV reporting.

use std::fmt;
use std::fs::OpenOptions;
use std::hint::black_box;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rs3::{Bit, RankSelect};
use serde::{Deserialize, Serialize};

use crate::gen::{longest_run, SplitMix64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Rank1,
    Rank0,
    Select1,
    Select0,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::Rank1, Op::Rank0, Op::Select1, Op::Select0];

    pub fn name(self) -> &'static str {
        match self {
            Op::Rank1 => "rank1",
            Op::Rank0 => "rank0",
            Op::Select1 => "select1",
            Op::Select0 => "select0",
        }
    }

    pub fn bit(self) -> Bit {
        match self {
            Op::Rank1 | Op::Select1 => Bit::One,
            Op::Rank0 | Op::Select0 => Bit::Zero,
        }
    }

    pub fn is_select(self) -> bool {
        matches!(self, Op::Select1 | Op::Select0)
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Op {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Op::ALL.into_iter().find(|o| o.name() == s).ok_or_else(|| {
            format!("unknown operation {s:?} (expected rank1, rank0, select1 or select0)")
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Workload {
    /// Arguments drawn uniformly over the valid range.
    Uniform,
    /// Every query asks for the first bit right after the longest run of the
    /// opposite value.
    AfterLongestGap,
}

impl FromStr for Workload {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Workload::Uniform),
            "after-longest-gap" => Ok(Workload::AfterLongestGap),
            _ => Err(format!(
                "unknown workload {s:?} (expected uniform or after-longest-gap)"
            )),
        }
    }
}

/// One CSV row. Column order is the field order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub structure: String,
    pub config: String,
    pub n: usize,
    pub density: f64,
    pub operation: String,
    pub queries: usize,
    pub ns_per_query: f64,
    pub space_overhead_percent: f64,
    pub seed: u64,
    pub probe_max: usize,
    pub answer_xor: u64,
}

/// Query arguments for `op`. Returns an empty list when the operation has
/// no valid argument (select on a bit value that does not occur).
pub fn make_queries(
    rs: &RankSelect,
    op: Op,
    workload: Workload,
    count: usize,
    seed: u64,
) -> Vec<usize> {
    let n = rs.len();
    let range = if op.is_select() {
        rs.count(op.bit())
    } else {
        n + 1
    };
    if range == 0 {
        return Vec::new();
    }
    match workload {
        Workload::Uniform => {
            let mut rng = SplitMix64::new(seed);
            (0..count)
                .map(|_| rng.below(range as u64) as usize)
                .collect()
        }
        Workload::AfterLongestGap => {
            let target = op.bit() == Bit::One;
            let pos = longest_run(rs.bit_vector(), !target)
                .map(|(start, len)| start + len)
                .filter(|&p| p < n)
                .unwrap_or(0);
            let arg = if op.is_select() {
                // rank of the first target bit at or after pos
                rs.rank(op.bit(), pos).unwrap().min(range - 1)
            } else {
                pos
            };
            vec![arg; count]
        }
    }
}

/// Times `op` over `queries` and returns `(ns per query, xor of answers)`.
pub fn time_queries(rs: &RankSelect, op: Op, queries: &[usize]) -> (f64, u64) {
    if queries.is_empty() {
        return (0.0, 0);
    }
    let mut acc = 0u64;
    let start = Instant::now();
    match op {
        Op::Rank1 => {
            for &q in queries {
                acc ^= rs.rank1(black_box(q)).unwrap() as u64;
            }
        }
        Op::Rank0 => {
            for &q in queries {
                acc ^= rs.rank0(black_box(q)).unwrap() as u64;
            }
        }
        Op::Select1 => {
            for &q in queries {
                acc ^= rs.select1(black_box(q)).unwrap() as u64;
            }
        }
        Op::Select0 => {
            for &q in queries {
                acc ^= rs.select0(black_box(q)).unwrap() as u64;
            }
        }
    }
    let elapsed = start.elapsed();
    (
        elapsed.as_nanos() as f64 / queries.len() as f64,
        black_box(acc),
    )
}

/// Largest probe count over `queries` (0 for rank operations).
pub fn probe_max(rs: &RankSelect, op: Op, queries: &[usize]) -> usize {
    if !op.is_select() {
        return 0;
    }
    queries
        .iter()
        .map(|&q| rs.select_traced(op.bit(), q).unwrap().probes)
        .max()
        .unwrap_or(0)
}

/// Space overhead of the parts `op` needs: the summary tree, plus the sample
/// tree for select operations.
pub fn overhead_percent(rs: &RankSelect, op: Op) -> f64 {
    let s = rs.space_report();
    let bits = s.summary_bits
        + match op {
            Op::Select1 => s.sel1_bits,
            Op::Select0 => s.sel0_bits,
            _ => 0,
        };
    s.percent(bits)
}

pub struct BenchInput<'a> {
    pub rs: &'a RankSelect,
    pub structure: &'a str,
    pub op: Op,
    pub workload: Workload,
    pub queries: usize,
    pub seed: u64,
}

pub fn run(input: &BenchInput<'_>) -> BenchRow {
    let rs = input.rs;
    let qs = make_queries(rs, input.op, input.workload, input.queries, input.seed);
    let (ns, xor) = time_queries(rs, input.op, &qs);
    BenchRow {
        structure: input.structure.to_string(),
        config: rs.config().to_string(),
        n: rs.len(),
        density: rs.count_ones() as f64 / rs.len() as f64,
        operation: input.op.name().to_string(),
        queries: qs.len(),
        ns_per_query: ns,
        space_overhead_percent: overhead_percent(rs, input.op),
        seed: input.seed,
        probe_max: probe_max(rs, input.op, &qs),
        answer_xor: xor,
    }
}

/// Appends rows to `path`, writing the header only when the file is new or
/// empty.
pub fn append_csv(path: &Path, rows: &[BenchRow]) -> anyhow::Result<()> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let fresh = file.metadata()?.len() == 0;
    let mut w = csv::WriterBuilder::new()
        .has_headers(fresh)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> anyhow::Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
