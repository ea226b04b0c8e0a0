use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rs3::{BitVector, Preset, RankSelect, RsConfig, TreeKind};
use rs3_cli::bench::{self, BenchInput, Op, Workload};
use rs3_cli::format::{decode_bits, decode_index, encode_bits, encode_index};
use rs3_cli::gen::InstanceSpec;
use rs3_cli::verify::verify;

#[derive(Parser)]
#[command(
    name = "rs3",
    version,
    about = "Rank/select index with a compact select sample tree"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Uniform,
    Gap,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tree {
    #[value(name = "3star")]
    Three,
    #[value(name = "2star")]
    Two,
}

impl From<Tree> for TreeKind {
    fn from(t: Tree) -> Self {
        match t {
            Tree::Three => TreeKind::ThreeStar,
            Tree::Two => TreeKind::TwoStar,
        }
    }
}

#[derive(clap::Args)]
struct IndexArgs {
    /// Bit-vector file written by `gen`.
    #[arg(long = "in")]
    input: PathBuf,
    /// small, robust, large or compact.
    #[arg(long, default_value = "robust")]
    preset: Preset,
    #[arg(long, value_enum, default_value = "3star")]
    tree: Tree,
}

impl IndexArgs {
    fn build(&self) -> Result<RankSelect> {
        let v = read_bits(&self.input)?;
        let config = RsConfig::preset(self.preset).with_tree(self.tree.into());
        RankSelect::build(v, config)
            .with_context(|| format!("building index over {}", self.input.display()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a bit vector.
    Gen {
        #[arg(long, value_enum, default_value = "uniform")]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Gap length exponent: the zero run has 10^d bits.
        #[arg(long, default_value_t = 4)]
        d: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time one operation and append a CSV row.
    Bench {
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long)]
        op: Op,
        #[arg(long, default_value_t = 1_000_000)]
        queries: usize,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// uniform or after-longest-gap.
        #[arg(long, default_value = "uniform")]
        workload: Workload,
    },
    /// Print the space breakdown.
    Space {
        #[command(flatten)]
        index: IndexArgs,
    },
    /// Check every rank and select answer against a linear walk.
    Verify {
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long, default_value_t = default_threads())]
        threads: usize,
    },
    /// Build an index and write it to a file.
    Save {
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Load a saved index, check it, and print a summary.
    Load {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn read_bits(path: &Path) -> Result<BitVector> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    decode_bits(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn print_space(rs: &RankSelect) {
    let s = rs.space_report();
    println!("config   {}", rs.config());
    println!("n        {}", s.n);
    println!("ones     {}", rs.count_ones());
    println!(
        "summary  {} bits ({:.4}%)",
        s.summary_bits,
        s.summary_percent()
    );
    println!(
        "sel1     {} bits ({:.4}%)",
        s.sel1_bits,
        s.percent(s.sel1_bits)
    );
    println!(
        "sel0     {} bits ({:.4}%)",
        s.sel0_bits,
        s.percent(s.sel0_bits)
    );
    println!(
        "total    {} bits ({:.4}%)",
        s.total_bits(),
        s.total_percent()
    );
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen {
            kind,
            n,
            density,
            d,
            seed,
            out,
        } => {
            let spec = match kind {
                Kind::Uniform => InstanceSpec::uniform(n, density, seed),
                Kind::Gap => InstanceSpec::gap(n, d, density, seed),
            };
            let v = spec.generate()?;
            fs::write(&out, encode_bits(&v))
                .with_context(|| format!("writing {}", out.display()))?;
            println!(
                "wrote {} bits ({} ones) to {}",
                v.len(),
                v.count_ones(),
                out.display()
            );
        }
        Command::Bench {
            index,
            op,
            queries,
            csv,
            seed,
            workload,
        } => {
            let rs = index.build()?;
            if op.is_select() && rs.select_index(op.bit()).is_none() {
                bail!("{op} is disabled in preset {}", index.preset.name());
            }
            let row = bench::run(&BenchInput {
                rs: &rs,
                structure: "rs3",
                op,
                workload,
                queries,
                seed,
            });
            println!(
                "{} {}: {:.2} ns/query over {} queries, overhead {:.4}%, max probes {}",
                row.config,
                row.operation,
                row.ns_per_query,
                row.queries,
                row.space_overhead_percent,
                row.probe_max
            );
            bench::append_csv(&csv, &[row])?;
        }
        Command::Space { index } => print_space(&index.build()?),
        Command::Verify { index, threads } => {
            let rs = index.build()?;
            let report = verify(&rs, threads);
            match report.first_failure {
                None => println!("ok: {} checks passed", report.checks),
                Some(m) => {
                    println!("FAILED after {} checks: {m}", report.checks);
                    return Ok(ExitCode::FAILURE);
                }
            }
        }
        Command::Save { index, out } => {
            let rs = index.build()?;
            fs::write(&out, encode_index(&rs))
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} to {}", rs.config(), out.display());
        }
        Command::Load { input } => {
            let bytes = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let rs =
                decode_index(&bytes).with_context(|| format!("decoding {}", input.display()))?;
            print_space(&rs);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
