use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mutable_rank_select::bench::{
    self, run_bench, run_selfcheck, run_sweep, sweep, BenchError, KernelOverrides, Op, SelfCheckSpec, Structure,
    SweepSpec, WorkloadSpec, DEFAULT_MAX_LOG_U, DEFAULT_QUERIES,
};
use mutable_rank_select::{
    BitmapConfig, BlockBits, InWordKernel, IndexConfig, IndexKind, PopcountKernel, PrefixKernel, SearchKernel,
};

#[derive(Parser)]
#[command(name = "mrsb", version, about = "Benchmark and check the mutable rank/select bitmap")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time one operation, or check against the oracle, or report space.
    Bench(BenchArgs),
    /// Time a grid of operations over a range of bitmap sizes and write CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// Fraction of set bits, in [0, 1].
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = DEFAULT_QUERIES)]
    queries: usize,
    /// Timed passes; min/max are taken over them.
    #[arg(long, default_value_t = 5)]
    runs: usize,
    /// scalar | narrow | wide | fenwick (default wide).
    #[arg(long)]
    index: Option<IndexKind>,
    /// builtin | broadword | vector
    #[arg(long)]
    rank_popcount: Option<PopcountKernel>,
    /// loop | unrolled | lanes
    #[arg(long)]
    rank_prefix: Option<PrefixKernel>,
    /// builtin | broadword | vector
    #[arg(long)]
    select_popcount: Option<PopcountKernel>,
    /// loop | lanes
    #[arg(long)]
    select_search: Option<SearchKernel>,
    /// pdep | bw-sdsl | bw-succinct
    #[arg(long)]
    select_word: Option<InWordKernel>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Largest accepted log-u.
    #[arg(long, default_value_t = DEFAULT_MAX_LOG_U)]
    max_log_u: u32,
}

impl Common {
    fn kernels(&self) -> KernelOverrides {
        KernelOverrides {
            rank_popcount: self.rank_popcount,
            rank_prefix: self.rank_prefix,
            select_popcount: self.select_popcount,
            select_search: self.select_search,
            select_word: self.select_word,
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// rank | select | flip | access | sum | update | search
    #[arg(long, default_value = "rank")]
    op: Op,
    /// Bitmap of 2^log-u bits.
    #[arg(long, default_value_t = 20)]
    log_u: u32,
    /// 64 | 256 | 512
    #[arg(long, default_value = "256")]
    block: BlockBits,
    /// mutable | fenwick | naive
    #[arg(long, default_value = "mutable")]
    structure: Structure,
    /// Also write the result as a one-row CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Replay mixed operations against the oracle instead of timing.
    #[arg(long, conflicts_with_all = ["space_report", "csv"])]
    selfcheck: bool,
    /// Operations replayed by --selfcheck.
    #[arg(long, default_value_t = 100_000, requires = "selfcheck")]
    selfcheck_ops: usize,
    /// Print the space of the configured structure and exit.
    #[arg(long, conflicts_with = "csv")]
    space_report: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    /// Range `lo..hi` (inclusive) or a single value.
    #[arg(long, default_value = "10..20", value_parser = parse_range)]
    log_u: RangeInclusive<u32>,
    #[arg(long, value_delimiter = ',', default_value = "rank,select,flip")]
    ops: Vec<Op>,
    #[arg(long, value_delimiter = ',', default_value = "mutable,fenwick")]
    structures: Vec<Structure>,
    #[arg(long, value_delimiter = ',', default_value = "256")]
    block: Vec<BlockBits>,
    #[arg(long, default_value = "sweep.csv")]
    csv: PathBuf,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    plot: bool,
    #[command(flatten)]
    common: Common,
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((lo, hi)) => {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let (lo, hi) = (parse(lo)?, parse(hi)?);
            if lo > hi {
                return Err(format!("empty range {lo}..{hi}"));
            }
            Ok(lo..=hi)
        }
        None => parse(s).map(|v| v..=v),
    }
}

fn mutable_index(structure: Structure, index: Option<IndexKind>) -> Result<IndexKind, BenchError> {
    match (structure, index) {
        (Structure::Fenwick, Some(i)) if i != IndexKind::Fenwick => {
            Err(BenchError::Usage(format!("--structure fenwick conflicts with --index {i}")))
        }
        (Structure::Naive, Some(i)) => Err(BenchError::Usage(format!("--structure naive takes no index, got {i}"))),
        _ => Ok(index.unwrap_or(IndexKind::Segment(IndexConfig::Wide))),
    }
}

fn bench_cmd(a: BenchArgs) -> Result<ExitCode, BenchError> {
    let c = &a.common;
    let spec = WorkloadSpec {
        log_u: a.log_u,
        density: c.density,
        queries: c.queries,
        op: a.op,
        structure: a.structure,
        block: a.block,
        index: mutable_index(a.structure, c.index)?,
        kernels: c.kernels(),
        seed: c.seed,
        runs: c.runs,
        max_log_u: c.max_log_u,
    };

    if a.space_report {
        let r = spec.space_report()?;
        println!(
            "u=2^{} B={} index={}: bitmap {} bytes, index {} bytes, overhead {:.4}%",
            spec.log_u,
            spec.block,
            spec.index_name(),
            r.bitmap_bytes,
            r.index_bytes,
            r.overhead_percent
        );
        return Ok(ExitCode::SUCCESS);
    }

    if a.selfcheck {
        if a.structure == Structure::Naive {
            return Err(BenchError::Usage("--selfcheck compares against naive; pick mutable or fenwick".into()));
        }
        if spec.log_u == 0 || spec.log_u > spec.max_log_u {
            return Err(BenchError::Usage(format!("log-u {} outside 1..={}", spec.log_u, spec.max_log_u)));
        }
        let config = BitmapConfig::new(spec.block, spec.effective_index().unwrap())
            .with_kernels(spec.kernels.resolve(spec.block, spec.universe())?);
        let report = run_selfcheck(&SelfCheckSpec {
            log_u: spec.log_u,
            density: spec.density,
            seed: spec.seed,
            config,
            ops: a.selfcheck_ops,
        })?;
        for m in &report.mismatches {
            eprintln!("mismatch: {m}");
        }
        let verdict = if report.passed() { "ok" } else { "FAILED" };
        println!(
            "selfcheck {verdict}: {} bitmap ops, {} prefix-sum ops, {} mismatches",
            report.bitmap_ops,
            report.prefix_ops,
            report.mismatches.len()
        );
        return Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE });
    }

    let r = run_bench(&spec)?;
    println!("{r}");
    if let Some(path) = a.csv {
        bench::write_csv(&path, std::slice::from_ref(&r))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep_cmd(a: SweepArgs) -> Result<ExitCode, BenchError> {
    let c = &a.common;
    if a.structures.contains(&Structure::Mutable) && c.index == Some(IndexKind::Fenwick) {
        eprintln!("note: --index fenwick makes the mutable rows identical to the fenwick structure");
    }
    let index = match c.index {
        Some(i) => i,
        None => IndexKind::Segment(IndexConfig::Wide),
    };
    let spec = SweepSpec {
        log_u: a.log_u,
        ops: a.ops,
        structures: a.structures,
        blocks: a.block,
        index,
        kernels: c.kernels(),
        density: c.density,
        queries: c.queries,
        runs: c.runs,
        seed: c.seed,
        max_log_u: c.max_log_u,
    };
    // surface bad combinations before any timing starts
    for w in spec.workloads() {
        w.validate()?;
    }
    let out = run_sweep(&spec, |r| eprintln!("{r}"))?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    bench::write_csv(&a.csv, &out.results)?;
    println!("wrote {} rows to {}", out.results.len(), a.csv.display());
    if a.plot {
        let gp = sweep::write_gnuplot(&a.csv, &out.results)?;
        println!("wrote {}", gp.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(a) => bench_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
    };
    match result {
        Ok(code) => code,
        Err(e @ BenchError::Usage(_)) => {
            eprintln!("mrsb: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("mrsb: {e}");
            ExitCode::FAILURE
        }
    }
}
