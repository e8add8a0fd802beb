use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use super::{run_bench, BenchError, BenchResult, KernelOverrides, Op, Structure, WorkloadSpec};
use crate::bitmap::IndexKind;
use crate::block_ops::BlockBits;

pub const CSV_HEADER: [&str; 11] = [
    "structure",
    "op",
    "logU",
    "density",
    "block",
    "index",
    "ns_avg",
    "ns_min",
    "ns_max",
    "bytes_index",
    "overhead_pct",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub log_u: RangeInclusive<u32>,
    pub ops: Vec<Op>,
    pub structures: Vec<Structure>,
    pub blocks: Vec<BlockBits>,
    /// Index of the `mutable` structure.
    pub index: IndexKind,
    pub kernels: KernelOverrides,
    pub density: f64,
    pub queries: usize,
    pub runs: usize,
    pub seed: u64,
    pub max_log_u: u32,
}

impl SweepSpec {
    /// The workloads in row order: structure, op, block, then logU.
    pub fn workloads(&self) -> impl Iterator<Item = WorkloadSpec> + '_ {
        self.structures.iter().flat_map(move |&structure| {
            self.ops.iter().flat_map(move |&op| {
                self.blocks.iter().flat_map(move |&block| {
                    self.log_u.clone().map(move |log_u| WorkloadSpec {
                        log_u,
                        density: self.density,
                        queries: self.queries,
                        op,
                        structure,
                        block,
                        index: self.index,
                        kernels: if op.on_bitmap() && structure != Structure::Naive {
                            self.kernels
                        } else {
                            KernelOverrides::default()
                        },
                        seed: self.seed,
                        runs: self.runs,
                        max_log_u: self.max_log_u,
                    })
                })
            })
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub results: Vec<BenchResult>,
    pub warnings: Vec<String>,
}

/// Runs every workload of `spec`, one at a time. Select at density 0 has no
/// valid query and is skipped with a warning.
pub fn run_sweep(spec: &SweepSpec, mut progress: impl FnMut(&BenchResult)) -> Result<SweepOutcome, BenchError> {
    if spec.ops.is_empty() || spec.structures.is_empty() || spec.blocks.is_empty() || spec.log_u.is_empty() {
        return Err(BenchError::Usage("empty sweep".into()));
    }
    let mut out = SweepOutcome::default();
    for w in spec.workloads() {
        if w.op == Op::Select && w.density == 0.0 {
            out.warnings.push(format!(
                "skipped {} select logU={} B={}: density 0 leaves nothing to select",
                w.structure, w.log_u, w.block
            ));
            continue;
        }
        let r = run_bench(&w)?;
        progress(&r);
        if r.queries < w.queries {
            out.warnings
                .push(format!("{} {} logU={} ran {} of {} queries", w.structure, w.op, w.log_u, r.queries, w.queries));
        }
        out.results.push(r);
    }
    Ok(out)
}

pub fn csv_record(r: &BenchResult) -> [String; 11] {
    let s = &r.spec;
    [
        s.structure.to_string(),
        s.op.to_string(),
        s.log_u.to_string(),
        s.density.to_string(),
        s.block.to_string(),
        s.index_name().to_string(),
        format!("{:.3}", r.ns_avg),
        format!("{:.3}", r.ns_min),
        format!("{:.3}", r.ns_max),
        r.bytes_index.to_string(),
        format!("{:.4}", r.overhead_percent),
    ]
}

pub fn write_csv(path: &Path, results: &[BenchResult]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in results {
        w.write_record(csv_record(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<csv stem>.gp` next to the CSV: one PNG per op, ns/op against
/// logU with the min/max pipe, one line per structure and block.
pub fn write_gnuplot(csv_path: &Path, results: &[BenchResult]) -> Result<PathBuf, BenchError> {
    let gp = csv_path.with_extension("gp");
    let stem = csv_path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    let csv_name = csv_path.file_name().and_then(|s| s.to_str()).unwrap_or("sweep.csv");
    let mut f = BufWriter::new(File::create(&gp)?);
    writeln!(f, "set datafile separator ','")?;
    writeln!(f, "set terminal pngcairo size 900,600")?;
    writeln!(f, "set xlabel 'log2(u)'")?;
    writeln!(f, "set ylabel 'ns / op'")?;
    writeln!(f, "set key top left")?;
    writeln!(f, "set grid")?;

    let mut ops: Vec<Op> = Vec::new();
    for r in results {
        if !ops.contains(&r.spec.op) {
            ops.push(r.spec.op);
        }
    }
    for op in ops {
        let mut series: Vec<(Structure, BlockBits, &str)> = Vec::new();
        for r in results.iter().filter(|r| r.spec.op == op) {
            let key = (r.spec.structure, r.spec.block, r.spec.index_name());
            if !series.contains(&key) {
                series.push(key);
            }
        }
        writeln!(f, "\nset output '{stem}_{op}.png'")?;
        writeln!(f, "set title '{op}'")?;
        let plots: Vec<String> = series
            .iter()
            .map(|(s, b, i)| {
                let label = if *s == Structure::Mutable { format!("{s} {i}") } else { s.to_string() };
                format!(
                    "'{csv_name}' using 3:((strcol(1) eq '{s}' && strcol(2) eq '{op}' && $5 == {b}) ? $7 : 1/0):8:9 \
                     with yerrorlines title '{label} B={b}'"
                )
            })
            .collect();
        writeln!(f, "plot {}", plots.join(", \\\n     "))?;
    }
    f.flush()?;
    Ok(gp)
}
