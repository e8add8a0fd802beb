//! Workload generation and timing for the `mrsb` harness.
//!
//! Random bitmaps set every bit independently with probability `density`,
//! drawn from a ChaCha8 stream seeded with `seed`, so a given spec always
//! produces the same bitmap and the same queries. Count arrays for the
//! prefix-sum operations hold one count per `B`-bit block, each uniform in
//! `0..=B`, from its own stream.

use std::fmt;
use std::io;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitmap::{BitmapConfig, IndexKind, MutableBitmap, SpaceReport};
use crate::block_ops::{
    recommended_strategies, BlockBits, InWordKernel, KernelConfig, PopcountKernel, PrefixKernel, SearchKernel,
};
use crate::prefix_index::IndexConfig;
use crate::word_ops::named_enum;
use crate::Error;

mod run;
pub mod selfcheck;
pub mod sweep;

pub use run::run_bench;
pub use selfcheck::{run_selfcheck, SelfCheckReport, SelfCheckSpec};
pub use sweep::{run_sweep, write_csv, write_gnuplot, SweepOutcome, SweepSpec, CSV_HEADER};

pub const DEFAULT_QUERIES: usize = 1_000_000;
pub const DEFAULT_MAX_LOG_U: u32 = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Rank,
    Select,
    Flip,
    Access,
    Sum,
    Update,
    Search,
}

named_enum!(Op, "operation", {
    Rank => "rank",
    Select => "select",
    Flip => "flip",
    Access => "access",
    Sum => "sum",
    Update => "update",
    Search => "search",
});

impl Op {
    /// Whether the operation runs on a bitmap (as opposed to a count array).
    pub fn on_bitmap(self) -> bool {
        matches!(self, Op::Rank | Op::Select | Op::Flip | Op::Access)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Structure {
    Mutable,
    Fenwick,
    Naive,
}

named_enum!(Structure, "structure", {
    Mutable => "mutable",
    Fenwick => "fenwick",
    Naive => "naive",
});

/// Per-step kernel choices; unset steps keep the recommended kernel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KernelOverrides {
    pub rank_popcount: Option<PopcountKernel>,
    pub rank_prefix: Option<PrefixKernel>,
    pub select_popcount: Option<PopcountKernel>,
    pub select_search: Option<SearchKernel>,
    pub select_word: Option<InWordKernel>,
}

impl KernelOverrides {
    pub fn is_empty(&self) -> bool {
        *self == KernelOverrides::default()
    }

    pub fn resolve(&self, block: BlockBits, universe: u64) -> Result<KernelConfig, Error> {
        let mut k = recommended_strategies(block.bits() as u64, universe)?;
        k.rank.popcount = self.rank_popcount.unwrap_or(k.rank.popcount);
        k.rank.prefix = self.rank_prefix.unwrap_or(k.rank.prefix);
        k.select.popcount = self.select_popcount.unwrap_or(k.select.popcount);
        k.select.search = self.select_search.unwrap_or(k.select.search);
        k.select.in_word = self.select_word.unwrap_or(k.select.in_word);
        Ok(k)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn usage<T>(msg: impl Into<String>) -> Result<T, BenchError> {
    Err(BenchError::Usage(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    pub log_u: u32,
    pub density: f64,
    pub queries: usize,
    pub op: Op,
    pub structure: Structure,
    pub block: BlockBits,
    /// Index of the `mutable` structure; `fenwick` and `naive` ignore it.
    pub index: IndexKind,
    pub kernels: KernelOverrides,
    pub seed: u64,
    /// Timed passes; min and max are taken over these.
    pub runs: usize,
    pub max_log_u: u32,
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        WorkloadSpec {
            log_u: 20,
            density: 0.3,
            queries: DEFAULT_QUERIES,
            op: Op::Rank,
            structure: Structure::Mutable,
            block: BlockBits::B256,
            index: IndexKind::Segment(IndexConfig::Wide),
            kernels: KernelOverrides::default(),
            seed: 42,
            runs: 5,
            max_log_u: DEFAULT_MAX_LOG_U,
        }
    }
}

impl WorkloadSpec {
    pub fn universe(&self) -> u64 {
        1u64 << self.log_u
    }

    /// Number of `B`-bit blocks, which is also the count-array length.
    pub fn blocks(&self) -> usize {
        self.universe().div_ceil(self.block.bits() as u64) as usize
    }

    /// The index actually built for this structure.
    pub fn effective_index(&self) -> Option<IndexKind> {
        match self.structure {
            Structure::Mutable => Some(self.index),
            Structure::Fenwick => Some(IndexKind::Fenwick),
            Structure::Naive => None,
        }
    }

    pub fn index_name(&self) -> &'static str {
        self.effective_index().map_or("none", IndexKind::name)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if !(0.0..=1.0).contains(&self.density) {
            return usage(format!("density {} outside [0, 1]", self.density));
        }
        if self.queries == 0 {
            return usage("queries must be at least 1");
        }
        if self.runs == 0 {
            return usage("runs must be at least 1");
        }
        if self.log_u == 0 || self.log_u > self.max_log_u {
            return usage(format!("log-u {} outside 1..={} (raise --max-log-u)", self.log_u, self.max_log_u));
        }
        if !self.kernels.is_empty() && (!self.op.on_bitmap() || self.structure == Structure::Naive) {
            return usage(format!("kernel flags apply to bitmap ops, not {} on {}", self.op, self.structure));
        }
        if let IndexKind::Segment(c) = self.index {
            if self.block.bits() as u32 > c.max_block_bits() {
                return usage(format!("B = {} overflows the {} index", self.block, c));
            }
        }
        Ok(())
    }

    pub fn bitmap_config(&self) -> Result<BitmapConfig, Error> {
        let index = self.effective_index().unwrap_or(IndexKind::Segment(IndexConfig::Wide));
        let kernels = self.kernels.resolve(self.block, self.universe())?;
        Ok(BitmapConfig::new(self.block, index).with_kernels(kernels))
    }

    /// Space of the configured structure, from the formulas alone.
    pub fn space_report(&self) -> Result<SpaceReport, Error> {
        SpaceReport::analytic(self.universe(), self.block, self.effective_index().unwrap_or(IndexKind::Fenwick))
    }
}

/// Seeded stream `stream` of `seed`; bitmaps, counts and queries use
/// distinct streams so changing one workload does not shift the others.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub(crate) const BITMAP_STREAM: u64 = 1;
pub(crate) const COUNTS_STREAM: u64 = 2;
pub(crate) const QUERY_STREAM: u64 = 3;

/// `universe.div_ceil(64)` words with every bit set with probability `density`.
pub fn random_words(universe: u64, density: f64, seed: u64) -> Vec<u64> {
    let mut r = rng(seed, BITMAP_STREAM);
    let mut words = vec![0u64; universe.div_ceil(64) as usize];
    if density >= 1.0 {
        words.fill(u64::MAX);
    } else if density > 0.0 {
        for i in 0..universe {
            if r.gen_bool(density) {
                words[(i / 64) as usize] |= 1 << (i % 64);
            }
        }
    }
    let tail = universe % 64;
    if tail != 0 {
        *words.last_mut().unwrap() &= (1u64 << tail) - 1;
    }
    words
}

pub fn random_bitmap(universe: u64, density: f64, seed: u64, config: BitmapConfig) -> Result<MutableBitmap, Error> {
    MutableBitmap::from_words(&random_words(universe, density, seed), universe, config)
}

/// `len` counts, each uniform in `0..=max`.
pub fn random_counts(len: usize, max: u32, seed: u64) -> Vec<u32> {
    let mut r = rng(seed, COUNTS_STREAM);
    (0..len).map(|_| r.gen_range(0..=max)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub spec: WorkloadSpec,
    /// Queries per pass; the naive structure may run fewer than requested.
    pub queries: usize,
    pub ns_avg: f64,
    pub ns_min: f64,
    pub ns_max: f64,
    pub bytes_bitmap: u64,
    pub bytes_index: u64,
    pub overhead_percent: f64,
    /// Folded query results, or the final population for mutating ops.
    pub checksum: u64,
}

impl fmt::Display for BenchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.spec;
        write!(
            f,
            "{} {} logU={} density={} B={} index={}: {:.2} ns/op (min {:.2}, max {:.2}) over {} queries, \
             index {} bytes ({:.2}% of {} bitmap bytes)",
            s.structure,
            s.op,
            s.log_u,
            s.density,
            s.block,
            s.index_name(),
            self.ns_avg,
            self.ns_min,
            self.ns_max,
            self.queries,
            self.bytes_index,
            self.overhead_percent,
            self.bytes_bitmap,
        )
    }
}
