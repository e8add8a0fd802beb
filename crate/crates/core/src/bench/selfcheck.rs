//! Replays random mixed operations against the brute-force oracle.

use rand::Rng;

use super::{random_counts, random_words, rng, BenchError, QUERY_STREAM};
use crate::bitmap::{BitmapConfig, MutableBitmap};
use crate::fenwick::FenwickTree;
use crate::oracle::{NaiveBitmap, NaivePrefixSums};
use crate::prefix_index::{IndexConfig, PrefixIndex, SearchablePrefixSum, Sign};

#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheckSpec {
    pub log_u: u32,
    pub density: f64,
    pub seed: u64,
    pub config: BitmapConfig,
    /// Operations per replay; the bitmap and the count arrays each get this many.
    pub ops: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SelfCheckReport {
    pub bitmap_ops: usize,
    pub prefix_ops: usize,
    pub mismatches: Vec<String>,
}

impl SelfCheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn mismatch(&mut self, msg: String) {
        if self.mismatches.len() < 20 {
            self.mismatches.push(msg);
        }
    }
}

fn replay_bitmap(spec: &SelfCheckSpec, report: &mut SelfCheckReport) -> Result<(), BenchError> {
    let u = 1u64 << spec.log_u;
    let words = random_words(u, spec.density, spec.seed);
    let mut bm = MutableBitmap::from_words(&words, u, spec.config)?;
    let bits: Vec<bool> = (0..u).map(|i| words[(i / 64) as usize] >> (i % 64) & 1 == 1).collect();
    let mut naive = NaiveBitmap::from_bits(&bits);
    let mut r = rng(spec.seed, QUERY_STREAM);
    for step in 0..spec.ops {
        let i = r.gen_range(0..u);
        match r.gen_range(0..4) {
            0 => {
                let (a, b) = (bm.access(i)?, naive.access(i)?);
                if a != b {
                    report.mismatch(format!("step {step}: access({i}) = {a}, oracle {b}"));
                }
            }
            1 => {
                bm.flip(i)?;
                naive.flip(i)?;
            }
            2 => {
                let (a, b) = (bm.rank(i)?, naive.rank(i)?);
                if a != b {
                    report.mismatch(format!("step {step}: rank({i}) = {a}, oracle {b}"));
                }
            }
            _ => {
                let ones = naive.ones();
                if bm.ones() != ones {
                    report.mismatch(format!("step {step}: ones = {}, oracle {ones}", bm.ones()));
                }
                let k = if ones == 0 { 0 } else { r.gen_range(0..ones + 1) };
                let (a, b) = (bm.select(k).ok(), naive.select(k).ok());
                if a != b {
                    report.mismatch(format!("step {step}: select({k}) = {a:?}, oracle {b:?}"));
                }
            }
        }
        report.bitmap_ops += 1;
    }
    if let Err(e) = bm.check_coherence() {
        report.mismatch(format!("bitmap incoherent after replay: {e}"));
    }
    Ok(())
}

fn replay_prefix(spec: &SelfCheckSpec, report: &mut SelfCheckReport) -> Result<(), BenchError> {
    let b = spec.config.block.bits() as u32;
    let m = (1usize << spec.log_u).div_ceil(b as usize);
    let counts = random_counts(m, b, spec.seed);
    let mut naive = NaivePrefixSums::new(&counts);
    let mut fenwick = FenwickTree::build(&counts)?;
    let mut trees = IndexConfig::ALL
        .iter()
        .filter(|c| b <= c.max_block_bits())
        .map(|&c| PrefixIndex::build(&counts, b, c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut r = rng(spec.seed, QUERY_STREAM + 1);
    for step in 0..spec.ops {
        match r.gen_range(0..3) {
            0 => {
                let i = r.gen_range(0..m);
                let want = naive.sum(i);
                let got: Vec<u64> = std::iter::once(fenwick.sum(i)).chain(trees.iter().map(|t| t.sum(i))).collect();
                if got.iter().any(|&g| g != want) {
                    report.mismatch(format!("step {step}: sum({i}) = {got:?}, oracle {want}"));
                }
            }
            1 => {
                let i = r.gen_range(0..m);
                let c = naive.counts()[i];
                let sign = match c {
                    0 => Sign::Plus,
                    c if c == b as u64 => Sign::Minus,
                    _ if r.gen_bool(0.5) => Sign::Plus,
                    _ => Sign::Minus,
                };
                naive.update(i, sign);
                fenwick.update(i, sign);
                for t in &mut trees {
                    t.update(i, sign);
                }
            }
            _ => {
                let total = naive.total();
                if total == 0 {
                    continue;
                }
                let x = r.gen_range(0..total);
                let want = naive.search(x);
                let got: Vec<(usize, u64)> =
                    std::iter::once(fenwick.search(x)).chain(trees.iter().map(|t| t.search(x))).collect();
                if got.iter().any(|&g| g != want) {
                    report.mismatch(format!("step {step}: search({x}) = {got:?}, oracle {want:?}"));
                }
            }
        }
        report.prefix_ops += 1;
    }
    for t in &trees {
        if let Err(e) = t.check_invariants() {
            report.mismatch(format!("{} index broken after replay: {e}", t.config()));
        }
    }
    Ok(())
}

/// Mixed access/flip/rank/select on `spec.config` against [`NaiveBitmap`],
/// then sum/update/search on every segment-tree config and the Fenwick tree
/// against [`NaivePrefixSums`].
pub fn run_selfcheck(spec: &SelfCheckSpec) -> Result<SelfCheckReport, BenchError> {
    if !(0.0..=1.0).contains(&spec.density) {
        return Err(BenchError::Usage(format!("density {} outside [0, 1]", spec.density)));
    }
    if spec.log_u == 0 || spec.log_u > 32 {
        return Err(BenchError::Usage(format!("log-u {} outside 1..=32", spec.log_u)));
    }
    let mut report = SelfCheckReport::default();
    replay_bitmap(spec, &mut report)?;
    replay_prefix(spec, &mut report)?;
    Ok(report)
}
