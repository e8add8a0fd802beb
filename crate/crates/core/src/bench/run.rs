use std::hint::black_box;
use std::time::Instant;

use rand::Rng;

use super::{random_counts, random_words, rng, BenchError, BenchResult, Op, Structure, WorkloadSpec, QUERY_STREAM};
use crate::bitmap::{IndexKind, MutableBitmap};
use crate::fenwick::FenwickTree;
use crate::oracle::{NaiveBitmap, NaivePrefixSums};
use crate::prefix_index::{PrefixIndex, SearchablePrefixSum, Sign};

/// Naive rank/select/sum/search scan the whole input per query; their query
/// count is cut so one pass touches about this many elements.
const NAIVE_SCAN_BUDGET: u64 = 1 << 30;

trait Bits {
    fn access(&self, i: u64) -> bool;
    fn flip(&mut self, i: u64);
    fn rank(&self, i: u64) -> u64;
    fn select(&self, k: u64) -> u64;
    fn ones(&self) -> u64;
}

impl Bits for MutableBitmap {
    fn access(&self, i: u64) -> bool {
        MutableBitmap::access(self, i).unwrap()
    }
    fn flip(&mut self, i: u64) {
        MutableBitmap::flip(self, i).unwrap()
    }
    fn rank(&self, i: u64) -> u64 {
        MutableBitmap::rank(self, i).unwrap()
    }
    fn select(&self, k: u64) -> u64 {
        MutableBitmap::select(self, k).unwrap()
    }
    fn ones(&self) -> u64 {
        MutableBitmap::ones(self)
    }
}

impl Bits for NaiveBitmap {
    fn access(&self, i: u64) -> bool {
        NaiveBitmap::access(self, i).unwrap()
    }
    fn flip(&mut self, i: u64) {
        NaiveBitmap::flip(self, i).unwrap()
    }
    fn rank(&self, i: u64) -> u64 {
        NaiveBitmap::rank(self, i).unwrap()
    }
    fn select(&self, k: u64) -> u64 {
        NaiveBitmap::select(self, k).unwrap()
    }
    fn ones(&self) -> u64 {
        NaiveBitmap::ones(self)
    }
}

struct Timing {
    ns: Vec<f64>,
    checksum: u64,
}

/// One untimed warm-up pass followed by `runs` timed passes. `restore` runs
/// untimed after every pass so mutating workloads start from the same state.
fn time_passes<S>(
    state: &mut S,
    runs: usize,
    queries: usize,
    mut pass: impl FnMut(&mut S) -> u64,
    mut restore: impl FnMut(&mut S),
) -> Timing {
    let mut checksum = black_box(pass(state));
    restore(state);
    let mut ns = Vec::with_capacity(runs);
    for _ in 0..runs {
        let start = Instant::now();
        let c = black_box(pass(state));
        ns.push(start.elapsed().as_nanos() as f64 / queries as f64);
        restore(state);
        debug_assert_eq!(c, checksum, "passes disagree");
        checksum = c;
    }
    Timing { ns, checksum }
}

fn bitmap_op<B: Bits>(bm: &mut B, op: Op, queries: &[u64], runs: usize) -> Timing {
    let n = queries.len();
    match op {
        Op::Access => time_passes(bm, runs, n, |b| queries.iter().map(|&q| b.access(q) as u64).sum(), |_| {}),
        Op::Rank => {
            time_passes(bm, runs, n, |b| queries.iter().fold(0u64, |acc, &q| acc.wrapping_add(b.rank(q))), |_| {})
        }
        Op::Select => {
            time_passes(bm, runs, n, |b| queries.iter().fold(0u64, |acc, &q| acc.wrapping_add(b.select(q))), |_| {})
        }
        // flips commute and are involutions, so replaying the pass restores
        Op::Flip => time_passes(
            bm,
            runs,
            n,
            |b| {
                for &q in queries {
                    b.flip(q);
                }
                b.ones()
            },
            |b| {
                for &q in queries {
                    b.flip(q);
                }
            },
        ),
        _ => unreachable!("{op} is not a bitmap op"),
    }
}

fn prefix_op<P: SearchablePrefixSum>(p: &mut P, op: Op, queries: &[u64], runs: usize) -> Timing {
    let n = queries.len();
    let decode = |q: u64| ((q >> 1) as usize, if q & 1 == 0 { Sign::Plus } else { Sign::Minus });
    match op {
        Op::Sum => time_passes(
            p,
            runs,
            n,
            |p| queries.iter().fold(0u64, |acc, &q| acc.wrapping_add(p.sum(q as usize))),
            |_| {},
        ),
        Op::Search => time_passes(
            p,
            runs,
            n,
            |p| {
                queries.iter().fold(0u64, |acc, &q| {
                    let (i, before) = p.search(q);
                    acc.wrapping_add(i as u64 ^ before)
                })
            },
            |_| {},
        ),
        Op::Update => time_passes(
            p,
            runs,
            n,
            |p| {
                for &q in queries {
                    let (i, s) = decode(q);
                    p.update(i, s);
                }
                p.total()
            },
            |p| {
                for &q in queries.iter().rev() {
                    let (i, s) = decode(q);
                    p.update(i, s.flip());
                }
            },
        ),
        _ => unreachable!("{op} is not a prefix-sum op"),
    }
}

fn bitmap_queries(op: Op, universe: u64, ones: u64, count: usize, seed: u64) -> Vec<u64> {
    let mut r = rng(seed, QUERY_STREAM);
    let hi = if op == Op::Select { ones } else { universe };
    (0..count).map(|_| r.gen_range(0..hi)).collect()
}

/// Update queries are `i << 1 | sign`, generated against a running copy of
/// the counts so no count leaves `0..=max`.
fn prefix_queries(op: Op, counts: &[u32], max: u32, count: usize, seed: u64) -> Vec<u64> {
    let mut r = rng(seed, QUERY_STREAM);
    let m = counts.len();
    match op {
        Op::Sum => (0..count).map(|_| r.gen_range(0..m as u64)).collect(),
        Op::Search => {
            let total: u64 = counts.iter().map(|&c| c as u64).sum();
            (0..count).map(|_| r.gen_range(0..total)).collect()
        }
        Op::Update => {
            let mut live = counts.to_vec();
            (0..count)
                .map(|_| {
                    let i = r.gen_range(0..m);
                    let plus = match live[i] {
                        0 => true,
                        c if c == max => false,
                        _ => r.gen_bool(0.5),
                    };
                    if plus {
                        live[i] += 1;
                    } else {
                        live[i] -= 1;
                    }
                    (i as u64) << 1 | (!plus) as u64
                })
                .collect()
        }
        _ => unreachable!(),
    }
}

fn naive_queries(op: Op, requested: usize, scan_len: u64) -> usize {
    match op {
        Op::Rank | Op::Select | Op::Sum | Op::Search => {
            requested.min((NAIVE_SCAN_BUDGET / scan_len.max(1)).max(1) as usize)
        }
        _ => requested,
    }
}

/// Times `spec.op` on `spec.structure`.
///
/// Queries are generated before timing. Passes that mutate (flip, update)
/// are undone untimed, so every pass sees the same state and the checksum is
/// a function of the spec alone.
pub fn run_bench(spec: &WorkloadSpec) -> Result<BenchResult, BenchError> {
    spec.validate()?;
    let universe = spec.universe();
    let bitmap_bytes = universe.div_ceil(64) * 8;
    let (queries, timing, bytes_index) = if spec.op.on_bitmap() {
        let words = random_words(universe, spec.density, spec.seed);
        let ones: u64 = words.iter().map(|w| w.count_ones() as u64).sum();
        if spec.op == Op::Select && ones == 0 {
            return Err(BenchError::Usage("select needs at least one set bit (density is 0)".into()));
        }
        match spec.structure {
            Structure::Naive => {
                let n = naive_queries(spec.op, spec.queries, universe);
                let qs = bitmap_queries(spec.op, universe, ones, n, spec.seed);
                let bits: Vec<bool> = (0..universe).map(|i| words[(i / 64) as usize] >> (i % 64) & 1 == 1).collect();
                let mut bm = NaiveBitmap::from_bits(&bits);
                (n, bitmap_op(&mut bm, spec.op, &qs, spec.runs), 0)
            }
            _ => {
                let mut bm = MutableBitmap::from_words(&words, universe, spec.bitmap_config()?)?;
                let qs = bitmap_queries(spec.op, universe, ones, spec.queries, spec.seed);
                let index = bm.space_report().index_bytes;
                (spec.queries, bitmap_op(&mut bm, spec.op, &qs, spec.runs), index)
            }
        }
    } else {
        let max = spec.block.bits() as u32;
        let counts = random_counts(spec.blocks(), max, spec.seed);
        if spec.op == Op::Search && counts.iter().all(|&c| c == 0) {
            return Err(BenchError::Usage("search needs a positive total".into()));
        }
        let n = match spec.structure {
            Structure::Naive => naive_queries(spec.op, spec.queries, counts.len() as u64),
            _ => spec.queries,
        };
        let qs = prefix_queries(spec.op, &counts, max, n, spec.seed);
        let (timing, bytes) = match spec.effective_index() {
            None => {
                let mut p = NaivePrefixSums::new(&counts);
                (prefix_op(&mut p, spec.op, &qs, spec.runs), 0)
            }
            Some(IndexKind::Fenwick) => {
                let mut p = FenwickTree::build(&counts)?;
                let bytes = p.space_bytes();
                (prefix_op(&mut p, spec.op, &qs, spec.runs), bytes)
            }
            Some(IndexKind::Segment(c)) => {
                let mut p = PrefixIndex::build(&counts, max, c)?;
                let bytes = p.space_bytes();
                (prefix_op(&mut p, spec.op, &qs, spec.runs), bytes)
            }
        };
        (n, timing, bytes as u64)
    };

    let ns = &timing.ns;
    let ns_avg = ns.iter().sum::<f64>() / ns.len() as f64;
    let ns_min = ns.iter().copied().fold(f64::INFINITY, f64::min);
    let ns_max = ns.iter().copied().fold(0.0, f64::max);
    Ok(BenchResult {
        spec: spec.clone(),
        queries,
        ns_avg: ns_avg.clamp(ns_min, ns_max),
        ns_min,
        ns_max,
        bytes_bitmap: bitmap_bytes,
        bytes_index,
        overhead_percent: bytes_index as f64 / bitmap_bytes as f64 * 100.0,
        checksum: timing.checksum,
    })
}
