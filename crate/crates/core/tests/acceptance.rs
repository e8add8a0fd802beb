//! One line per acceptance criterion, then a single assert over all of them.
//!
//! Reference answers come from the plain arrays below, never from the
//! library's own oracle module.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use mutable_rank_select::{
    BitmapConfig, BlockBits, FenwickTree, IndexConfig, IndexKind, KernelConfig, MutableBitmap, PrefixIndex,
    RankStrategy, SearchablePrefixSum, SelectStrategy, Sign, SpaceReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Bits(Vec<bool>);

impl Bits {
    fn random(u: usize, density: f64, r: &mut ChaCha8Rng) -> Self {
        Bits((0..u).map(|_| r.gen_bool(density)).collect())
    }
    fn ones(&self) -> u64 {
        self.0.iter().filter(|&&b| b).count() as u64
    }
    fn count(bits: &[bool]) -> u64 {
        // wrapping so the loop vectorises under overflow checks
        bits.iter().fold(0u32, |a, &b| a.wrapping_add(b as u32)) as u64
    }
    fn rank(&self, i: usize) -> u64 {
        Self::count(&self.0[..=i])
    }
    fn select(&self, k: u64) -> Option<u64> {
        // skip whole chunks by count, then walk the chunk holding the answer
        let mut left = k;
        for (c, chunk) in self.0.chunks(4096).enumerate() {
            let ones = Self::count(chunk);
            if left < ones {
                let off = chunk.iter().enumerate().filter(|(_, &b)| b).nth(left as usize).unwrap().0;
                return Some((c * 4096 + off) as u64);
            }
            left -= ones;
        }
        None
    }
    /// Rank at every position in one pass.
    fn all_ranks(&self) -> Vec<u64> {
        self.0
            .iter()
            .scan(0, |acc, &b| {
                *acc += b as u64;
                Some(*acc)
            })
            .collect()
    }
    fn positions(&self) -> Vec<u64> {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64).collect()
    }
}

fn all_configs() -> Vec<BitmapConfig> {
    let mut out = Vec::new();
    for block in BlockBits::ALL {
        for index in IndexKind::ALL {
            for rank in RankStrategy::all() {
                for select in SelectStrategy::all() {
                    out.push(BitmapConfig::new(block, index).with_kernels(KernelConfig { rank, select }));
                }
            }
        }
    }
    out
}

fn worked_example() -> Outcome {
    let bits: Vec<bool> = "01101101010101110".chars().map(|c| c == '1').collect();
    let start = Instant::now();
    let configs = all_configs();
    for config in &configs {
        let mut bm = MutableBitmap::from_bits(&bits, *config).map_err(|e| e.to_string())?;
        let before = (bm.rank(7), bm.select(7));
        bm.flip(3).unwrap();
        bm.flip(6).unwrap();
        let after = (bm.rank(7), bm.select(7));
        ensure(before == (Ok(5), Ok(13)) && after == (Ok(7), Ok(9)), || {
            format!("{config:?}: before {before:?}, after {after:?}")
        })?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!("{} configurations, {t:.2?}", configs.len()))
}

fn space_accounting() -> Outcome {
    let m = 1usize << 24;
    let mut parts = Vec::new();
    for (config, want, bytes) in [(IndexConfig::Narrow, 2.29, 38_347_936usize), (IndexConfig::Wide, 2.13, 35_791_424)] {
        let got = config.space_bytes_for(m).map_err(|e| e.to_string())?;
        // node sizes times node counts, summed over the levels
        ensure(got == bytes, || format!("{config}: {got} bytes, expected {bytes}"))?;
        let per = got as f64 / m as f64;
        ensure((per - want).abs() <= 0.01, || format!("{config}: {per:.4} bytes/element"))?;
        parts.push(format!("{config} {per:.4}"));
    }
    Ok(parts.join(", ") + " bytes/element")
}

fn overhead() -> Outcome {
    let wide = IndexKind::Segment(IndexConfig::Wide);
    let pct = |u: u64, b| SpaceReport::analytic(u, b, wide).map(|r| r.overhead_percent).map_err(|e| e.to_string());
    let b256 = pct(1 << 32, BlockBits::B256)?;
    let b512 = pct(1 << 32, BlockBits::B512)?;
    // 2^30 is the largest universe a B = 64 index can cover (2^24 blocks)
    let b64 = pct(1 << 30, BlockBits::B64)?;
    ensure(b256 <= 7.2, || format!("B=256: {b256:.3}%"))?;
    ensure(b512 <= 3.6, || format!("B=512: {b512:.3}%"))?;
    ensure((b64 - 26.7).abs() <= 0.3, || format!("B=64: {b64:.3}%"))?;
    Ok(format!("B=256 {b256:.3}%, B=512 {b512:.3}%, B=64 {b64:.3}%"))
}

fn node_sizes() -> Outcome {
    let sizes = |c: IndexConfig| c.node_types().map(|n| n.1);
    let narrow = sizes(IndexConfig::Narrow);
    let wide = sizes(IndexConfig::Wide);
    ensure(narrow == [160, 288, 288], || format!("narrow {narrow:?}"))?;
    ensure(wide == [576, 1088, 1088], || format!("wide {wide:?}"))?;
    Ok(format!("narrow {narrow:?}, wide {wide:?}"))
}

fn heights() -> Outcome {
    let cases: [(IndexConfig, &[(usize, usize)]); 3] = [
        (
            IndexConfig::Narrow,
            &[
                (1 << 7, 1),
                ((1 << 7) + 1, 2),
                (1 << 13, 2),
                ((1 << 13) + 1, 3),
                (1 << 19, 3),
                ((1 << 19) + 1, 4),
                (1 << 24, 4),
            ],
        ),
        (
            IndexConfig::Scalar,
            &[
                (1 << 7, 1),
                ((1 << 7) + 1, 2),
                (1 << 13, 2),
                ((1 << 13) + 1, 3),
                (1 << 19, 3),
                ((1 << 19) + 1, 4),
                (1 << 24, 4),
            ],
        ),
        (IndexConfig::Wide, &[(1 << 9, 1), ((1 << 9) + 1, 2), (1 << 17, 2), ((1 << 17) + 1, 3), (1 << 24, 3)]),
    ];
    let mut n = 0;
    for (config, table) in cases {
        for &(m, h) in table {
            let counts = vec![1u32; m];
            let idx = PrefixIndex::build(&counts, 256, config).map_err(|e| e.to_string())?;
            ensure(idx.height() == h, || format!("{config} m={m}: height {}, expected {h}", idx.height()))?;
            ensure(idx.sum(m - 1) == m as u64, || format!("{config} m={m}: bad total"))?;
            n += 1;
        }
        let over = PrefixIndex::build(&vec![0u32; (1 << 24) + 1], 256, config);
        ensure(over.is_err(), || format!("{config}: 2^24 + 1 counts accepted"))?;
    }
    Ok(format!("{n} boundaries"))
}

fn bitmap_replay(u: usize, density: f64, config: BitmapConfig, ops: usize, seed: u64) -> Result<(), String> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut bits = Bits::random(u, density, &mut r);
    let mut bm = MutableBitmap::from_bits(&bits.0, config).map_err(|e| e.to_string())?;
    let mut ones = bits.ones();
    for step in 0..ops {
        let i = r.gen_range(0..u);
        let ctx = || format!("u={u} d={density} {config:?} step {step}");
        match r.gen_range(0..4) {
            0 => {
                bm.flip(i as u64).unwrap();
                bits.0[i] = !bits.0[i];
                if bits.0[i] {
                    ones += 1
                } else {
                    ones -= 1
                }
            }
            1 => ensure(bm.rank(i as u64) == Ok(bits.rank(i)), || format!("{}: rank({i})", ctx()))?,
            2 => ensure(bm.access(i as u64) == Ok(bits.0[i]), || format!("{}: access({i})", ctx()))?,
            _ => {
                let k = r.gen_range(0..=ones);
                ensure(bm.select(k).ok() == bits.select(k), || format!("{}: select({k})", ctx()))?;
            }
        }
    }
    ensure(bm.ones() == ones, || format!("u={u}: ones drifted"))
}

struct Counts(Vec<u64>);

impl Counts {
    fn sum(&self, i: usize) -> u64 {
        self.0[..=i].iter().fold(0u64, |a, &c| a.wrapping_add(c))
    }
    fn search(&self, x: u64) -> (usize, u64) {
        let mut before = 0;
        for (i, &c) in self.0.iter().enumerate() {
            if before + c > x {
                return (i, before);
            }
            before += c;
        }
        unreachable!()
    }
}

fn prefix_replay(counts: Vec<u32>, block: u32, ops: usize, seed: u64) -> Result<(), String> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let m = counts.len();
    let mut fenwick = FenwickTree::build(&counts).map_err(|e| e.to_string())?;
    let mut trees: Vec<PrefixIndex> = IndexConfig::ALL
        .iter()
        .map(|&c| PrefixIndex::build(&counts, block, c).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let mut plain = Counts(counts.iter().map(|&c| c as u64).collect());
    let mut total: u64 = plain.0.iter().sum();
    for step in 0..ops {
        match r.gen_range(0..3) {
            0 => {
                let i = r.gen_range(0..m);
                let want = plain.sum(i);
                ensure(fenwick.sum(i) == want, || format!("m={m} step {step}: fenwick sum({i})"))?;
                for t in &trees {
                    ensure(t.sum(i) == want, || format!("m={m} step {step}: {} sum({i})", t.config()))?;
                }
            }
            1 => {
                let i = r.gen_range(0..m);
                let plus = match plain.0[i] {
                    0 => true,
                    c if c == block as u64 => false,
                    _ => r.gen_bool(0.5),
                };
                let sign = if plus { Sign::Plus } else { Sign::Minus };
                if plus {
                    plain.0[i] += 1;
                    total += 1
                } else {
                    plain.0[i] -= 1;
                    total -= 1
                }
                fenwick.update(i, sign);
                for t in &mut trees {
                    t.update(i, sign);
                }
            }
            _ if total > 0 => {
                let x = r.gen_range(0..total);
                let want = plain.search(x);
                ensure(fenwick.search(x) == want, || format!("m={m} step {step}: fenwick search({x})"))?;
                for t in &trees {
                    ensure(t.search(x) == want, || format!("m={m} step {step}: {} search({x})", t.config()))?;
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let universes = [17usize, 512, 513, 1 << 16, 1 << 20];
    let densities = [0.1, 0.3, 0.5, 0.9];
    let mut combo = 0;
    for &u in &universes {
        for &d in &densities {
            // cycles through all 12 (block, index) pairs over the 20 combinations
            let config = BitmapConfig::new(BlockBits::ALL[combo % 3], IndexKind::ALL[combo % 4]);
            bitmap_replay(u, d, config, 100_000, 1000 + combo as u64)?;
            combo += 1;
        }
    }
    let bitmap_time = start.elapsed();
    let mut r = ChaCha8Rng::seed_from_u64(77);
    let lengths = [1usize, 7, 128, 129, 1 << 13, (1 << 13) + 1, 1 << 17, 100_000];
    for (n, &m) in lengths.iter().enumerate() {
        for block in [64u32, 256, 512] {
            let counts: Vec<u32> = (0..m).map(|_| r.gen_range(0..=block)).collect();
            prefix_replay(counts, block, 100_000, n as u64)?;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(60), || format!("took {t:?}, bitmap part {bitmap_time:?}"))?;
    Ok(format!(
        "{combo} bitmap replays ({bitmap_time:.2?}) and {} prefix-sum replays of 1e5 ops, {t:.2?} total",
        lengths.len() * 3
    ))
}

fn cross_variant() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let ranks: Vec<RankStrategy> = RankStrategy::all().collect();
    let selects: Vec<SelectStrategy> = SelectStrategy::all().collect();
    for block in BlockBits::ALL {
        let nw = block.words();
        let rank_fns: Vec<_> = ranks.iter().map(|s| s.kernel(block)).collect();
        let select_fns: Vec<_> = selects.iter().map(|s| s.kernel(block)).collect();
        for pair in 0..10_000 {
            let density = [0.02, 0.3, 0.5, 0.98][pair % 4];
            let words: Vec<u64> =
                (0..nw).map(|_| (0..64).fold(0u64, |w, b| w | (r.gen_bool(density) as u64) << b)).collect();
            let i = r.gen_range(0..block.bits());
            let want_rank: u32 = (0..=i).map(|p| (words[p / 64] >> (p % 64) & 1) as u32).sum();
            for (s, f) in ranks.iter().zip(&rank_fns) {
                let got = f(&words, i);
                ensure(got == want_rank, || format!("B={block} {s:?} rank({i}) = {got}, expected {want_rank}"))?;
            }
            let ones: u32 = words.iter().map(|w| w.count_ones()).sum();
            if ones == 0 {
                continue;
            }
            let k = r.gen_range(0..ones);
            let want_sel =
                (0..block.bits()).filter(|&p| words[p / 64] >> (p % 64) & 1 == 1).nth(k as usize).unwrap() as u32;
            for (s, f) in selects.iter().zip(&select_fns) {
                let got = f(&words, k);
                ensure(got == want_sel, || format!("B={block} {s:?} select({k}) = {got}, expected {want_sel}"))?;
            }
        }
    }
    Ok(format!("{} rank and {} select strategies on 1e4 pairs per B", ranks.len(), selects.len()))
}

fn duality() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0u64;
    for n in 0..20 {
        let u = r.gen_range(1..=200_000usize);
        let d = r.gen_range(0.0..=1.0);
        let config = BitmapConfig::new(BlockBits::ALL[n % 3], IndexKind::ALL[n % 4]);
        let bits = Bits::random(u, d, &mut r);
        let bm = MutableBitmap::from_bits(&bits.0, config).map_err(|e| e.to_string())?;
        let pos = bits.positions();
        for k in 0..bm.ones() {
            let s = bm.select(k).map_err(|e| e.to_string())?;
            ensure(s == pos[k as usize], || format!("bitmap {n}: select({k}) = {s}"))?;
            ensure(bm.rank(s) == Ok(k + 1), || format!("bitmap {n}: rank(select({k})) != {}", k + 1))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs on 20 bitmaps"))
}

fn exhaustive_small() -> Outcome {
    let start = Instant::now();
    let u = 512;
    for (n, block) in BlockBits::ALL.into_iter().enumerate() {
        for index in IndexKind::ALL {
            let mut r = ChaCha8Rng::seed_from_u64(900 + n as u64);
            let mut bits = Bits::random(u, 0.5, &mut r);
            let mut bm =
                MutableBitmap::from_bits(&bits.0, BitmapConfig::new(block, index)).map_err(|e| e.to_string())?;
            for flip in 0..1000 {
                let i = r.gen_range(0..u);
                bits.0[i] = !bits.0[i];
                bm.flip(i as u64).unwrap();
                let ranks = bits.all_ranks();
                for (i, &rank) in ranks.iter().enumerate() {
                    ensure(bm.rank(i as u64) == Ok(rank) && bm.access(i as u64) == Ok(bits.0[i]), || {
                        format!("B={block} {index} after flip {flip}: position {i}")
                    })?;
                }
                let pos = bits.positions();
                for (k, &p) in pos.iter().enumerate() {
                    ensure(bm.select(k as u64) == Ok(p), || {
                        format!("B={block} {index} after flip {flip}: select({k})")
                    })?;
                }
                ensure(bm.select(pos.len() as u64).is_err(), || "select past n succeeded".into())?;
            }
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(30), || format!("took {t:?}"))?;
    Ok(format!("12 configurations x 1000 flips, {t:.2?}"))
}

fn sweep_rows(args: &[&str], dir: &std::path::Path, name: &str) -> Result<Vec<Vec<String>>, String> {
    let csv = dir.join(name);
    let out = Command::new(env!("CARGO_BIN_EXE_mrsb"))
        .arg("sweep")
        .args(args)
        .args(["--queries", "2000", "--runs", "1", "--seed", "3", "--plot", "--csv"])
        .arg(&csv)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    ensure(csv.with_extension("gp").exists(), || "no gnuplot script".into())?;
    let text = std::fs::read_to_string(&csv).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    ensure(header == "structure,op,logU,density,block,index,ns_avg,ns_min,ns_max,bytes_index,overhead_pct", || {
        format!("header {header:?}")
    })?;
    Ok(lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

fn sweeps_emitted() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bitmap_args =
        ["--log-u", "10..14", "--ops", "rank,select,flip", "--structures", "mutable,fenwick", "--block", "64,256,512"];
    let prefix_args =
        ["--log-u", "10..14", "--ops", "sum,update,search", "--structures", "mutable,fenwick", "--block", "256"];
    let a = sweep_rows(&bitmap_args, dir.path(), "bitmap.csv")?;
    let b = sweep_rows(&prefix_args, dir.path(), "prefix.csv")?;
    ensure(a.len() == 2 * 3 * 3 * 5, || format!("bitmap sweep has {} rows", a.len()))?;
    ensure(b.len() == 2 * 3 * 5, || format!("prefix sweep has {} rows", b.len()))?;
    for row in a.iter().chain(&b) {
        ensure(row.len() == 11, || format!("row {row:?}"))?;
        let (avg, min, max): (f64, f64, f64) =
            (row[6].parse().unwrap(), row[7].parse().unwrap(), row[8].parse().unwrap());
        ensure(min <= avg && avg <= max, || format!("pipe out of order: {row:?}"))?;
    }
    // same seed, same non-timing columns
    let again = sweep_rows(&prefix_args, dir.path(), "again.csv")?;
    let fixed = |rows: &[Vec<String>]| -> Vec<Vec<String>> {
        rows.iter().map(|r| r[..6].iter().chain(&r[9..]).cloned().collect()).collect()
    };
    ensure(fixed(&b) == fixed(&again), || "non-timing columns differ between runs".into())?;
    Ok(format!("{} + {} rows with plot scripts", a.len(), b.len()))
}

/// Written straight to the stderr handle so the lines show up even when the
/// test harness captures output.
fn report(line: String) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("worked example on every configuration", worked_example),
        ("bytes per element at m = 2^24", space_accounting),
        ("index overhead percentages", overhead),
        ("node byte sizes", node_sizes),
        ("tree height at capacity boundaries", heights),
        ("oracle equivalence under mixed operations", oracle_equivalence),
        ("rank/select strategy equivalence", cross_variant),
        ("rank(select(k)) = k + 1", duality),
        ("exhaustive u = 512 after every flip", exhaustive_small),
        ("sweep CSV emitted", sweeps_emitted),
    ];
    let mut failed = Vec::new();
    for (n, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match outcome {
            Ok(detail) => report(format!("PASS {:>2}. {name}: {detail}", n + 1)),
            Err(why) => {
                report(format!("FAIL {:>2}. {name}: {why}", n + 1));
                failed.push(n + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
