//! The mutable bitmap: raw words, a searchable prefix-sum index over the
//! per-block one-counts, and the in-block kernels chosen at construction.

use std::fmt;
use std::str::FromStr;

use crate::block_ops::{block_popcount, recommended_strategies, BlockBits, KernelConfig, RankFn, SelectFn};
use crate::fenwick::FenwickTree;
use crate::prefix_index::{IndexConfig, PrefixIndex, SearchablePrefixSum, Sign, MAX_LEN};
use crate::{Error, Result};

/// Which searchable prefix-sum structure indexes the blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexKind {
    Segment(IndexConfig),
    Fenwick,
}

impl IndexKind {
    pub const ALL: [IndexKind; 4] = [
        IndexKind::Segment(IndexConfig::Scalar),
        IndexKind::Segment(IndexConfig::Narrow),
        IndexKind::Segment(IndexConfig::Wide),
        IndexKind::Fenwick,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IndexKind::Segment(c) => c.name(),
            IndexKind::Fenwick => "fenwick",
        }
    }

    /// Index size for `blocks` blocks, computed without building it.
    pub fn space_bytes_for(self, blocks: usize) -> Result<usize> {
        match self {
            IndexKind::Segment(c) => c.space_bytes_for(blocks),
            IndexKind::Fenwick => Ok((blocks + 1) * 8),
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "fenwick" {
            return Ok(IndexKind::Fenwick);
        }
        s.parse().map(IndexKind::Segment).map_err(|_| Error::UnknownName { kind: "index", name: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitmapConfig {
    pub block: BlockBits,
    pub index: IndexKind,
    /// `None` picks [`recommended_strategies`] for the block size and
    /// universe.
    pub kernels: Option<KernelConfig>,
}

impl Default for BitmapConfig {
    /// 256-bit blocks over the wide segment tree with tuned kernels.
    fn default() -> Self {
        BitmapConfig { block: BlockBits::B256, index: IndexKind::Segment(IndexConfig::Wide), kernels: None }
    }
}

impl BitmapConfig {
    pub fn new(block: BlockBits, index: IndexKind) -> Self {
        BitmapConfig { block, index, kernels: None }
    }

    pub fn with_kernels(mut self, kernels: KernelConfig) -> Self {
        self.kernels = Some(kernels);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceReport {
    pub bitmap_bytes: u64,
    pub index_bytes: u64,
    pub overhead_percent: f64,
}

impl SpaceReport {
    fn new(bitmap_bytes: u64, index_bytes: u64) -> Self {
        SpaceReport { bitmap_bytes, index_bytes, overhead_percent: index_bytes as f64 / bitmap_bytes as f64 * 100.0 }
    }

    /// Space of a bitmap of `universe` bits, from the formulas alone.
    pub fn analytic(universe: u64, block: BlockBits, index: IndexKind) -> Result<Self> {
        let blocks = block_count(universe, block)?;
        let index_bytes = index.space_bytes_for(blocks)? as u64;
        Ok(SpaceReport::new(universe.div_ceil(64) * 8, index_bytes))
    }
}

fn max_universe(block: BlockBits) -> u64 {
    MAX_LEN as u64 * block.bits() as u64
}

fn block_count(universe: u64, block: BlockBits) -> Result<usize> {
    let limit = max_universe(block);
    if universe == 0 || universe > limit {
        return Err(Error::Capacity { requested: universe, limit });
    }
    Ok(universe.div_ceil(block.bits() as u64) as usize)
}

#[derive(Debug, Clone)]
enum BlockIndex {
    Segment(PrefixIndex),
    Fenwick(FenwickTree),
}

impl BlockIndex {
    fn build(counts: &[u32], block: BlockBits, kind: IndexKind) -> Result<Self> {
        Ok(match kind {
            IndexKind::Segment(config) => BlockIndex::Segment(PrefixIndex::build(counts, block.bits() as u32, config)?),
            IndexKind::Fenwick => BlockIndex::Fenwick(FenwickTree::build(counts)?),
        })
    }

    #[inline(always)]
    fn sum(&self, i: usize) -> u64 {
        match self {
            BlockIndex::Segment(t) => t.sum(i),
            BlockIndex::Fenwick(t) => t.sum(i),
        }
    }

    #[inline(always)]
    fn update(&mut self, i: usize, sign: Sign) {
        match self {
            BlockIndex::Segment(t) => t.update(i, sign),
            BlockIndex::Fenwick(t) => t.update(i, sign),
        }
    }

    #[inline(always)]
    fn search(&self, x: u64) -> (usize, u64) {
        match self {
            BlockIndex::Segment(t) => t.search(x),
            BlockIndex::Fenwick(t) => t.search(x),
        }
    }

    fn space_bytes(&self) -> usize {
        match self {
            BlockIndex::Segment(t) => t.space_bytes(),
            BlockIndex::Fenwick(t) => t.space_bytes(),
        }
    }
}

/// A bitmap of `len()` bits supporting access, flip, rank and select.
///
/// Rank is inclusive (`rank(i)` counts ones in `0..=i`) and select is
/// 0-based (`select(k)` is the position of the `(k+1)`-th one).
///
/// Queries take `&self` and may run concurrently; `flip` takes `&mut self`.
#[derive(Clone)]
pub struct MutableBitmap {
    universe: u64,
    block: BlockBits,
    /// Whole blocks; bits at or beyond `universe` stay zero.
    words: Vec<u64>,
    index: BlockIndex,
    index_kind: IndexKind,
    kernels: KernelConfig,
    rank_fn: RankFn,
    select_fn: SelectFn,
    ones: u64,
}

impl fmt::Debug for MutableBitmap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MutableBitmap")
            .field("len", &self.universe)
            .field("ones", &self.ones)
            .field("block", &self.block)
            .field("index", &self.index_kind)
            .field("kernels", &self.kernels)
            .finish()
    }
}

impl MutableBitmap {
    /// An all-zero bitmap of `universe` bits.
    pub fn new(universe: u64, config: BitmapConfig) -> Result<Self> {
        let blocks = block_count(universe, config.block)?;
        Self::from_block_words(vec![0; blocks * config.block.words()], universe, config)
    }

    pub fn from_bits(bits: &[bool], config: BitmapConfig) -> Result<Self> {
        let universe = bits.len() as u64;
        let blocks = block_count(universe, config.block)?;
        let mut words = vec![0u64; blocks * config.block.words()];
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            words[i / 64] |= 1 << (i % 64);
        }
        Self::from_block_words(words, universe, config)
    }

    /// Builds from `⌈universe / 64⌉` little-endian-ordered words. Bits at or
    /// beyond `universe` must be zero.
    pub fn from_words(words: &[u64], universe: u64, config: BitmapConfig) -> Result<Self> {
        let blocks = block_count(universe, config.block)?;
        let needed = universe.div_ceil(64) as usize;
        if words.len() != needed {
            return Err(Error::Format(format!("{} words given for {universe} bits, expected {needed}", words.len())));
        }
        if !universe.is_multiple_of(64) && words[needed - 1] >> (universe % 64) != 0 {
            return Err(Error::Format("bits set beyond the end of the bitmap".into()));
        }
        let mut padded = words.to_vec();
        padded.resize(blocks * config.block.words(), 0);
        Self::from_block_words(padded, universe, config)
    }

    fn from_block_words(words: Vec<u64>, universe: u64, config: BitmapConfig) -> Result<Self> {
        let block = config.block;
        let kernels = match config.kernels {
            Some(k) => k,
            None => recommended_strategies(block.bits() as u64, universe)?,
        };
        let counts: Vec<u32> = words.chunks(block.words()).map(block_popcount).collect();
        let ones = counts.iter().map(|&c| c as u64).sum();
        let index = BlockIndex::build(&counts, block, config.index)?;
        Ok(MutableBitmap {
            universe,
            block,
            words,
            index,
            index_kind: config.index,
            kernels,
            rank_fn: kernels.rank.kernel(block),
            select_fn: kernels.select.kernel(block),
            ones,
        })
    }

    /// Number of bits.
    pub fn len(&self) -> u64 {
        self.universe
    }

    pub fn is_empty(&self) -> bool {
        self.universe == 0
    }

    /// Number of set bits.
    pub fn ones(&self) -> u64 {
        self.ones
    }

    pub fn block(&self) -> BlockBits {
        self.block
    }

    pub fn index_kind(&self) -> IndexKind {
        self.index_kind
    }

    pub fn kernels(&self) -> KernelConfig {
        self.kernels
    }

    pub fn config(&self) -> BitmapConfig {
        BitmapConfig { block: self.block, index: self.index_kind, kernels: Some(self.kernels) }
    }

    /// The `⌈len / 64⌉` words holding the bits.
    pub fn words(&self) -> &[u64] {
        &self.words[..self.universe.div_ceil(64) as usize]
    }

    /// Height of the segment-tree index, or `None` for a Fenwick index.
    pub fn index_height(&self) -> Option<usize> {
        match &self.index {
            BlockIndex::Segment(t) => Some(t.height()),
            BlockIndex::Fenwick(_) => None,
        }
    }

    pub fn block_count(&self) -> usize {
        self.words.len() / self.block.words()
    }

    #[inline(always)]
    fn check(&self, i: u64) -> Result<()> {
        if i >= self.universe {
            return Err(Error::OutOfRange { index: i, len: self.universe });
        }
        Ok(())
    }

    #[inline(always)]
    fn block_words(&self, b: usize) -> &[u64] {
        let w = self.block.words();
        &self.words[b * w..(b + 1) * w]
    }

    #[inline]
    pub fn access(&self, i: u64) -> Result<bool> {
        self.check(i)?;
        Ok(self.words[(i / 64) as usize] >> (i % 64) & 1 == 1)
    }

    /// Toggles bit `i` and adjusts the count of its block by `±1`.
    #[inline]
    pub fn flip(&mut self, i: u64) -> Result<()> {
        self.check(i)?;
        let word = &mut self.words[(i / 64) as usize];
        *word ^= 1 << (i % 64);
        let sign = if *word >> (i % 64) & 1 == 1 { Sign::Plus } else { Sign::Minus };
        let b = (i / self.block.bits() as u64) as usize;
        self.index.update(b, sign);
        self.ones = self.ones.wrapping_add_signed(sign.delta());
        #[cfg(debug_assertions)]
        {
            let stored = self.index.sum(b) - if b == 0 { 0 } else { self.index.sum(b - 1) };
            debug_assert_eq!(stored, block_popcount(self.block_words(b)) as u64, "block {b} drifted");
        }
        Ok(())
    }

    /// Number of ones among positions `0..=i`.
    #[inline]
    pub fn rank(&self, i: u64) -> Result<u64> {
        self.check(i)?;
        let bits = self.block.bits() as u64;
        let b = (i / bits) as usize;
        let before = if b == 0 { 0 } else { self.index.sum(b - 1) };
        Ok(before + (self.rank_fn)(self.block_words(b), (i % bits) as usize) as u64)
    }

    /// Position of the `(k+1)`-th one.
    #[inline]
    pub fn select(&self, k: u64) -> Result<u64> {
        if k >= self.ones {
            return Err(Error::SelectOutOfRange { k, ones: self.ones });
        }
        let (b, before) = self.index.search(k);
        let offset = (self.select_fn)(self.block_words(b), (k - before) as u32);
        Ok(b as u64 * self.block.bits() as u64 + offset as u64)
    }

    pub fn space_report(&self) -> SpaceReport {
        SpaceReport::new(self.universe.div_ceil(64) * 8, self.index.space_bytes() as u64)
    }

    /// Full consistency check: padding, cached popcount and every index sum.
    pub fn check_coherence(&self) -> Result<(), String> {
        let tail = self.universe % 64;
        let last = self.universe.div_ceil(64) as usize;
        if tail != 0 && self.words[last - 1] >> tail != 0 {
            return Err("bits set in the padding of the last word".into());
        }
        if self.words[last..].iter().any(|&w| w != 0) {
            return Err("bits set in padding words".into());
        }
        let mut running = 0u64;
        for b in 0..self.block_count() {
            running += block_popcount(self.block_words(b)) as u64;
            let sum = self.index.sum(b);
            if sum != running {
                return Err(format!("index sum({b}) = {sum}, blocks hold {running}"));
            }
        }
        if running != self.ones {
            return Err(format!("cached ones {} but blocks hold {running}", self.ones));
        }
        if let BlockIndex::Segment(t) = &self.index {
            t.check_invariants()?;
        }
        Ok(())
    }
}
