//! Rank and select inside one block of `B ∈ {64, 256, 512}` bits, with no
//! auxiliary space.
//!
//! Rank is a two-step composition (popcount, then prefix-sum of the
//! counters), select a three-step one (popcount, search for the word holding
//! the target one, select inside that word). Each step has interchangeable
//! kernels; every combination returns the same answers.
//!
//! **Rank is inclusive**: `block_rank(b, i)` counts ones at positions `0..=i`.
//!
//! A strategy is turned into a plain function pointer once, via
//! [`RankStrategy::kernel`] / [`SelectStrategy::kernel`], so the bitmap's hot
//! path does not dispatch on the strategy per call.

use std::fmt;
use std::str::FromStr;

use crate::lanes;
use crate::word_ops::{
    mask_low, popcount_broadword, popcount_builtin, popcount_nibble, popcount_vector, prefix_sum_lanes,
    prefix_sum_unrolled, select_bw_sdsl, select_bw_succinct, select_pdep,
};
pub use crate::word_ops::{InWordKernel, PopcountKernel, PrefixKernel, SearchKernel};
use crate::{Error, Result};

/// Supported block sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockBits {
    B64,
    B256,
    B512,
}

impl BlockBits {
    pub const ALL: [BlockBits; 3] = [BlockBits::B64, BlockBits::B256, BlockBits::B512];

    pub fn new(bits: u64) -> Result<Self> {
        match bits {
            64 => Ok(BlockBits::B64),
            256 => Ok(BlockBits::B256),
            512 => Ok(BlockBits::B512),
            other => Err(Error::UnsupportedBlockSize(other)),
        }
    }

    #[inline(always)]
    pub const fn bits(self) -> usize {
        match self {
            BlockBits::B64 => 64,
            BlockBits::B256 => 256,
            BlockBits::B512 => 512,
        }
    }

    #[inline(always)]
    pub const fn words(self) -> usize {
        self.bits() / 64
    }
}

impl fmt::Display for BlockBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits())
    }
}

impl FromStr for BlockBits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: u64 = s.parse().map_err(|_| Error::UnknownName { kind: "block size", name: s.to_string() })?;
        BlockBits::new(bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RankStrategy {
    pub popcount: PopcountKernel,
    pub prefix: PrefixKernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SelectStrategy {
    pub popcount: PopcountKernel,
    pub search: SearchKernel,
    pub in_word: InWordKernel,
}

/// The pair of in-block strategies a bitmap is configured with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KernelConfig {
    pub rank: RankStrategy,
    pub select: SelectStrategy,
}

pub type RankFn = fn(&[u64], usize) -> u32;
pub type SelectFn = fn(&[u64], u32) -> u32;

impl RankStrategy {
    pub const fn new(popcount: PopcountKernel, prefix: PrefixKernel) -> Self {
        RankStrategy { popcount, prefix }
    }

    /// All nine popcount × prefix-sum combinations.
    pub fn all() -> impl Iterator<Item = RankStrategy> {
        PopcountKernel::ALL.iter().flat_map(|&p| PrefixKernel::ALL.iter().map(move |&x| RankStrategy::new(p, x)))
    }

    /// Monomorphic rank kernel for blocks of `block` bits.
    pub fn kernel(self, block: BlockBits) -> RankFn {
        match block {
            BlockBits::B64 => rank_fn_for::<1>(self),
            BlockBits::B256 => rank_fn_for::<4>(self),
            BlockBits::B512 => rank_fn_for::<8>(self),
        }
    }
}

impl SelectStrategy {
    pub const fn new(popcount: PopcountKernel, search: SearchKernel, in_word: InWordKernel) -> Self {
        SelectStrategy { popcount, search, in_word }
    }

    /// All eighteen popcount × search × select-in-word combinations.
    pub fn all() -> impl Iterator<Item = SelectStrategy> {
        PopcountKernel::ALL.iter().flat_map(|&p| {
            SearchKernel::ALL
                .iter()
                .flat_map(move |&s| InWordKernel::ALL.iter().map(move |&w| SelectStrategy::new(p, s, w)))
        })
    }

    pub fn kernel(self, block: BlockBits) -> SelectFn {
        match block {
            BlockBits::B64 => select_fn_for::<1>(self),
            BlockBits::B256 => select_fn_for::<4>(self),
            BlockBits::B512 => select_fn_for::<8>(self),
        }
    }
}

impl fmt::Display for RankStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}", self.popcount, self.prefix)
    }
}

impl fmt::Display for SelectStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}+{}", self.popcount, self.search, self.in_word)
    }
}

impl KernelConfig {
    /// True for `B = 64`, where every strategy degenerates to one masked
    /// popcount for rank and one select-in-word for select.
    pub fn is_single_word(block: BlockBits) -> bool {
        block == BlockBits::B64
    }
}

/// Whether 512-bit lanes are available to the vector kernels on this CPU.
pub fn wide_lanes_available() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("avx512bw")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

/// Tuned defaults for a bitmap of `universe_bits` bits split into blocks of
/// `block_bits`: rank uses builtin popcount with the unrolled prefix sum up to
/// `2^25` bits and the early-exit loop beyond; select uses vector popcount
/// with lane search when wide lanes exist, builtin with the loop otherwise,
/// both finishing with pdep.
pub fn recommended_strategies(block_bits: u64, universe_bits: u64) -> Result<KernelConfig> {
    recommended_strategies_with(block_bits, universe_bits, wide_lanes_available())
}

pub fn recommended_strategies_with(block_bits: u64, universe_bits: u64, wide_lanes: bool) -> Result<KernelConfig> {
    let block = BlockBits::new(block_bits)?;
    if KernelConfig::is_single_word(block) {
        return Ok(KernelConfig {
            rank: RankStrategy::new(PopcountKernel::Builtin, PrefixKernel::Loop),
            select: SelectStrategy::new(PopcountKernel::Builtin, SearchKernel::Loop, InWordKernel::Pdep),
        });
    }
    let prefix = if universe_bits <= 1 << 25 { PrefixKernel::Unrolled } else { PrefixKernel::Loop };
    let select = if wide_lanes {
        SelectStrategy::new(PopcountKernel::Vector, SearchKernel::Lanes, InWordKernel::Pdep)
    } else {
        SelectStrategy::new(PopcountKernel::Builtin, SearchKernel::Loop, InWordKernel::Pdep)
    };
    Ok(KernelConfig { rank: RankStrategy::new(PopcountKernel::Builtin, prefix), select })
}

// ---------------------------------------------------------------------------
// kernel slots

trait PopcountSlot {
    fn one(w: u64) -> u32;
    fn all<const W: usize>(words: &[u64; W]) -> [u32; W] {
        std::array::from_fn(|k| Self::one(words[k]))
    }
}

struct Builtin;
struct Broadword;
struct Vector;

impl PopcountSlot for Builtin {
    #[inline(always)]
    fn one(w: u64) -> u32 {
        popcount_builtin(w)
    }
}

impl PopcountSlot for Broadword {
    #[inline(always)]
    fn one(w: u64) -> u32 {
        popcount_broadword(w)
    }
}

impl PopcountSlot for Vector {
    #[inline(always)]
    fn one(w: u64) -> u32 {
        popcount_nibble(w)
    }

    #[inline(always)]
    fn all<const W: usize>(words: &[u64; W]) -> [u32; W] {
        popcount_vector(words)
    }
}

trait InWordSlot {
    fn select(w: u64, k: u32) -> u32;
}

struct Pdep;
struct BwSdsl;
struct BwSuccinct;

impl InWordSlot for Pdep {
    #[inline(always)]
    fn select(w: u64, k: u32) -> u32 {
        select_pdep(w, k)
    }
}

impl InWordSlot for BwSdsl {
    #[inline(always)]
    fn select(w: u64, k: u32) -> u32 {
        select_bw_sdsl(w, k)
    }
}

impl InWordSlot for BwSuccinct {
    #[inline(always)]
    fn select(w: u64, k: u32) -> u32 {
        select_bw_succinct(w, k)
    }
}

const LOOP: u8 = 0;
const UNROLLED: u8 = 1;
const LANES: u8 = 2;

#[inline(always)]
fn as_block<const W: usize>(words: &[u64]) -> &[u64; W] {
    words.try_into().expect("block has the wrong number of words")
}

fn rank_kernel<P: PopcountSlot, const PREFIX: u8, const W: usize>(words: &[u64], i: usize) -> u32 {
    let block = as_block::<W>(words);
    debug_assert!(i < W * 64, "block_rank: position {i} outside block");
    let j = i / 64;
    let keep = (i % 64) as u32 + 1;
    if PREFIX == LOOP {
        let mut acc = 0;
        for &w in &block[..j] {
            acc += P::one(w);
        }
        return acc + P::one(mask_low(block[j], keep));
    }
    let mut masked = *block;
    masked[j] = mask_low(masked[j], keep);
    let counts = P::all(&masked);
    let sums = if PREFIX == UNROLLED { prefix_sum_unrolled(&counts) } else { prefix_sum_lanes(&counts) };
    sums[j]
}

fn select_kernel<P: PopcountSlot, const SEARCH: u8, S: InWordSlot, const W: usize>(words: &[u64], k: u32) -> u32 {
    let block = as_block::<W>(words);
    if SEARCH == LOOP {
        let mut before = 0;
        for (j, &w) in block.iter().enumerate() {
            let c = P::one(w);
            if k < before + c {
                return j as u32 * 64 + S::select(w, k - before);
            }
            before += c;
        }
        panic!("block_select: k={k} but the block holds only {before} ones");
    }
    let sums = prefix_sum_lanes(&P::all(block));
    let j = lanes::first_greater(&sums, k);
    assert!(j < W, "block_select: k={k} but the block holds only {} ones", sums[W - 1]);
    let before = if j == 0 { 0 } else { sums[j - 1] };
    j as u32 * 64 + S::select(block[j], k - before)
}

fn rank_fn_for<const W: usize>(s: RankStrategy) -> RankFn {
    macro_rules! pick {
        ($p:ty) => {
            match s.prefix {
                PrefixKernel::Loop => rank_kernel::<$p, LOOP, W>,
                PrefixKernel::Unrolled => rank_kernel::<$p, UNROLLED, W>,
                PrefixKernel::Lanes => rank_kernel::<$p, LANES, W>,
            }
        };
    }
    match s.popcount {
        PopcountKernel::Builtin => pick!(Builtin),
        PopcountKernel::Broadword => pick!(Broadword),
        PopcountKernel::Vector => pick!(Vector),
    }
}

fn select_fn_for<const W: usize>(s: SelectStrategy) -> SelectFn {
    macro_rules! in_word {
        ($p:ty, $search:expr) => {
            match s.in_word {
                InWordKernel::Pdep => select_kernel::<$p, $search, Pdep, W>,
                InWordKernel::BroadwordSdsl => select_kernel::<$p, $search, BwSdsl, W>,
                InWordKernel::BroadwordSuccinct => select_kernel::<$p, $search, BwSuccinct, W>,
            }
        };
    }
    macro_rules! search {
        ($p:ty) => {
            match s.search {
                SearchKernel::Loop => in_word!($p, LOOP),
                SearchKernel::Lanes => in_word!($p, LANES),
            }
        };
    }
    match s.popcount {
        PopcountKernel::Builtin => search!(Builtin),
        PopcountKernel::Broadword => search!(Broadword),
        PopcountKernel::Vector => search!(Vector),
    }
}

fn block_of(words: &[u64]) -> BlockBits {
    BlockBits::new(words.len() as u64 * 64).expect("block must hold 1, 4 or 8 words")
}

/// Ones among positions `0..=i` of the block. `words.len()` must be 1, 4 or 8.
pub fn block_rank(words: &[u64], i: usize, s: RankStrategy) -> u32 {
    s.kernel(block_of(words))(words, i)
}

/// Position of the `(k+1)`-th one of the block; `k` must be below the
/// block's popcount.
pub fn block_select(words: &[u64], k: u32, s: SelectStrategy) -> u32 {
    s.kernel(block_of(words))(words, k)
}

#[inline]
pub fn block_popcount(words: &[u64]) -> u32 {
    words.iter().map(|w| w.count_ones()).sum()
}
