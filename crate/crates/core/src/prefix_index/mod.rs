//! Searchable prefix sums over per-block one-counts.
//!
//! [`PrefixIndex`] is a flat b-ary segment tree whose nodes are two-level
//! layouts (see [`node`]). It supports `sum(i)`, `±1` `update(i)` and
//! `search(x)` (smallest `i` with `sum(i) > x`), each touching one node per
//! level. Three configurations exist:
//!
//! | config   | node types (root → leaf)          | heights | capacity (blocks)      |
//! |----------|-----------------------------------|---------|------------------------|
//! | `narrow` | node32, node64, node64, node128   | 1–4     | 2^7, 2^13, 2^19, 2^24  |
//! | `wide`   | node128, node256, node512         | 1–3     | 2^9, 2^17, 2^24        |
//! | `scalar` | same nodes as `narrow`            | 1–4     | same as `narrow`       |
//!
//! `narrow` and `wide` use the lane-parallel node kernels, `scalar` runs the
//! sequential reference kernels over the narrow layout. All three return the
//! same answers.
//!
//! Within a node the lookup is `summary[i / L] + keys[i]` where `L` is the
//! number of keys per segment (16 for the narrow node128).

pub mod node;
pub mod tree;

use std::fmt;
use std::str::FromStr;

pub use node::Sign;
use node::{NarrowNode128, NarrowNode32, NarrowNode64, NodeType, WideNode128, WideNode256, WideNode512};
use tree::{Internal, Leaf, Levels};

use crate::{Error, Result};

/// Largest number of counts (blocks) an index can hold.
pub const MAX_LEN: usize = 1 << 24;

/// The operations shared by every searchable prefix-sum structure.
pub trait SearchablePrefixSum {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `A[0] + ... + A[i]`.
    fn sum(&self, i: usize) -> u64;

    /// `A[i] += ±1`.
    fn update(&mut self, i: usize, sign: Sign);

    /// Smallest `i` with `sum(i) > x`, paired with `sum(i - 1)` (0 for
    /// `i == 0`). Requires `x < total()`.
    fn search(&self, x: u64) -> (usize, u64);

    fn total(&self) -> u64 {
        self.sum(self.len() - 1)
    }

    fn space_bytes(&self) -> usize;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexConfig {
    Scalar,
    Narrow,
    Wide,
}

impl IndexConfig {
    pub const ALL: [IndexConfig; 3] = [IndexConfig::Scalar, IndexConfig::Narrow, IndexConfig::Wide];

    pub fn name(self) -> &'static str {
        match self {
            IndexConfig::Scalar => "scalar",
            IndexConfig::Narrow => "narrow",
            IndexConfig::Wide => "wide",
        }
    }

    /// Block capacity of each tree height, lowest height first.
    pub fn capacities(self) -> &'static [usize] {
        match self {
            IndexConfig::Scalar | IndexConfig::Narrow => &[1 << 7, 1 << 13, 1 << 19, 1 << 24],
            IndexConfig::Wide => &[1 << 9, 1 << 17, 1 << 24],
        }
    }

    /// Node type name and byte size for every node type of the configuration.
    pub fn node_types(self) -> [(&'static str, usize); 3] {
        match self {
            IndexConfig::Scalar | IndexConfig::Narrow => [
                (NarrowNode32::NAME, NarrowNode32::BYTES),
                (NarrowNode64::NAME, NarrowNode64::BYTES),
                (NarrowNode128::NAME, NarrowNode128::BYTES),
            ],
            IndexConfig::Wide => [
                (WideNode128::NAME, WideNode128::BYTES),
                (WideNode256::NAME, WideNode256::BYTES),
                (WideNode512::NAME, WideNode512::BYTES),
            ],
        }
    }

    /// Largest block size whose counts keep every 16-bit leaf segment below
    /// the lane sign bit.
    pub fn max_block_bits(self) -> u32 {
        match self {
            // 16 keys of at most B in a 16-bit segment: 16 B < 2^15
            IndexConfig::Scalar | IndexConfig::Narrow => (1 << 11) - 1,
            // 32 keys per segment: 32 B < 2^15
            IndexConfig::Wide => (1 << 10) - 1,
        }
    }

    /// Minimal tree height holding `len` counts.
    pub fn height_for(self, len: usize) -> Result<usize> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::Capacity { requested: len as u64, limit: MAX_LEN as u64 });
        }
        Ok(self.capacities().iter().position(|&c| len <= c).expect("len within MAX_LEN") + 1)
    }

    /// `(blocks covered by one node, bytes per node)` of every level, root
    /// first, for a tree of the given height.
    fn level_geometry(self, height: usize) -> Vec<(usize, usize)> {
        let [top, mid, leaf] = self.node_types().map(|(_, bytes)| bytes);
        let caps = self.capacities();
        let bytes: Vec<usize> = match (self, height) {
            (IndexConfig::Wide, h) => [top, mid, leaf][3 - h..].to_vec(),
            (_, 4) => vec![top, mid, mid, leaf],
            (_, h) => vec![mid; h - 1].into_iter().chain([leaf]).collect(),
        };
        // the node at depth d covers capacity(height - d) blocks
        (0..height).map(|d| (caps[height - d - 1], bytes[d])).collect()
    }

    /// Exact index size for `len` counts from the node counts alone, without
    /// building anything.
    pub fn space_bytes_for(self, len: usize) -> Result<usize> {
        let height = self.height_for(len)?;
        Ok(self.level_geometry(height).into_iter().map(|(cover, bytes)| len.div_ceil(cover) * bytes).sum())
    }
}

impl fmt::Display for IndexConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(IndexConfig::Scalar),
            "narrow" => Ok(IndexConfig::Narrow),
            "wide" => Ok(IndexConfig::Wide),
            _ => Err(Error::UnknownName { kind: "index config", name: s.to_string() }),
        }
    }
}

type NarrowH1 = Leaf<NarrowNode128>;
type NarrowH2 = Internal<NarrowNode64, NarrowH1>;
type NarrowH3 = Internal<NarrowNode64, NarrowH2>;
type NarrowH4 = Internal<NarrowNode32, NarrowH3>;
type WideH1 = Leaf<WideNode512>;
type WideH2 = Internal<WideNode256, WideH1>;
type WideH3 = Internal<WideNode128, WideH2>;

#[derive(Debug, Clone)]
enum Tree {
    Narrow1(NarrowH1),
    Narrow2(NarrowH2),
    Narrow3(NarrowH3),
    Narrow4(NarrowH4),
    Wide1(WideH1),
    Wide2(WideH2),
    Wide3(WideH3),
}

/// Runs `$body` with `$t` bound to the concrete tree and `$lanes` to the
/// const kernel selector.
macro_rules! dispatch {
    ($self:ident, $t:ident, $lanes:ident => $body:expr) => {
        dispatch!(@match $self, &$self.tree, $t, $lanes => $body)
    };
    (mut $self:ident, $t:ident, $lanes:ident => $body:expr) => {
        dispatch!(@match $self, &mut $self.tree, $t, $lanes => $body)
    };
    (@match $self:ident, $tree:expr, $t:ident, $lanes:ident => $body:expr) => {{
        let scalar = $self.config == IndexConfig::Scalar;
        match $tree {
            Tree::Narrow1($t) => dispatch!(@lanes scalar, $lanes => $body),
            Tree::Narrow2($t) => dispatch!(@lanes scalar, $lanes => $body),
            Tree::Narrow3($t) => dispatch!(@lanes scalar, $lanes => $body),
            Tree::Narrow4($t) => dispatch!(@lanes scalar, $lanes => $body),
            Tree::Wide1($t) => { const $lanes: bool = true; $body }
            Tree::Wide2($t) => { const $lanes: bool = true; $body }
            Tree::Wide3($t) => { const $lanes: bool = true; $body }
        }
    }};
    (@lanes $scalar:ident, $lanes:ident => $body:expr) => {
        if $scalar {
            const $lanes: bool = false;
            $body
        } else {
            const $lanes: bool = true;
            $body
        }
    };
}

/// Segment-tree searchable prefix sums over at most 2^24 block counts.
#[derive(Debug, Clone)]
pub struct PrefixIndex {
    config: IndexConfig,
    tree: Tree,
    len: usize,
    block_bits: u32,
    total: u64,
}

impl PrefixIndex {
    /// Builds the index over `counts`, each at most `block_bits`.
    pub fn build(counts: &[u32], block_bits: u32, config: IndexConfig) -> Result<Self> {
        let height = config.height_for(counts.len())?;
        if block_bits == 0 || block_bits > config.max_block_bits() {
            return Err(Error::UnsupportedBlockSize(block_bits as u64));
        }
        if let Some((index, &value)) = counts.iter().enumerate().find(|(_, &c)| c > block_bits) {
            return Err(Error::Domain { index, value: value as u64, block_bits: block_bits as u64 });
        }
        let tree = match (config, height) {
            (IndexConfig::Wide, 1) => Tree::Wide1(WideH1::build(counts)),
            (IndexConfig::Wide, 2) => Tree::Wide2(WideH2::build(counts)),
            (IndexConfig::Wide, _) => Tree::Wide3(WideH3::build(counts)),
            (_, 1) => Tree::Narrow1(NarrowH1::build(counts)),
            (_, 2) => Tree::Narrow2(NarrowH2::build(counts)),
            (_, 3) => Tree::Narrow3(NarrowH3::build(counts)),
            (_, _) => Tree::Narrow4(NarrowH4::build(counts)),
        };
        let total = counts.iter().map(|&c| c as u64).sum();
        Ok(PrefixIndex { config, tree, len: counts.len(), block_bits, total })
    }

    pub fn config(&self) -> IndexConfig {
        self.config
    }

    pub fn block_bits(&self) -> u32 {
        self.block_bits
    }

    pub fn height(&self) -> usize {
        match &self.tree {
            Tree::Narrow1(_) | Tree::Wide1(_) => 1,
            Tree::Narrow2(_) | Tree::Wide2(_) => 2,
            Tree::Narrow3(_) | Tree::Wide3(_) => 3,
            Tree::Narrow4(_) => 4,
        }
    }

    /// `(node type, node count, bytes per node)` per level, root first.
    pub fn level_shape(&self) -> Vec<(&'static str, usize, usize)> {
        let mut out = Vec::new();
        dispatch!(self, t, _L => t.level_shape(&mut out));
        out
    }

    /// Count stored for block `i`.
    pub fn count(&self, i: usize) -> u64 {
        let before = if i == 0 { 0 } else { self.sum(i - 1) };
        self.sum(i) - before
    }

    /// Verifies every node invariant and the parent/child totals.
    pub fn check_invariants(&self) -> Result<(), String> {
        dispatch!(self, t, _L => t.check())
    }
}

impl SearchablePrefixSum for PrefixIndex {
    #[inline]
    fn len(&self) -> usize {
        self.len
    }

    #[inline]
    fn sum(&self, i: usize) -> u64 {
        assert!(i < self.len, "sum({i}) outside an index of {} counts", self.len);
        dispatch!(self, t, _L => t.sum(i))
    }

    #[inline]
    fn update(&mut self, i: usize, sign: Sign) {
        assert!(i < self.len, "update({i}) outside an index of {} counts", self.len);
        #[cfg(debug_assertions)]
        {
            let c = self.count(i);
            match sign {
                Sign::Plus => assert!(c < self.block_bits as u64, "update: count of block {i} is full"),
                Sign::Minus => assert!(c > 0, "update: count of block {i} is zero"),
            }
        }
        dispatch!(mut self, t, LANES => t.update::<LANES>(i, sign));
        self.total = self.total.wrapping_add_signed(sign.delta());
    }

    #[inline]
    fn search(&self, x: u64) -> (usize, u64) {
        assert!(x < self.total, "search({x}) with a total of {}", self.total);
        dispatch!(self, t, LANES => t.search::<LANES>(0, x))
    }

    #[inline]
    fn total(&self) -> u64 {
        self.total
    }

    fn space_bytes(&self) -> usize {
        dispatch!(self, t, _L => t.space_bytes())
    }
}
