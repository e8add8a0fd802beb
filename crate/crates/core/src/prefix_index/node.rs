//! Two-level segment-tree nodes.
//!
//! A node with fanout `SEGS * LEN` splits its keys into `SEGS` segments of
//! `LEN` keys. Each segment is stored in inclusive prefix-sum, and `summary`
//! holds the exclusive prefix-sum of the segment totals (`summary[0] == 0`),
//! so the prefix sum of the first `i + 1` keys is
//! `summary[i / LEN] + segments[i / LEN][i % LEN]`.
//!
//! A `±1` update of key `i` adds one precomputed row to the summary and one
//! precomputed row to the segment holding `i`. A search compares the target
//! against all summary lanes, then against all lanes of one segment, and
//! takes the first strictly greater lane.

use std::sync::OnceLock;

use crate::lanes::{self, LaneInt};

/// Direction of a `±1` update. The discriminant selects the table row set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus = 0,
    Minus = 1,
}

impl Sign {
    #[inline(always)]
    pub fn delta(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    #[inline(always)]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    #[inline(always)]
    fn lane<T: LaneInt>(self) -> T {
        match self {
            Sign::Plus => T::PLUS_ONE,
            Sign::Minus => T::MINUS_ONE,
        }
    }
}

/// Precomputed update rows, indexed `[sign][position][lane]`.
///
/// `summary[sign][s]` is zero in lanes `0..=s` and `±1` after, so adding it
/// bumps the prefix of every segment after `s`. `segment[sign][k]` is zero in
/// lanes `0..k` and `±1` from `k` on. Entries are two's complement in the
/// lane width.
#[derive(Debug, Clone)]
pub struct UpdateTables<S, K, const SEGS: usize, const LEN: usize> {
    pub summary: [[[S; SEGS]; SEGS]; 2],
    pub segment: [[[K; LEN]; LEN]; 2],
}

impl<S: LaneInt, K: LaneInt, const SEGS: usize, const LEN: usize> UpdateTables<S, K, SEGS, LEN> {
    #[allow(clippy::needless_range_loop)]
    pub fn generate() -> Self {
        let mut summary = [[[S::ZERO; SEGS]; SEGS]; 2];
        let mut segment = [[[K::ZERO; LEN]; LEN]; 2];
        for sign in [Sign::Plus, Sign::Minus] {
            for s in 0..SEGS {
                for lane in s + 1..SEGS {
                    summary[sign as usize][s][lane] = sign.lane();
                }
            }
            for k in 0..LEN {
                for lane in k..LEN {
                    segment[sign as usize][k][lane] = sign.lane();
                }
            }
        }
        UpdateTables { summary, segment }
    }
}

#[repr(C)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node<S, K, const SEGS: usize, const LEN: usize> {
    summary: [S; SEGS],
    segments: [[K; LEN]; SEGS],
}

/// Per-type static data for concrete node layouts.
pub trait NodeSpec<S, K, const SEGS: usize, const LEN: usize> {
    const SPEC_NAME: &'static str;
    fn tables() -> &'static UpdateTables<S, K, SEGS, LEN>;
}

/// Operations the tree needs from a node, independent of its lane widths.
pub trait NodeType: Clone + Send + Sync + 'static {
    const FANOUT: usize;
    const BYTES: usize;
    const NAME: &'static str;

    /// Builds a node over `counts` (at most `FANOUT` values); missing trailing
    /// counts are zero.
    fn build(counts: &[u32]) -> Self;
    /// Sum of keys `0..=i`.
    fn sum(&self, i: usize) -> u64;
    /// Sum of keys `0..i` (zero for `i == 0`).
    fn sum_before(&self, i: usize) -> u64;
    fn total(&self) -> u64;
    fn update<const LANES: bool>(&mut self, i: usize, sign: Sign);
    /// Smallest `i` with `sum(i) > x`, and `sum_before(i)`. Requires
    /// `x < total()`.
    fn search<const LANES: bool>(&self, x: u64) -> (usize, u64);
    /// Checks the layout invariants, returning a description of the first
    /// violation.
    fn check(&self) -> Result<(), String>;
}

/// Whether `v` can be stored in lane type `T` without touching the sign bit
/// of 16-bit lanes (those are compared as signed on narrow hardware).
#[inline(always)]
fn fits<T: LaneInt>(v: u64) -> bool {
    match T::BITS {
        16 => v < 1 << 15,
        64 => true,
        bits => v >> bits == 0,
    }
}

impl<S, K, const SEGS: usize, const LEN: usize> Node<S, K, SEGS, LEN>
where
    S: LaneInt,
    K: LaneInt,
{
    pub fn summary(&self) -> &[S; SEGS] {
        &self.summary
    }

    pub fn segment(&self, s: usize) -> &[K; LEN] {
        &self.segments[s]
    }
}

impl<S, K, const SEGS: usize, const LEN: usize> NodeType for Node<S, K, SEGS, LEN>
where
    S: LaneInt,
    K: LaneInt,
    Self: NodeSpec<S, K, SEGS, LEN>,
{
    const FANOUT: usize = SEGS * LEN;
    const BYTES: usize = std::mem::size_of::<Self>();
    const NAME: &'static str = <Self as NodeSpec<S, K, SEGS, LEN>>::SPEC_NAME;

    fn build(counts: &[u32]) -> Self {
        assert!(counts.len() <= Self::FANOUT);
        let mut node = Node { summary: [S::ZERO; SEGS], segments: [[K::ZERO; LEN]; SEGS] };
        let mut running = 0u64;
        for s in 0..SEGS {
            assert!(fits::<S>(running), "{}: summary value {running} overflows its lane", <Self as NodeType>::NAME);
            node.summary[s] = S::from_u64(running);
            let mut acc = 0u64;
            for k in 0..LEN {
                acc += counts.get(s * LEN + k).copied().unwrap_or(0) as u64;
                assert!(fits::<K>(acc), "{}: key value {acc} overflows its lane", <Self as NodeType>::NAME);
                node.segments[s][k] = K::from_u64(acc);
            }
            running += acc;
        }
        node
    }

    #[inline(always)]
    fn sum(&self, i: usize) -> u64 {
        let s = i / LEN;
        self.summary[s].to_u64() + self.segments[s][i % LEN].to_u64()
    }

    #[inline(always)]
    fn sum_before(&self, i: usize) -> u64 {
        if i == 0 {
            0
        } else {
            self.sum(i - 1)
        }
    }

    #[inline(always)]
    fn total(&self) -> u64 {
        self.sum(Self::FANOUT - 1)
    }

    #[inline(always)]
    fn update<const LANES: bool>(&mut self, i: usize, sign: Sign) {
        let seg = i / LEN;
        let off = i % LEN;
        if LANES {
            let tables = Self::tables();
            lanes::add_assign(&mut self.summary, &tables.summary[sign as usize][seg]);
            lanes::add_assign(&mut self.segments[seg], &tables.segment[sign as usize][off]);
        } else {
            let ds: S = sign.lane();
            for v in &mut self.summary[seg + 1..] {
                *v = v.wrapping_add(ds);
            }
            let dk: K = sign.lane();
            for v in &mut self.segments[seg][off..] {
                *v = v.wrapping_add(dk);
            }
        }
        debug_assert!(
            fits::<K>(self.segments[seg][LEN - 1].to_u64()),
            "{}: segment {seg} overflowed its lane",
            <Self as NodeType>::NAME
        );
    }

    #[inline(always)]
    fn search<const LANES: bool>(&self, x: u64) -> (usize, u64) {
        debug_assert!(x < self.total());
        if LANES {
            // summary[0] == 0 <= x, so at least one lane is counted
            let seg = lanes::count_le_wide(&self.summary, x) - 1;
            let base = self.summary[seg].to_u64();
            let keys = &self.segments[seg];
            // x - base is below the segment total, so it fits in a key lane
            let off = lanes::first_greater(keys, K::from_u64(x - base));
            debug_assert!(off < LEN);
            let before = if off == 0 { 0 } else { keys[off - 1].to_u64() };
            (seg * LEN + off, base + before)
        } else {
            let mut seg = 0;
            while seg + 1 < SEGS && self.summary[seg + 1].to_u64() <= x {
                seg += 1;
            }
            let base = self.summary[seg].to_u64();
            let keys = &self.segments[seg];
            let mut off = 0;
            while keys[off].to_u64() <= x - base {
                off += 1;
            }
            let before = if off == 0 { 0 } else { keys[off - 1].to_u64() };
            (seg * LEN + off, base + before)
        }
    }

    fn check(&self) -> Result<(), String> {
        if self.summary[0] != S::ZERO {
            return Err(format!("{}: summary[0] = {:?}", <Self as NodeType>::NAME, self.summary[0]));
        }
        let mut running = 0u64;
        for s in 0..SEGS {
            if self.summary[s].to_u64() != running {
                return Err(format!("{}: summary[{s}] is not the prefix of segment totals", <Self as NodeType>::NAME));
            }
            let keys = &self.segments[s];
            for k in 1..LEN {
                if keys[k] < keys[k - 1] {
                    return Err(format!("{}: segment {s} decreases at key {k}", <Self as NodeType>::NAME));
                }
            }
            if !fits::<K>(keys[LEN - 1].to_u64()) {
                return Err(format!("{}: segment {s} uses the lane sign bit", <Self as NodeType>::NAME));
            }
            running += keys[LEN - 1].to_u64();
        }
        Ok(())
    }
}

macro_rules! node_types {
    ($($(#[$meta:meta])* $alias:ident = ($s:ty, $k:ty, $segs:literal, $len:literal, $name:literal);)+) => {
        $(
            $(#[$meta])*
            pub type $alias = Node<$s, $k, $segs, $len>;

            impl NodeSpec<$s, $k, $segs, $len> for $alias {
                const SPEC_NAME: &'static str = $name;

                fn tables() -> &'static UpdateTables<$s, $k, $segs, $len> {
                    static TABLES: OnceLock<UpdateTables<$s, $k, $segs, $len>> = OnceLock::new();
                    TABLES.get_or_init(UpdateTables::generate)
                }
            }
        )+
    };
}

node_types! {
    /// 4 × 64-bit summary, 4 segments of 8 × 32-bit keys (160 bytes).
    NarrowNode32 = (u64, u32, 4, 8, "node32");
    /// 8 × 32-bit summary, 8 segments of 8 × 32-bit keys (288 bytes).
    NarrowNode64 = (u32, u32, 8, 8, "node64");
    /// 8 × 32-bit summary, 8 segments of 16 × 16-bit keys (288 bytes).
    NarrowNode128 = (u32, u16, 8, 16, "node128");
    /// 8 × 64-bit summary, 8 segments of 16 × 32-bit keys (576 bytes).
    WideNode128 = (u64, u32, 8, 16, "node128");
    /// 16 × 32-bit summary, 16 segments of 16 × 32-bit keys (1088 bytes).
    WideNode256 = (u32, u32, 16, 16, "node256");
    /// 16 × 32-bit summary, 16 segments of 32 × 16-bit keys (1088 bytes).
    WideNode512 = (u32, u16, 16, 32, "node512");
    /// Small 4 × 4 layout, handy for worked examples.
    Node16 = (u32, u16, 4, 4, "node16");
}
