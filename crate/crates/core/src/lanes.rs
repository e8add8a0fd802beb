//! Fixed-width lane abstraction.
//!
//! Every "vector" primitive used by the kernels and by the segment-tree nodes
//! is written against plain `[T; N]` arrays. The lane-parallel forms build a
//! full comparison mask or a full row addition with no data-dependent
//! branches, which is the shape the compiler lowers to packed compare/add
//! instructions. The `*_scalar` forms are the sequential references; both
//! must produce identical results for every input.

use std::fmt::Debug;

/// An unsigned integer that can live in a lane.
pub trait LaneInt: Copy + Eq + Ord + Debug + Send + Sync + 'static {
    const BITS: u32;
    const ZERO: Self;
    /// Two's-complement `+1` and `-1` in the lane width.
    const PLUS_ONE: Self;
    const MINUS_ONE: Self;

    fn to_u64(self) -> u64;
    /// Truncating conversion.
    fn from_u64(v: u64) -> Self;
    fn wrapping_add(self, other: Self) -> Self;
    /// The lane reinterpreted as a signed integer of the same width.
    fn to_signed(self) -> i64;
}

macro_rules! impl_lane_int {
    ($t:ty, $s:ty) => {
        impl LaneInt for $t {
            const BITS: u32 = <$t>::BITS;
            const ZERO: Self = 0;
            const PLUS_ONE: Self = 1;
            const MINUS_ONE: Self = <$t>::MAX;

            #[inline(always)]
            fn to_u64(self) -> u64 {
                self as u64
            }

            #[inline(always)]
            fn from_u64(v: u64) -> Self {
                v as $t
            }

            #[inline(always)]
            fn wrapping_add(self, other: Self) -> Self {
                <$t>::wrapping_add(self, other)
            }

            #[inline(always)]
            fn to_signed(self) -> i64 {
                self as $s as i64
            }
        }
    };
}

impl_lane_int!(u16, i16);
impl_lane_int!(u32, i32);
impl_lane_int!(u64, i64);

/// Bitmask with bit `k` set iff `lanes[k] > x`.
#[inline(always)]
pub fn greater_mask<T: LaneInt, const N: usize>(lanes: &[T; N], x: T) -> u64 {
    debug_assert!(N <= 63);
    let mut mask = 0u64;
    for (k, &v) in lanes.iter().enumerate() {
        mask |= ((v > x) as u64) << k;
    }
    mask
}

/// Index of the first lane strictly greater than `x`, or `N` if none is.
///
/// This is the "index of first set" over a compare-greater mask, computed
/// with a single trailing-zero count.
#[inline(always)]
pub fn first_greater<T: LaneInt, const N: usize>(lanes: &[T; N], x: T) -> usize {
    (greater_mask(lanes, x) | (1u64 << N)).trailing_zeros() as usize
}

#[inline]
pub fn first_greater_scalar<T: LaneInt, const N: usize>(lanes: &[T; N], x: T) -> usize {
    for (k, &v) in lanes.iter().enumerate() {
        if v > x {
            return k;
        }
    }
    N
}

/// Number of lanes `<= x`, comparing in 64-bit so `x` may exceed `T`'s range.
#[inline(always)]
pub fn count_le_wide<T: LaneInt, const N: usize>(lanes: &[T; N], x: u64) -> usize {
    let mut mask = 0u64;
    for (k, &v) in lanes.iter().enumerate() {
        mask |= ((v.to_u64() <= x) as u64) << k;
    }
    mask.count_ones() as usize
}

/// `acc[k] += delta[k]` for every lane, wrapping in the lane width.
#[inline(always)]
pub fn add_assign<T: LaneInt, const N: usize>(acc: &mut [T; N], delta: &[T; N]) {
    for (a, &d) in acc.iter_mut().zip(delta.iter()) {
        *a = a.wrapping_add(d);
    }
}

/// Shift lanes towards higher indices by `by`, filling with zero.
#[inline(always)]
pub fn shift_up<T: LaneInt, const N: usize>(lanes: &[T; N], by: usize) -> [T; N] {
    let mut out = [T::ZERO; N];
    if by < N {
        out[by..].copy_from_slice(&lanes[..N - by]);
    }
    out
}
