//! Primitives on single 64-bit words and on small counter arrays.
//!
//! Bit `k` of word `j` is bitmap position `64 * j + k` (least significant bit
//! first). Every kernel slot has a portable implementation; accelerated
//! instructions are used only when detected at runtime and must agree with
//! the portable path bit for bit.

use std::fmt;
use std::str::FromStr;

use crate::lanes;
use crate::Error;

const ONES_STEP_8: u64 = 0x0101_0101_0101_0101;
const MSBS_STEP_8: u64 = 0x8080_8080_8080_8080;

/// Popcount kernel slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PopcountKernel {
    /// The hardware population-count instruction.
    Builtin,
    /// Sideways addition on 2-, 4- and 8-bit fields.
    Broadword,
    /// Nibble-lookup popcount computing all counters of a block at once.
    Vector,
}

/// Prefix-sum kernel slot for rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrefixKernel {
    /// Sums counters up to the target word, stopping there.
    Loop,
    /// Branch-free prefix sum over all counters.
    Unrolled,
    /// Hillis-Steele parallel prefix over lanes.
    Lanes,
}

/// Word-search kernel slot for select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchKernel {
    Loop,
    Lanes,
}

/// Select-in-word kernel slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InWordKernel {
    /// Parallel bit deposit followed by trailing-zero count.
    Pdep,
    /// Byte location by multiply-accumulate, then table lookup in the byte.
    BroadwordSdsl,
    /// Byte location by popcount of a comparison mask, then table lookup.
    BroadwordSuccinct,
}

macro_rules! named_enum {
    ($ty:ident, $kind:literal, { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $($ty::$variant => $name),+
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self, Error> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    _ => Err(Error::UnknownName { kind: $kind, name: s.to_string() }),
                }
            }
        }
    };
}
pub(crate) use named_enum;

named_enum!(PopcountKernel, "popcount kernel", {
    Builtin => "builtin",
    Broadword => "broadword",
    Vector => "vector",
});
named_enum!(PrefixKernel, "prefix-sum kernel", {
    Loop => "loop",
    Unrolled => "unrolled",
    Lanes => "lanes",
});
named_enum!(SearchKernel, "search kernel", {
    Loop => "loop",
    Lanes => "lanes",
});
named_enum!(InWordKernel, "select-in-word kernel", {
    Pdep => "pdep",
    BroadwordSdsl => "bw-sdsl",
    BroadwordSuccinct => "bw-succinct",
});

// ---------------------------------------------------------------------------
// popcount

#[inline(always)]
pub fn popcount_builtin(w: u64) -> u32 {
    w.count_ones()
}

/// Per-byte popcounts: byte `j` of the result holds the number of ones in
/// byte `j` of `w`.
#[inline(always)]
fn byte_counts(w: u64) -> u64 {
    let mut s = w - ((w & (0xA * 0x1111_1111_1111_1111)) >> 1);
    s = (s & (0x3 * 0x1111_1111_1111_1111)) + ((s >> 2) & (0x3 * 0x1111_1111_1111_1111));
    (s + (s >> 4)) & (0xF * ONES_STEP_8)
}

#[inline(always)]
pub fn popcount_broadword(w: u64) -> u32 {
    (byte_counts(w).wrapping_mul(ONES_STEP_8) >> 56) as u32
}

const NIBBLE_POPCOUNT: [u8; 16] = [0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4];

/// Nibble-lookup popcount of one word: each byte is split into its two
/// nibbles, both looked up in a 16-entry table, and the byte sums are then
/// added horizontally.
#[inline(always)]
pub fn popcount_nibble(w: u64) -> u32 {
    let bytes = w.to_le_bytes();
    let mut total = 0u32;
    for b in bytes {
        total += (NIBBLE_POPCOUNT[(b & 0x0F) as usize] + NIBBLE_POPCOUNT[(b >> 4) as usize]) as u32;
    }
    total
}

/// Vector-slot popcount: fills the whole counter array in one pass.
#[inline(always)]
pub fn popcount_vector<const N: usize>(words: &[u64; N]) -> [u32; N] {
    let mut out = [0u32; N];
    for (c, &w) in out.iter_mut().zip(words.iter()) {
        *c = popcount_nibble(w);
    }
    out
}

#[inline(always)]
pub fn popcount_with(kernel: PopcountKernel, w: u64) -> u32 {
    match kernel {
        PopcountKernel::Builtin => popcount_builtin(w),
        PopcountKernel::Broadword => popcount_broadword(w),
        PopcountKernel::Vector => popcount_nibble(w),
    }
}

/// Number of set bits in `w`.
#[inline(always)]
pub fn popcount_word(w: u64) -> u32 {
    popcount_builtin(w)
}

/// Keeps only the `keep` least significant bits of `w`, `keep` in `1..=64`.
///
/// Callers pass `keep = (i % 64) + 1` to retain positions `0..=i` of a word.
#[inline(always)]
pub fn mask_low(w: u64, keep: u32) -> u64 {
    debug_assert!((1..=64).contains(&keep), "mask_low: keep={keep} outside 1..=64");
    w & (u64::MAX >> (64 - keep))
}

// ---------------------------------------------------------------------------
// select in word

/// `SELECT_IN_BYTE[r * 256 + b]` is the position of the `(r+1)`-th one in byte
/// `b` (8 when it does not exist).
static SELECT_IN_BYTE: [u8; 2048] = build_select_in_byte();

const fn build_select_in_byte() -> [u8; 2048] {
    let mut table = [8u8; 2048];
    let mut b = 0;
    while b < 256 {
        let mut seen = 0;
        let mut pos = 0;
        while pos < 8 {
            if b & (1 << pos) != 0 {
                table[seen * 256 + b] = pos as u8;
                seen += 1;
            }
            pos += 1;
        }
        b += 1;
    }
    table
}

/// Software parallel bit deposit: scatters the low bits of `src` to the
/// positions of the set bits of `mask`.
#[inline]
pub fn pdep_portable(src: u64, mut mask: u64) -> u64 {
    let mut out = 0u64;
    let mut bit = 1u64;
    while mask != 0 {
        let lowest = mask & mask.wrapping_neg();
        if src & bit != 0 {
            out |= lowest;
        }
        mask ^= lowest;
        bit <<= 1;
    }
    out
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "bmi2")]
unsafe fn select_pdep_bmi2(w: u64, k: u32) -> u32 {
    std::arch::x86_64::_pdep_u64(1u64 << k, w).trailing_zeros()
}

#[inline(always)]
fn has_bmi2() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("bmi2")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

/// pdep slot using the hardware instruction when the CPU has it.
#[inline(always)]
pub fn select_pdep(w: u64, k: u32) -> u32 {
    debug_assert!(k < w.count_ones());
    #[cfg(target_arch = "x86_64")]
    if has_bmi2() {
        // SAFETY: the bmi2 feature was detected at runtime.
        return unsafe { select_pdep_bmi2(w, k) };
    }
    pdep_portable(1u64 << k, w).trailing_zeros()
}

/// pdep slot forced onto the portable deposit.
#[inline]
pub fn select_pdep_portable(w: u64, k: u32) -> u32 {
    pdep_portable(1u64 << k, w).trailing_zeros()
}

/// Byte-locating select: cumulative byte counts by multiplication, the
/// target byte from a multiply-accumulate of the `<= k` comparison flags.
#[inline(always)]
pub fn select_bw_sdsl(w: u64, k: u32) -> u32 {
    debug_assert!(k < w.count_ones());
    let cumulative = byte_counts(w).wrapping_mul(ONES_STEP_8);
    let k = k as u64;
    let le_k = (((k * ONES_STEP_8) | MSBS_STEP_8) - cumulative) & MSBS_STEP_8;
    // flags sit in bit 7 of each byte; summing them gives the byte index
    let place = (((le_k >> 7).wrapping_mul(ONES_STEP_8) >> 53) & !0x7) as u32;
    let before = ((cumulative << 8) >> place) & 0xFF;
    let byte = (w >> place) & 0xFF;
    place + SELECT_IN_BYTE[((k - before) << 8 | byte) as usize] as u32
}

/// Byte-locating select: target byte from the popcount of the comparison
/// mask over cumulative byte counts.
#[inline(always)]
pub fn select_bw_succinct(w: u64, k: u32) -> u32 {
    debug_assert!(k < w.count_ones());
    let byte_sums = byte_counts(w).wrapping_mul(ONES_STEP_8);
    let k_step_8 = k as u64 * ONES_STEP_8;
    let geq_k_step_8 = ((k_step_8 | MSBS_STEP_8) - byte_sums) & MSBS_STEP_8;
    let place = geq_k_step_8.count_ones() * 8;
    let byte_rank = k as u64 - (((byte_sums << 8) >> place) & 0xFF);
    place + SELECT_IN_BYTE[(((w >> place) & 0xFF) | (byte_rank << 8)) as usize] as u32
}

#[inline(always)]
pub fn select_in_word_with(kernel: InWordKernel, w: u64, k: u32) -> u32 {
    match kernel {
        InWordKernel::Pdep => select_pdep(w, k),
        InWordKernel::BroadwordSdsl => select_bw_sdsl(w, k),
        InWordKernel::BroadwordSuccinct => select_bw_succinct(w, k),
    }
}

/// Position of the `(k+1)`-th set bit of `w`. Requires `k < popcount(w)`.
#[inline(always)]
pub fn select_in_word(w: u64, k: u32) -> u32 {
    select_pdep(w, k)
}

// ---------------------------------------------------------------------------
// prefix sums over counters

#[inline(always)]
pub fn prefix_sum_loop<const N: usize>(c: &[u32; N]) -> [u32; N] {
    let mut out = [0u32; N];
    let mut acc = 0;
    for k in 0..N {
        acc += c[k];
        out[k] = acc;
    }
    out
}

#[inline(always)]
pub fn prefix_sum_unrolled<const N: usize>(c: &[u32; N]) -> [u32; N] {
    let mut out = *c;
    for k in 1..N {
        out[k] += out[k - 1];
    }
    out
}

/// Hillis-Steele: `log2(N)` steps, each adding a copy of the lanes shifted up
/// by `1, 2, 4, ...` positions.
#[inline(always)]
pub fn prefix_sum_lanes<const N: usize>(c: &[u32; N]) -> [u32; N] {
    let mut out = *c;
    let mut d = 1;
    while d < N {
        let shifted = lanes::shift_up(&out, d);
        lanes::add_assign(&mut out, &shifted);
        d <<= 1;
    }
    out
}

/// Inclusive prefix sums of `c`; every strategy returns the same array.
pub fn prefix_sum_counters<const N: usize>(c: &[u32; N], strategy: PrefixKernel) -> [u32; N] {
    match strategy {
        PrefixKernel::Loop => prefix_sum_loop(c),
        PrefixKernel::Unrolled => prefix_sum_unrolled(c),
        PrefixKernel::Lanes => prefix_sum_lanes(c),
    }
}

/// Smallest `j` with `c[j] > x` over prefix-summed counters; `x` must be
/// below the last element.
#[inline(always)]
pub fn first_exceeding_loop<const N: usize>(c: &[u32; N], x: u32) -> usize {
    debug_assert!(x < c[N - 1]);
    lanes::first_greater_scalar(c, x)
}

#[inline(always)]
pub fn first_exceeding_lanes<const N: usize>(c: &[u32; N], x: u32) -> usize {
    debug_assert!(x < c[N - 1]);
    lanes::first_greater(c, x)
}

pub fn first_exceeding<const N: usize>(c: &[u32; N], x: u32, strategy: SearchKernel) -> usize {
    match strategy {
        SearchKernel::Loop => first_exceeding_loop(c, x),
        SearchKernel::Lanes => first_exceeding_lanes(c, x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn popcount_oracle(w: u64) -> u32 {
        (0..64).filter(|&b| w >> b & 1 == 1).count() as u32
    }

    fn select_oracle(w: u64, k: u32) -> u32 {
        let mut seen = 0;
        for b in 0..64 {
            if w >> b & 1 == 1 {
                if seen == k {
                    return b;
                }
                seen += 1;
            }
        }
        unreachable!()
    }

    /// Words with a spread of densities, including sparse and dense ones.
    fn random_word(rng: &mut ChaCha8Rng) -> u64 {
        match rng.gen_range(0..4) {
            0 => rng.gen::<u64>() & rng.gen::<u64>() & rng.gen::<u64>(),
            1 => rng.gen::<u64>() | rng.gen::<u64>() | rng.gen::<u64>(),
            _ => rng.gen(),
        }
    }

    #[test]
    fn popcount_examples() {
        for kernel in PopcountKernel::ALL {
            assert_eq!(popcount_with(*kernel, 0), 0);
            assert_eq!(popcount_with(*kernel, u64::MAX), 64);
            assert_eq!(popcount_with(*kernel, 0b0110_1101), popcount_oracle(0b0110_1101));
            assert_eq!(popcount_with(*kernel, 0b0110_1101), 5);
        }
    }

    #[test]
    fn popcount_backends_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1_000_000 {
            let w = random_word(&mut rng);
            let expected = popcount_builtin(w);
            assert_eq!(popcount_broadword(w), expected, "{w:#x}");
            assert_eq!(popcount_nibble(w), expected, "{w:#x}");
        }
    }

    #[test]
    fn mask_low_examples() {
        assert_eq!(mask_low(u64::MAX, 1), 1);
        assert_eq!(mask_low(u64::MAX, 64), u64::MAX);
        assert_eq!(mask_low(0xFF, 4), 0x0F);
    }

    #[test]
    #[should_panic]
    fn mask_low_rejects_zero() {
        mask_low(1, 0);
    }

    #[test]
    fn select_examples() {
        for kernel in InWordKernel::ALL {
            assert_eq!(select_in_word_with(*kernel, 1, 0), 0);
            assert_eq!(select_in_word_with(*kernel, 0b1010, 1), select_oracle(0b1010, 1));
            assert_eq!(select_in_word_with(*kernel, 0b1010, 1), 3);
            assert_eq!(select_in_word_with(*kernel, u64::MAX, 63), 63);
            assert_eq!(select_in_word_with(*kernel, 1 << 63, 0), 63);
        }
    }

    #[test]
    fn select_backends_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let w = random_word(&mut rng);
            for k in 0..w.count_ones() {
                let expected = select_pdep_portable(w, k);
                assert_eq!(select_pdep(w, k), expected, "{w:#x} k={k}");
                assert_eq!(select_bw_sdsl(w, k), expected, "{w:#x} k={k}");
                assert_eq!(select_bw_succinct(w, k), expected, "{w:#x} k={k}");
            }
        }
    }

    #[test]
    fn portable_pdep_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2_000 {
            let w = random_word(&mut rng);
            for k in 0..w.count_ones() {
                assert_eq!(select_pdep_portable(w, k), select_oracle(w, k));
            }
        }
    }

    #[test]
    fn prefix_sum_examples() {
        for s in PrefixKernel::ALL {
            assert_eq!(prefix_sum_counters(&[0, 0, 0, 0], *s), [0, 0, 0, 0]);
            assert_eq!(prefix_sum_counters(&[64, 64, 64, 64], *s), [64, 128, 192, 256]);
            assert_eq!(prefix_sum_counters(&[5, 0, 17, 2], *s), [5, 5, 22, 24]);
            assert_eq!(prefix_sum_counters(&[9], *s), [9]);
        }
    }

    fn running_sum<const N: usize>(c: &[u32; N]) -> [u32; N] {
        let mut out = [0; N];
        let mut acc = 0;
        for (o, v) in out.iter_mut().zip(c) {
            acc += v;
            *o = acc;
        }
        out
    }

    #[test]
    fn prefix_strategies_agree_on_grid() {
        // 16^4 = 2^16 arrays: each entry walks 16 values spanning [0, 64].
        let grid: Vec<u32> = (0..16).map(|v| (v * 64 + 7) / 15).collect();
        assert_eq!(grid[0], 0);
        assert_eq!(grid[15], 64);
        for a in &grid {
            for b in &grid {
                for c in &grid {
                    for d in &grid {
                        let arr = [*a, *b, *c, *d];
                        let expected = running_sum(&arr);
                        for s in PrefixKernel::ALL {
                            assert_eq!(prefix_sum_counters(&arr, *s), expected);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn prefix_strategies_agree_on_random_arrays() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100_000 {
            let four: [u32; 4] = std::array::from_fn(|_| rng.gen_range(0..=64));
            let eight: [u32; 8] = std::array::from_fn(|_| rng.gen_range(0..=64));
            for s in PrefixKernel::ALL {
                assert_eq!(prefix_sum_counters(&four, *s), running_sum(&four));
                assert_eq!(prefix_sum_counters(&eight, *s), running_sum(&eight));
            }
        }
    }

    #[test]
    fn first_exceeding_examples() {
        let c = [5, 5, 22, 24];
        for s in SearchKernel::ALL {
            assert_eq!(first_exceeding(&c, 0, *s), 0);
            assert_eq!(first_exceeding(&c, 5, *s), 2);
            assert_eq!(first_exceeding(&c, 23, *s), 3);
        }
    }

    #[test]
    fn kernel_names_round_trip() {
        for k in PopcountKernel::ALL {
            assert_eq!(k.name().parse::<PopcountKernel>().unwrap(), *k);
        }
        for k in InWordKernel::ALL {
            assert_eq!(k.name().parse::<InWordKernel>().unwrap(), *k);
        }
        assert!("avx".parse::<PrefixKernel>().is_err());
        assert_eq!("bw-sdsl".parse::<InWordKernel>().unwrap(), InWordKernel::BroadwordSdsl);
    }

    proptest! {
        #[test]
        fn select_then_rank_in_word(w in any::<u64>().prop_filter("nonzero", |w| *w != 0), k_seed in any::<u32>()) {
            let k = k_seed % w.count_ones();
            for kernel in InWordKernel::ALL {
                let p = select_in_word_with(*kernel, w, k);
                prop_assert_eq!(popcount_word(mask_low(w, p + 1)), k + 1);
                prop_assert!(w >> p & 1 == 1);
            }
        }
    }
}
