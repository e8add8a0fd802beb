//! Rank, select and flip over a mutable bitmap.
//!
//! The bitmap is split into blocks of `B ∈ {64, 256, 512}` bits. A searchable
//! prefix-sum structure ([`prefix_index::PrefixIndex`], a flat b-ary segment
//! tree of two-level nodes) keeps the number of ones in every block, and a
//! family of in-block kernels ([`block_ops`]) finishes each query inside a
//! single block without any auxiliary space:
//!
//! * `rank(i)` = `index.sum(i / B - 1)` + in-block rank,
//! * `select(k)`: `(j, before) = index.search(k)`, then in-block select of
//!   `k - before` in block `j`,
//! * `flip(i)` toggles the bit and applies a `±1` update on block `i / B`.
//!
//! Rank is **inclusive**: `rank(i)` counts the ones among positions `0..=i`.
//! Select is 0-based: `select(k)` is the position of the `(k+1)`-th one, so
//! `rank(select(k)) == k + 1`.
//!
//! ```
//! use mutable_rank_select::{BitmapConfig, MutableBitmap};
//!
//! let bits: Vec<bool> = "01101101010101110".chars().map(|c| c == '1').collect();
//! let mut bm = MutableBitmap::from_bits(&bits, BitmapConfig::default()).unwrap();
//! assert_eq!(bm.rank(7).unwrap(), 5);
//! assert_eq!(bm.select(7).unwrap(), 13);
//! bm.flip(3).unwrap();
//! bm.flip(6).unwrap();
//! assert_eq!(bm.rank(7).unwrap(), 7);
//! assert_eq!(bm.select(7).unwrap(), 9);
//! ```

pub mod bench;
pub mod bitmap;
pub mod block_ops;
mod error;
pub mod fenwick;
pub mod format;
pub mod lanes;
pub mod oracle;
pub mod prefix_index;
pub mod word_ops;

pub use bitmap::{BitmapConfig, IndexKind, MutableBitmap, SpaceReport};
pub use block_ops::{
    BlockBits, InWordKernel, KernelConfig, PopcountKernel, PrefixKernel, RankStrategy, SearchKernel, SelectStrategy,
};
pub use error::{Error, Result};
pub use fenwick::FenwickTree;
pub use prefix_index::{IndexConfig, PrefixIndex, SearchablePrefixSum, Sign};
