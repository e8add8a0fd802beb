//! Binary bitmap files.
//!
//! All integers are little-endian.
//!
//! | offset | size | field                                             |
//! |--------|------|---------------------------------------------------|
//! | 0      | 4    | magic `"MRSB"`                                     |
//! | 4      | 2    | version (`1`)                                      |
//! | 6      | 8    | `u`, the number of bits                            |
//! | 14     | 2    | `B`, the block size in bits                        |
//! | 16     | 4    | reserved: index, rank, select, select-in-word code |
//! | 20     | 8·⌈u/64⌉ | the words; bit `i` is bit `i % 64` of word `i / 64` |
//!
//! The four reserved bytes carry the configuration: byte 16 is the index
//! (`0` scalar, `1` narrow, `2` wide, `3` fenwick); byte 17 the rank strategy
//! as `popcount << 4 | prefix`; byte 18 the select strategy as
//! `popcount << 4 | search`; byte 19 the select-in-word kernel. Kernel codes
//! follow the declaration order of the kernel enums. Only the raw words are
//! stored; the index is rebuilt on load.

use std::io::{Read, Write};

use crate::bitmap::{BitmapConfig, IndexKind, MutableBitmap};
use crate::block_ops::{
    BlockBits, InWordKernel, KernelConfig, PopcountKernel, PrefixKernel, RankStrategy, SearchKernel, SelectStrategy,
};
use crate::{Error, Result};

pub const MAGIC: [u8; 4] = *b"MRSB";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 20;

fn code_of<T: PartialEq>(all: &[T], v: &T) -> u8 {
    all.iter().position(|x| x == v).expect("variant listed in ALL") as u8
}

fn decode<T: Copy>(all: &[T], code: u8, what: &str) -> Result<T> {
    all.get(code as usize).copied().ok_or_else(|| Error::Format(format!("unknown {what} code {code}")))
}

fn config_bytes(config: &BitmapConfig, kernels: &KernelConfig) -> [u8; 4] {
    let r = &kernels.rank;
    let s = &kernels.select;
    [
        code_of(&IndexKind::ALL, &config.index),
        code_of(PopcountKernel::ALL, &r.popcount) << 4 | code_of(PrefixKernel::ALL, &r.prefix),
        code_of(PopcountKernel::ALL, &s.popcount) << 4 | code_of(SearchKernel::ALL, &s.search),
        code_of(InWordKernel::ALL, &s.in_word),
    ]
}

fn parse_config(block: BlockBits, bytes: [u8; 4]) -> Result<BitmapConfig> {
    let index = decode(&IndexKind::ALL, bytes[0], "index")?;
    let rank = RankStrategy::new(
        decode(PopcountKernel::ALL, bytes[1] >> 4, "popcount")?,
        decode(PrefixKernel::ALL, bytes[1] & 0xF, "prefix-sum")?,
    );
    let select = SelectStrategy::new(
        decode(PopcountKernel::ALL, bytes[2] >> 4, "popcount")?,
        decode(SearchKernel::ALL, bytes[2] & 0xF, "search")?,
        decode(InWordKernel::ALL, bytes[3], "select-in-word")?,
    );
    Ok(BitmapConfig { block, index, kernels: Some(KernelConfig { rank, select }) })
}

impl MutableBitmap {
    pub fn to_bytes(&self) -> Vec<u8> {
        let words = self.words();
        let mut out = Vec::with_capacity(HEADER_LEN + words.len() * 8);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.len().to_le_bytes());
        out.extend_from_slice(&(self.block().bits() as u16).to_le_bytes());
        out.extend_from_slice(&config_bytes(&self.config(), &self.kernels()));
        for w in words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!("truncated header: {} bytes", bytes.len())));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let universe = u64::from_le_bytes(bytes[6..14].try_into().unwrap());
        let block_bits = u16::from_le_bytes([bytes[14], bytes[15]]);
        let block = BlockBits::new(block_bits as u64)
            .map_err(|_| Error::Format(format!("unsupported block size {block_bits}")))?;
        let config = parse_config(block, bytes[16..20].try_into().unwrap())?;

        let body = &bytes[HEADER_LEN..];
        let expected = universe.div_ceil(64).checked_mul(8).filter(|&n| n == body.len() as u64);
        if expected.is_none() {
            return Err(Error::Format(format!("{} payload bytes for a bitmap of {universe} bits", body.len())));
        }
        let words: Vec<u64> = body.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
        MutableBitmap::from_words(&words, universe, config)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&self.to_bytes())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example() -> MutableBitmap {
        let bits: Vec<bool> = "01101101010101110".chars().map(|c| c == '1').collect();
        MutableBitmap::from_bits(&bits, BitmapConfig::default()).unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = example().to_bytes();
        assert_eq!(&bytes[0..4], b"MRSB");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(u64::from_le_bytes(bytes[6..14].try_into().unwrap()), 17);
        assert_eq!(&bytes[14..16], &256u16.to_le_bytes());
        assert_eq!(bytes.len(), HEADER_LEN + 8);
        // bits 1, 2, 4, 5, 7, 9, 11, 13, 14, 15
        assert_eq!(u64::from_le_bytes(bytes[20..28].try_into().unwrap()), 0b1110_1010_1011_0110);
    }

    #[test]
    fn round_trip_example() {
        let bm = example();
        let back = MutableBitmap::from_bytes(&bm.to_bytes()).unwrap();
        assert_eq!(back.config(), bm.config());
        for i in 0..17 {
            assert_eq!(back.rank(i), bm.rank(i));
            assert_eq!(back.access(i), bm.access(i));
        }
        for k in 0..10 {
            assert_eq!(back.select(k), bm.select(k));
        }
    }

    #[test]
    fn round_trip_empty() {
        let bm = MutableBitmap::new(1000, BitmapConfig::new(BlockBits::B64, IndexKind::Fenwick)).unwrap();
        let back = MutableBitmap::from_bytes(&bm.to_bytes()).unwrap();
        assert_eq!(back.ones(), 0);
        assert_eq!(back.index_kind(), IndexKind::Fenwick);
    }

    #[test]
    fn corrupt_inputs() {
        let good = example().to_bytes();
        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(matches!(MutableBitmap::from_bytes(&bad_magic), Err(Error::Format(_))));
        let mut bad_version = good.clone();
        bad_version[4] = 9;
        assert!(matches!(MutableBitmap::from_bytes(&bad_version), Err(Error::Format(_))));
        assert!(matches!(MutableBitmap::from_bytes(&good[..good.len() - 1]), Err(Error::Format(_))));
        assert!(matches!(MutableBitmap::from_bytes(&good[..10]), Err(Error::Format(_))));
        let mut bad_block = good.clone();
        bad_block[14..16].copy_from_slice(&128u16.to_le_bytes());
        assert!(matches!(MutableBitmap::from_bytes(&bad_block), Err(Error::Format(_))));
        let mut bad_index = good.clone();
        bad_index[16] = 7;
        assert!(matches!(MutableBitmap::from_bytes(&bad_index), Err(Error::Format(_))));
        let mut padding = good.clone();
        padding[27] = 0x80;
        assert!(matches!(MutableBitmap::from_bytes(&padding), Err(Error::Format(_))));
        let mut extra = good;
        extra.push(0);
        assert!(matches!(MutableBitmap::from_bytes(&extra), Err(Error::Format(_))));
    }

    proptest! {
        #[test]
        fn round_trip_preserves_words(
            bits in proptest::collection::vec(any::<bool>(), 1..3000),
            block in prop::sample::select(BlockBits::ALL.to_vec()),
            index in prop::sample::select(IndexKind::ALL.to_vec()),
        ) {
            let bm = MutableBitmap::from_bits(&bits, BitmapConfig::new(block, index)).unwrap();
            let back = MutableBitmap::from_bytes(&bm.to_bytes()).unwrap();
            prop_assert_eq!(back.words(), bm.words());
            prop_assert_eq!(back.config(), bm.config());
            prop_assert_eq!(back.ones(), bm.ones());
        }
    }
}
