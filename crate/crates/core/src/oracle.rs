//! Brute-force reference structures for differential testing.
//!
//! Everything here is a literal linear scan over plain arrays; nothing
//! shares code with the indexed structures it checks.

use crate::prefix_index::{SearchablePrefixSum, Sign};
use crate::{Error, Result};

/// Bitmap as a plain boolean array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveBitmap {
    bits: Vec<bool>,
}

impl NaiveBitmap {
    pub fn new(len: usize) -> Self {
        NaiveBitmap { bits: vec![false; len] }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        NaiveBitmap { bits: bits.to_vec() }
    }

    /// Parses a string of `0`/`1` characters, position 0 first.
    pub fn parse(s: &str) -> Self {
        NaiveBitmap { bits: s.chars().map(|c| c == '1').collect() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn ones(&self) -> u64 {
        self.bits.iter().filter(|&&b| b).count() as u64
    }

    fn check(&self, i: u64) -> Result<usize> {
        if i >= self.bits.len() as u64 {
            return Err(Error::OutOfRange { index: i, len: self.bits.len() as u64 });
        }
        Ok(i as usize)
    }

    pub fn access(&self, i: u64) -> Result<bool> {
        Ok(self.bits[self.check(i)?])
    }

    pub fn flip(&mut self, i: u64) -> Result<()> {
        let i = self.check(i)?;
        self.bits[i] = !self.bits[i];
        Ok(())
    }

    /// Number of ones in positions `0..=i`.
    pub fn rank(&self, i: u64) -> Result<u64> {
        let i = self.check(i)?;
        Ok(self.bits[..=i].iter().filter(|&&b| b).count() as u64)
    }

    /// Position of the `(k+1)`-th one.
    pub fn select(&self, k: u64) -> Result<u64> {
        // counts whole chunks first so large universes stay tractable
        const CHUNK: usize = 256;
        let mut seen = 0u64;
        for (c, chunk) in self.bits.chunks(CHUNK).enumerate() {
            let ones = chunk.iter().filter(|&&b| b).count() as u64;
            if seen + ones > k {
                for (off, &b) in chunk.iter().enumerate() {
                    if b {
                        if seen == k {
                            return Ok((c * CHUNK + off) as u64);
                        }
                        seen += 1;
                    }
                }
            }
            seen += ones;
        }
        Err(Error::SelectOutOfRange { k, ones: seen })
    }
}

/// Prefix sums by linear scan over the raw counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaivePrefixSums {
    counts: Vec<u64>,
}

impl NaivePrefixSums {
    pub fn new(counts: &[u32]) -> Self {
        NaivePrefixSums { counts: counts.iter().map(|&c| c as u64).collect() }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

impl SearchablePrefixSum for NaivePrefixSums {
    fn len(&self) -> usize {
        self.counts.len()
    }

    fn sum(&self, i: usize) -> u64 {
        self.counts[..=i].iter().sum()
    }

    fn update(&mut self, i: usize, sign: Sign) {
        self.counts[i] = self.counts[i].checked_add_signed(sign.delta()).expect("count below zero");
    }

    fn search(&self, x: u64) -> (usize, u64) {
        let mut before = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if before + c > x {
                return (i, before);
            }
            before += c;
        }
        panic!("search({x}) past the total {before}");
    }

    fn space_bytes(&self) -> usize {
        self.counts.len() * 8
    }
}
