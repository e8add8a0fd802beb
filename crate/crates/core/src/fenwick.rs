//! Classic Fenwick tree over 64-bit partial sums, used as the baseline
//! searchable prefix-sum structure.
//!
//! `tree[k]` (1-based) holds `A[k - lowbit(k) .. k]`. Search descends by
//! decreasing powers of two.

use crate::prefix_index::{SearchablePrefixSum, Sign, MAX_LEN};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FenwickTree {
    tree: Vec<u64>,
    /// Highest power of two not above `len`.
    top: usize,
}

#[inline(always)]
fn lowbit(k: usize) -> usize {
    k & k.wrapping_neg()
}

impl FenwickTree {
    pub fn build(counts: &[u32]) -> Result<Self> {
        if counts.is_empty() || counts.len() > MAX_LEN {
            return Err(Error::Capacity { requested: counts.len() as u64, limit: MAX_LEN as u64 });
        }
        let n = counts.len();
        let mut tree = Vec::with_capacity(n + 1);
        tree.push(0);
        tree.extend(counts.iter().map(|&c| c as u64));
        for k in 1..=n {
            let parent = k + lowbit(k);
            if parent <= n {
                tree[parent] += tree[k];
            }
        }
        let top = 1usize << (usize::BITS - 1 - n.leading_zeros());
        Ok(FenwickTree { tree, top })
    }

    /// Recovers the original counts.
    pub fn counts(&self) -> Vec<u64> {
        (0..self.len()).map(|i| if i == 0 { self.sum(0) } else { self.sum(i) - self.sum(i - 1) }).collect()
    }
}

impl SearchablePrefixSum for FenwickTree {
    fn len(&self) -> usize {
        self.tree.len() - 1
    }

    fn sum(&self, i: usize) -> u64 {
        assert!(i < self.len(), "sum({i}) outside a tree of {} counts", self.len());
        let mut k = i + 1;
        let mut acc = 0;
        while k > 0 {
            acc += self.tree[k];
            k -= lowbit(k);
        }
        acc
    }

    fn update(&mut self, i: usize, sign: Sign) {
        assert!(i < self.len(), "update({i}) outside a tree of {} counts", self.len());
        let n = self.len();
        let mut k = i + 1;
        while k <= n {
            self.tree[k] = self.tree[k].wrapping_add_signed(sign.delta());
            k += lowbit(k);
        }
    }

    fn search(&self, x: u64) -> (usize, u64) {
        let n = self.len();
        let mut pos = 0;
        let mut remaining = x;
        let mut step = self.top;
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= remaining {
                pos = next;
                remaining -= self.tree[next];
            }
            step >>= 1;
        }
        assert!(pos < n, "search({x}) past the total");
        (pos, x - remaining)
    }

    fn space_bytes(&self) -> usize {
        self.tree.len() * std::mem::size_of::<u64>()
    }
}
