//! Fixed-height trees of nodes.
//!
//! A tree is a type-level chain `Internal<Root, Internal<.., Leaf<N>>>`, so
//! every height gets its own fully unrolled code path with no loop over
//! levels. Nodes are stored level by level: the child at `slot` of node `p`
//! is node `p * FANOUT + slot` of the level below.

use super::node::{NodeType, Sign};

pub trait Levels: Clone + Send + Sync + 'static {
    /// Number of counts covered by one node of the top level.
    const CAPACITY: usize;
    const HEIGHT: usize;

    fn build(counts: &[u32]) -> Self;
    /// Totals of the nodes of the top level.
    fn node_totals(&self) -> Vec<u64>;
    fn sum(&self, i: usize) -> u64;
    fn update<const LANES: bool>(&mut self, i: usize, sign: Sign);
    fn search<const LANES: bool>(&self, node: usize, x: u64) -> (usize, u64);
    fn space_bytes(&self) -> usize;
    /// `(node type, node count, bytes per node)` from the top level down.
    fn level_shape(&self, out: &mut Vec<(&'static str, usize, usize)>);
    fn check(&self) -> Result<(), String>;
}

#[derive(Debug, Clone)]
pub struct Leaf<N> {
    nodes: Vec<N>,
}

#[derive(Debug, Clone)]
pub struct Internal<N, Sub> {
    nodes: Vec<N>,
    sub: Sub,
}

impl<N: NodeType> Levels for Leaf<N> {
    const CAPACITY: usize = N::FANOUT;
    const HEIGHT: usize = 1;

    fn build(counts: &[u32]) -> Self {
        Leaf { nodes: counts.chunks(N::FANOUT).map(N::build).collect() }
    }

    fn node_totals(&self) -> Vec<u64> {
        self.nodes.iter().map(N::total).collect()
    }

    #[inline(always)]
    fn sum(&self, i: usize) -> u64 {
        self.nodes[i / N::FANOUT].sum(i % N::FANOUT)
    }

    #[inline(always)]
    fn update<const LANES: bool>(&mut self, i: usize, sign: Sign) {
        self.nodes[i / N::FANOUT].update::<LANES>(i % N::FANOUT, sign);
    }

    #[inline(always)]
    fn search<const LANES: bool>(&self, node: usize, x: u64) -> (usize, u64) {
        let (slot, before) = self.nodes[node].search::<LANES>(x);
        (node * N::FANOUT + slot, before)
    }

    fn space_bytes(&self) -> usize {
        self.nodes.len() * N::BYTES
    }

    fn level_shape(&self, out: &mut Vec<(&'static str, usize, usize)>) {
        out.push((N::NAME, self.nodes.len(), N::BYTES));
    }

    fn check(&self) -> Result<(), String> {
        self.nodes.iter().try_for_each(N::check)
    }
}

impl<N: NodeType, Sub: Levels> Levels for Internal<N, Sub> {
    const CAPACITY: usize = N::FANOUT * Sub::CAPACITY;
    const HEIGHT: usize = Sub::HEIGHT + 1;

    fn build(counts: &[u32]) -> Self {
        let sub = Sub::build(counts);
        let totals: Vec<u32> =
            sub.node_totals().into_iter().map(|t| u32::try_from(t).expect("subtree total exceeds 32 bits")).collect();
        let nodes = totals.chunks(N::FANOUT).map(N::build).collect();
        Internal { nodes, sub }
    }

    fn node_totals(&self) -> Vec<u64> {
        self.nodes.iter().map(N::total).collect()
    }

    #[inline(always)]
    fn sum(&self, i: usize) -> u64 {
        let slot = (i / Sub::CAPACITY) % N::FANOUT;
        self.nodes[i / Self::CAPACITY].sum_before(slot) + self.sub.sum(i)
    }

    #[inline(always)]
    fn update<const LANES: bool>(&mut self, i: usize, sign: Sign) {
        let slot = (i / Sub::CAPACITY) % N::FANOUT;
        self.nodes[i / Self::CAPACITY].update::<LANES>(slot, sign);
        self.sub.update::<LANES>(i, sign);
    }

    #[inline(always)]
    fn search<const LANES: bool>(&self, node: usize, x: u64) -> (usize, u64) {
        let (slot, before) = self.nodes[node].search::<LANES>(x);
        let (i, rest) = self.sub.search::<LANES>(node * N::FANOUT + slot, x - before);
        (i, before + rest)
    }

    fn space_bytes(&self) -> usize {
        self.nodes.len() * N::BYTES + self.sub.space_bytes()
    }

    fn level_shape(&self, out: &mut Vec<(&'static str, usize, usize)>) {
        out.push((N::NAME, self.nodes.len(), N::BYTES));
        self.sub.level_shape(out);
    }

    fn check(&self) -> Result<(), String> {
        self.nodes.iter().try_for_each(N::check)?;
        let totals = self.sub.node_totals();
        for (c, t) in totals.iter().enumerate() {
            let node = &self.nodes[c / N::FANOUT];
            let slot = c % N::FANOUT;
            let stored = node.sum(slot) - node.sum_before(slot);
            if stored != *t {
                return Err(format!("{}: child {c} stores {stored}, subtree holds {t}", N::NAME));
            }
        }
        self.sub.check()
    }
}
