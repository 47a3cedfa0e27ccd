//! Seeded instance generator with a fixed, platform-independent stream.
//!
//! The source is ChaCha8 keyed by `seed_from_u64(seed)`. Every decision draws
//! exactly one `u64`:
//! * `below(n)` is `x % n`;
//! * `bernoulli(p)` is `x < floor(p * 2^64)`, always true for `p >= 1` and
//!   always false for `p <= 0`.
//!
//! Graphs draw AB, then AC, then BC, each row-major. Matrices draw row-major.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitmat::BitMatrix;
use crate::graph::{PartPair, TripartiteGraph};

#[derive(Debug, Clone)]
pub struct InstanceRng(ChaCha8Rng);

impl InstanceRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform-ish value in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// Value in `lo..=hi`.
    pub fn between(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        let x = self.next_u64();
        if p >= 1.0 {
            true
        } else if p <= 0.0 || p.is_nan() {
            false
        } else {
            x < (p * 18_446_744_073_709_551_616.0) as u64
        }
    }

    pub fn matrix(&mut self, rows: usize, cols: usize, p: f64) -> BitMatrix {
        BitMatrix::from_fn(rows, cols, |_, _| self.bernoulli(p))
    }

    pub fn graph(&mut self, n_a: usize, n_b: usize, n_c: usize, p: f64) -> TripartiteGraph {
        let mut g = TripartiteGraph::empty(n_a, n_b, n_c);
        for (pair, rows, cols) in [
            (PartPair::AB, n_a, n_b),
            (PartPair::AC, n_a, n_c),
            (PartPair::BC, n_b, n_c),
        ] {
            for i in 0..rows {
                for j in 0..cols {
                    if self.bernoulli(p) {
                        g.add_edge(pair, i, j).expect("in range");
                    }
                }
            }
        }
        g
    }
}
