//! Boolean matrix multiplication through triangle detection, and back.
//!
//! For every block triple `(I, K, J)` a tripartite graph is built with
//! `I-K` edges from `a`, `K-J` edges from `b` and `I-J` edges for the output
//! bits of `c[I][J]` not yet known to be 1. Each triangle `(i, k, j)` proves
//! `c[i][j] = 1`; that `I-J` edge is then deleted and the detector is asked
//! again until the block triple is triangle-free.

use crate::bitmat::{set_bits, BitMatrix};
use crate::detector::{detect, DetectorConfig};
use crate::error::{Error, Result};
use crate::fourruss::{check_degree_condition, sparse_scan, PairTable, SparseParams};
use crate::framework::{detect_with_finder, FrameworkConfig, HighDegreeFinder};
use crate::graph::{PartPair, RunStats, TripartiteGraph, Triangle, Verdict};
use crate::oracle::brute_triangle_graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpec {
    n: usize,
    t: usize,
}

impl BlockSpec {
    /// Requires `1 <= t <= n` (any `t >= 1` is accepted when `n == 0`).
    pub fn new(n: usize, t: usize) -> Result<Self> {
        if t == 0 || (n > 0 && t > n) {
            return Err(Error::InvalidParameter(format!("block side {t} must lie in 1..={n}")));
        }
        Ok(Self { n, t })
    }

    /// Block side `max(1, ceil(n^(1/3)))`.
    pub fn default_for(n: usize) -> Self {
        let mut t = 1usize;
        while t.saturating_pow(3) < n {
            t += 1;
        }
        Self { n, t: t.min(n.max(1)) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn blocks_per_side(&self) -> usize {
        self.n.div_ceil(self.t)
    }

    fn block(&self, i: usize) -> std::ops::Range<usize> {
        i * self.t..((i + 1) * self.t).min(self.n)
    }
}

/// Anything that decides triangle existence in a tripartite graph and
/// reports a witness.
pub trait TriangleDetector {
    fn detect(&self, g: &TripartiteGraph, stats: &mut RunStats) -> Result<Verdict>;
}

impl<T: TriangleDetector + ?Sized> TriangleDetector for &T {
    fn detect(&self, g: &TripartiteGraph, stats: &mut RunStats) -> Result<Verdict> {
        (**self).detect(g, stats)
    }
}

/// Scalar triple loop.
#[derive(Debug, Clone, Copy, Default)]
pub struct BruteForce;

impl TriangleDetector for BruteForce {
    fn detect(&self, g: &TripartiteGraph, stats: &mut RunStats) -> Result<Verdict> {
        stats.triples_enumerated += (g.n_a() * g.n_b() * g.n_c()) as u64;
        Ok(brute_triangle_graph(g))
    }
}

/// The recursive high-degree detector.
#[derive(Debug, Clone, Copy, Default)]
pub struct Recursive(pub DetectorConfig);

impl TriangleDetector for Recursive {
    fn detect(&self, g: &TripartiteGraph, stats: &mut RunStats) -> Result<Verdict> {
        Ok(detect(g, &self.0, stats))
    }
}

/// One sparse table scan over the whole graph, whatever the degrees. If the
/// configured delta violates the degree bound it falls back to `Δ = 1`, for
/// which the bound always holds.
#[derive(Debug, Clone, Copy, Default)]
pub struct SparseOnly(pub SparseParams);

impl TriangleDetector for SparseOnly {
    fn detect(&self, g: &TripartiteGraph, stats: &mut RunStats) -> Result<Verdict> {
        let view = g.full_view();
        let mut params = self.0.clamped_for(g.n_b(), g.n_c());
        if check_degree_condition(&view, params.delta()).is_some() {
            params = SparseParams::new(1).clamped_for(g.n_b(), g.n_c());
        }
        let table = PairTable::build(g, view.ib(), view.ic(), &params)?;
        sparse_scan(&view, &table, stats)
    }
}

/// The easy-part framework with the high-degree finder.
#[derive(Debug, Clone, Copy)]
pub struct Framework {
    pub finder: HighDegreeFinder,
    pub config: FrameworkConfig,
}

impl Framework {
    pub fn new(delta: usize) -> Self {
        Self {
            finder: HighDegreeFinder::new(SparseParams::new(delta)),
            config: FrameworkConfig::for_high_degree(delta),
        }
    }
}

impl TriangleDetector for Framework {
    fn detect(&self, g: &TripartiteGraph, stats: &mut RunStats) -> Result<Verdict> {
        detect_with_finder(g, &self.finder, &self.config, stats)
    }
}

/// Product through [`triangle_via_bmm`]; useful as a cross-check detector.
#[derive(Debug, Clone, Copy, Default)]
pub struct ViaBmm;

impl TriangleDetector for ViaBmm {
    fn detect(&self, g: &TripartiteGraph, _stats: &mut RunStats) -> Result<Verdict> {
        triangle_via_bmm(g)
    }
}

/// `c = a * b` over the Boolean semiring using only triangle detection.
pub fn bmm_via_triangle(
    a: &BitMatrix,
    b: &BitMatrix,
    spec: BlockSpec,
    detector: &dyn TriangleDetector,
    stats: &mut RunStats,
) -> Result<BitMatrix> {
    let n = spec.n();
    if a.rows() != n || a.cols() != n || b.rows() != n || b.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected two {n}x{n} matrices, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut c = BitMatrix::new(n, n);
    let blocks = spec.blocks_per_side();
    for bi in 0..blocks {
        let rows = spec.block(bi);
        for bk in 0..blocks {
            let mid = spec.block(bk);
            for bj in 0..blocks {
                let cols = spec.block(bj);
                let ab = BitMatrix::from_fn(rows.len(), mid.len(), |i, k| a.get(rows.start + i, mid.start + k));
                let bc = BitMatrix::from_fn(mid.len(), cols.len(), |k, j| b.get(mid.start + k, cols.start + j));
                let ac = BitMatrix::from_fn(rows.len(), cols.len(), |i, j| !c.get(rows.start + i, cols.start + j));
                let mut g = TripartiteGraph::from_matrices(ab, ac, bc)?;
                while let Verdict::Found(t) = detector.detect(&g, stats)? {
                    if !g.is_triangle(t) {
                        return Err(Error::BadWitness { a: t.a, b: t.b, c: t.c });
                    }
                    c.set(rows.start + t.a, cols.start + t.c, true);
                    g.remove_edge(PartPair::AC, t.a, t.c);
                }
            }
        }
    }
    Ok(c)
}

/// Triangle detection from one Boolean product: a triangle exists iff some
/// `(a, c)` has both an A-C edge and a path through B.
pub fn triangle_via_bmm(g: &TripartiteGraph) -> Result<Verdict> {
    let paths = g.ab().multiply_bitpacked(g.bc())?;
    for a in 0..g.n_a() {
        let closing: Vec<u64> = paths
            .row_words(a)
            .iter()
            .zip(g.ac().row_words(a))
            .map(|(p, e)| p & e)
            .collect();
        if let Some(&c) = set_bits(&closing).first() {
            let b = (0..g.n_b())
                .find(|&b| g.ab().get(a, b) && g.bc().get(b, c))
                .expect("product bit implies a middle vertex");
            return Ok(Verdict::Found(Triangle::new(a, b, c)));
        }
    }
    Ok(Verdict::TriangleFree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_spec_bounds() {
        assert!(BlockSpec::new(10, 0).is_err());
        assert!(BlockSpec::new(10, 11).is_err());
        assert_eq!(BlockSpec::new(10, 3).unwrap().blocks_per_side(), 4);
        assert_eq!(BlockSpec::default_for(0).t(), 1);
        assert_eq!(BlockSpec::default_for(1).t(), 1);
        assert_eq!(BlockSpec::default_for(8).t(), 2);
        assert_eq!(BlockSpec::default_for(9).t(), 3);
        assert_eq!(BlockSpec::default_for(64).t(), 4);
        assert_eq!(BlockSpec::default_for(65).t(), 5);
    }

    #[test]
    fn empty_matrices() {
        let z = BitMatrix::new(0, 0);
        let out = bmm_via_triangle(&z, &z, BlockSpec::default_for(0), &BruteForce, &mut RunStats::default()).unwrap();
        assert_eq!(out.rows(), 0);
    }

    #[test]
    fn rejects_non_square() {
        let a = BitMatrix::new(3, 4);
        let b = BitMatrix::new(4, 3);
        let err = bmm_via_triangle(&a, &b, BlockSpec::new(3, 1).unwrap(), &BruteForce, &mut RunStats::default());
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    struct Liar;

    impl TriangleDetector for Liar {
        fn detect(&self, _g: &TripartiteGraph, _stats: &mut RunStats) -> Result<Verdict> {
            Ok(Verdict::Found(Triangle::new(0, 0, 0)))
        }
    }

    #[test]
    fn bad_witness_is_reported() {
        let z = BitMatrix::new(2, 2);
        let err = bmm_via_triangle(&z, &z, BlockSpec::new(2, 1).unwrap(), &Liar, &mut RunStats::default());
        assert_eq!(err.unwrap_err(), Error::BadWitness { a: 0, b: 0, c: 0 });
    }
}
