//! Brute-force references. Single-bit reads only, no word tricks, so they stay
//! independent of the optimized paths they are used to check.

use crate::bitmat::BitMatrix;
use crate::error::{Error, Result};
use crate::graph::{SubInstance, TripartiteGraph, Triangle, Verdict};

/// Scalar triple loop over the view; returns the lexicographically first triangle.
pub fn brute_triangle(sub: &SubInstance<'_>) -> Verdict {
    let g = sub.graph();
    for &a in sub.ia() {
        for &b in sub.ib() {
            if !g.ab().get(a, b) {
                continue;
            }
            for &c in sub.ic() {
                if g.ac().get(a, c) && g.bc().get(b, c) {
                    return Verdict::Found(Triangle::new(a, b, c));
                }
            }
        }
    }
    Verdict::TriangleFree
}

/// [`brute_triangle`] over the whole graph.
pub fn brute_triangle_graph(g: &TripartiteGraph) -> Verdict {
    for a in 0..g.n_a() {
        for b in 0..g.n_b() {
            for c in 0..g.n_c() {
                if g.ab().get(a, b) && g.ac().get(a, c) && g.bc().get(b, c) {
                    return Verdict::Found(Triangle::new(a, b, c));
                }
            }
        }
    }
    Verdict::TriangleFree
}

/// Textbook Boolean product: `out[i][j] = OR_k a[i][k] AND b[k][j]`.
pub fn multiply_scalar_oracle(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut out = BitMatrix::new(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut acc = false;
            for k in 0..a.cols() {
                acc |= a.get(i, k) & b.get(k, j);
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PartPair;

    #[test]
    fn triangle_cases() {
        let single = TripartiteGraph::from_edge_list(
            1,
            1,
            1,
            &[(PartPair::AB, 0, 0), (PartPair::AC, 0, 0), (PartPair::BC, 0, 0)],
        )
        .unwrap();
        assert_eq!(
            brute_triangle(&single.full_view()),
            Verdict::Found(Triangle::new(0, 0, 0))
        );
        let empty = TripartiteGraph::empty(3, 3, 3);
        assert_eq!(brute_triangle_graph(&empty), Verdict::TriangleFree);

        let complete = TripartiteGraph::from_matrices(
            BitMatrix::ones(5, 5),
            BitMatrix::ones(5, 5),
            BitMatrix::ones(5, 5),
        )
        .unwrap();
        assert_eq!(
            brute_triangle(&complete.full_view()),
            Verdict::Found(Triangle::new(0, 0, 0))
        );
        let view = complete.view(vec![2, 4], vec![3], vec![1, 4]).unwrap();
        assert_eq!(brute_triangle(&view), Verdict::Found(Triangle::new(2, 3, 1)));
    }

    #[test]
    fn product_cases() {
        let m = BitMatrix::from_fn(6, 6, |i, j| (i + 2 * j) % 5 == 1);
        assert_eq!(multiply_scalar_oracle(&BitMatrix::identity(6), &m).unwrap(), m);
        assert_eq!(
            multiply_scalar_oracle(&BitMatrix::new(6, 6), &m).unwrap(),
            BitMatrix::new(6, 6)
        );
        let one = BitMatrix::ones(1, 1);
        let zero = BitMatrix::new(1, 1);
        assert_eq!(multiply_scalar_oracle(&one, &one).unwrap(), one);
        assert_eq!(multiply_scalar_oracle(&one, &zero).unwrap(), zero);
        assert!(multiply_scalar_oracle(&BitMatrix::new(2, 3), &BitMatrix::new(2, 3)).is_err());
    }
}
