//! Combinatorial triangle detection and Boolean matrix multiplication.
//!
//! * [`bitmat`]: bit-packed Boolean matrices and the word-parallel product.
//! * [`graph`]: tripartite graphs and index-list views over them.
//! * [`fourruss`]: the degree-bounded sparse detector backed by a subset-pair table.
//! * [`detector`]: the recursive high-degree divide-and-conquer detector.
//! * [`framework`]: detection driven by a pluggable easy-part finder.
//! * [`reduction`]: Boolean products computed through triangle detection, and back.
//! * [`oracle`]: brute-force references.

pub mod bitmat;
pub mod cli;
pub mod detector;
pub mod error;
pub mod fourruss;
pub mod framework;
pub mod graph;
pub mod oracle;
pub mod random;
pub mod reduction;

pub use bitmat::BitMatrix;
pub use detector::{detect, DetectorConfig};
pub use error::{Error, Result};
pub use fourruss::{PairTable, SparseParams};
pub use framework::{detect_with_finder, EasyPart, EasyPartFinder, FrameworkConfig};
pub use graph::{Part, PartPair, RunStats, SubInstance, TripartiteGraph, Triangle, Verdict};
pub use reduction::{bmm_via_triangle, triangle_via_bmm, BlockSpec, TriangleDetector};
