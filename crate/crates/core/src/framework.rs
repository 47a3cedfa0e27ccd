//! Triangle detection driven by an "easy part" finder.
//!
//! A finder looks at a view `(A, B, C)` and returns a large sub-view
//! `(A', B', C')` together with a verdict for it. If that part contains a
//! triangle we are done; otherwise the driver recurses on
//! `(A, B, C \ C')`, `(A, B \ B', C')` and `(A \ A', B', C')`, which together
//! with `A' x B' x C'` cover every triple of the parent exactly once.

use crate::detector::{exhaustive_search, step4_scan};
use crate::error::{Error, Result};
use crate::fourruss::{check_degree_condition, sparse_detect, SparseParams};
use crate::graph::{difference, Part, RunStats, SubInstance, TripartiteGraph, Verdict};
use crate::oracle::brute_triangle;

/// Output of an [`EasyPartFinder`]: three index lists and a verdict for the
/// induced sub-view. `Verdict::TriangleFree` means the part is certified free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EasyPart {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub outcome: Verdict,
}

/// Finds a large sub-view whose triangle status it can decide.
///
/// Returned lists must be sorted subsets of the view's lists, and when the
/// part is triangle-free they must meet the configured fraction bounds.
/// Views handed to a finder may be arbitrarily small.
pub trait EasyPartFinder {
    fn find(&self, sub: &SubInstance<'_>, stats: &mut RunStats) -> Result<EasyPart>;
}

impl<F> EasyPartFinder for F
where
    F: Fn(&SubInstance<'_>, &mut RunStats) -> Result<EasyPart>,
{
    fn find(&self, sub: &SubInstance<'_>, stats: &mut RunStats) -> Result<EasyPart> {
        self(sub, stats)
    }
}

/// How `alpha`, `beta`, `gamma` are matched against the three parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FractionAssignment {
    /// `alpha` bounds A, `beta` bounds B, `gamma` bounds C.
    Fixed,
    /// Any one-to-one matching of the three fractions to the three parts.
    AnyPermutation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameworkConfig {
    alpha: f64,
    beta: f64,
    gamma: f64,
    pub assignment: FractionAssignment,
    /// Views with `|A||B||C|` below this are searched exhaustively.
    /// `None` means `n0^2.5` for the root's total vertex count `n0`.
    pub small_volume_threshold: Option<u128>,
    /// Re-check every triangle-free claim of the finder by brute force.
    pub debug_verify_finder: bool,
}

impl FrameworkConfig {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, f) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidParameter(format!("{name} = {f} is outside (0, 1]")));
            }
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            assignment: FractionAssignment::Fixed,
            small_volume_threshold: None,
            debug_verify_finder: false,
        })
    }

    /// Fractions matching [`HighDegreeFinder`]: `1, 1/Δ, 1/Δ²`, in any order.
    pub fn for_high_degree(delta: usize) -> Self {
        let d = delta.max(1) as f64;
        let mut cfg = Self::new(1.0, 1.0 / d, 1.0 / (d * d)).expect("fractions in range");
        cfg.assignment = FractionAssignment::AnyPermutation;
        cfg
    }

    pub fn with_assignment(mut self, assignment: FractionAssignment) -> Self {
        self.assignment = assignment;
        self
    }

    pub fn with_small_volume_threshold(mut self, threshold: u128) -> Self {
        self.small_volume_threshold = Some(threshold);
        self
    }

    pub fn with_verify_finder(mut self, on: bool) -> Self {
        self.debug_verify_finder = on;
        self
    }

    pub fn fractions(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }
}

/// `ceil(n0^2.5)`.
pub fn default_volume_threshold(n0: usize) -> u128 {
    (n0 as f64).powf(2.5).ceil() as u128
}

/// `ceil(f * n)`, at least 1 for a nonempty part.
fn required(f: f64, n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    (((f * n as f64) - 1e-9).ceil().max(1.0) as usize).min(n)
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Number of vertices to keep per part, or a description of the violated bound.
fn fraction_targets(cfg: &FrameworkConfig, parent: [usize; 3], easy: [usize; 3]) -> std::result::Result<[usize; 3], String> {
    let fr = cfg.fractions();
    let perms: &[[usize; 3]] = match cfg.assignment {
        FractionAssignment::Fixed => &PERMUTATIONS[..1],
        FractionAssignment::AnyPermutation => &PERMUTATIONS,
    };
    for perm in perms {
        let need = [0, 1, 2].map(|p| required(fr[perm[p]], parent[p]));
        if (0..3).all(|p| easy[p] >= need[p]) {
            return Ok(need);
        }
    }
    let names = ["A", "B", "C"];
    let need = [0, 1, 2].map(|p| required(fr[p], parent[p]));
    let violated = (0..3)
        .filter(|&p| easy[p] < need[p])
        .map(|p| format!("|{}'| = {} < {}", names[p], easy[p], need[p]))
        .collect::<Vec<_>>()
        .join(", ");
    Err(match cfg.assignment {
        FractionAssignment::Fixed => violated,
        FractionAssignment::AnyPermutation => format!("no assignment of fractions fits sizes {easy:?} of {parent:?} ({violated})"),
    })
}

/// Something that happened at one node of the framework recursion.
#[derive(Debug, Clone, Copy)]
pub enum FrameworkEvent<'v, 'g> {
    Node {
        sizes: [usize; 3],
    },
    Exhaustive {
        sizes: [usize; 3],
    },
    /// A triangle-free easy part (after trimming) and the three child views.
    Split {
        parent: &'v SubInstance<'g>,
        easy: &'v SubInstance<'g>,
        branches: [&'v SubInstance<'g>; 3],
    },
}

pub trait FrameworkObserver {
    fn on_event(&mut self, event: &FrameworkEvent<'_, '_>);
}

impl FrameworkObserver for () {
    fn on_event(&mut self, _: &FrameworkEvent<'_, '_>) {}
}

impl<F: FnMut(&FrameworkEvent<'_, '_>)> FrameworkObserver for F {
    fn on_event(&mut self, event: &FrameworkEvent<'_, '_>) {
        self(event)
    }
}

pub fn detect_with_finder(
    g: &TripartiteGraph,
    finder: &dyn EasyPartFinder,
    cfg: &FrameworkConfig,
    stats: &mut RunStats,
) -> Result<Verdict> {
    detect_with_finder_observed(g, finder, cfg, stats, &mut ())
}

pub fn detect_with_finder_observed(
    g: &TripartiteGraph,
    finder: &dyn EasyPartFinder,
    cfg: &FrameworkConfig,
    stats: &mut RunStats,
    observer: &mut dyn FrameworkObserver,
) -> Result<Verdict> {
    let threshold = cfg
        .small_volume_threshold
        .unwrap_or_else(|| default_volume_threshold(g.n_a() + g.n_b() + g.n_c()));

    let mut stack = vec![g.full_view()];
    while let Some(sub) = stack.pop() {
        stats.recursion_nodes += 1;
        observer.on_event(&FrameworkEvent::Node { sizes: sub.sizes() });
        if sub.has_empty_part() {
            continue;
        }
        if sub.volume() < threshold {
            observer.on_event(&FrameworkEvent::Exhaustive { sizes: sub.sizes() });
            let v = exhaustive_search(&sub, stats);
            if v.found() {
                return Ok(v);
            }
            continue;
        }

        let part = finder.find(&sub, stats)?;
        let easy = sub
            .restrict(part.a, part.b, part.c)
            .map_err(|e| Error::FinderContract(format!("returned lists are not subsets of the view: {e}")))?;

        if let Verdict::Found(t) = part.outcome {
            let inside = easy.ia().binary_search(&t.a).is_ok()
                && easy.ib().binary_search(&t.b).is_ok()
                && easy.ic().binary_search(&t.c).is_ok();
            if !inside || !g.is_triangle(t) {
                return Err(Error::FinderUntruthful(format!("{t:?} is not a triangle of the returned part")));
            }
            return Ok(part.outcome);
        }

        let need = fraction_targets(cfg, sub.sizes(), easy.sizes()).map_err(Error::FinderContract)?;
        if cfg.debug_verify_finder {
            if let Verdict::Found(t) = brute_triangle(&easy) {
                return Err(Error::FinderUntruthful(format!("part claimed triangle-free contains {t:?}")));
            }
        }

        // Drop the highest indices down to the exact required sizes.
        let (mut a1, mut b1, mut c1) = easy.into_lists();
        a1.truncate(need[0]);
        b1.truncate(need[1]);
        c1.truncate(need[2]);
        let easy = sub.restrict_unchecked(a1, b1, c1);

        let first = sub.restrict_unchecked(
            sub.ia().to_vec(),
            sub.ib().to_vec(),
            difference(sub.ic(), easy.ic()),
        );
        let second = sub.restrict_unchecked(
            sub.ia().to_vec(),
            difference(sub.ib(), easy.ib()),
            easy.ic().to_vec(),
        );
        let third = sub.restrict_unchecked(
            difference(sub.ia(), easy.ia()),
            easy.ib().to_vec(),
            easy.ic().to_vec(),
        );
        observer.on_event(&FrameworkEvent::Split {
            parent: &sub,
            easy: &easy,
            branches: [&first, &second, &third],
        });
        stack.push(third);
        stack.push(second);
        stack.push(first);
    }
    Ok(Verdict::TriangleFree)
}

/// Easy-part finder built from the high-degree strategy.
///
/// If some A vertex `v₁` has `d(v₁,B) * d(v₁,C) > |B||C| / Δ²`, the part is
/// `(A, N_B(v₁), N_C(v₁))`: any triangle there needs a B-C edge inside
/// `N_B(v₁) x N_C(v₁)`, and any such edge closes a triangle with `v₁`, so one
/// pair scan decides it. Otherwise the whole view is decided by the sparse
/// table scan.
#[derive(Debug, Clone, Copy)]
pub struct HighDegreeFinder {
    params: SparseParams,
}

pub fn high_degree_finder(delta: usize) -> HighDegreeFinder {
    HighDegreeFinder::new(SparseParams::new(delta))
}

impl HighDegreeFinder {
    pub fn new(params: SparseParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &SparseParams {
        &self.params
    }
}

impl EasyPartFinder for HighDegreeFinder {
    fn find(&self, sub: &SubInstance<'_>, stats: &mut RunStats) -> Result<EasyPart> {
        match check_degree_condition(sub, self.params.delta()) {
            Some(v1) => {
                let b = sub.neighborhood_unchecked(v1, Part::B);
                let c = sub.neighborhood_unchecked(v1, Part::C);
                let outcome = step4_scan(sub.graph(), &b, &c, v1, stats);
                Ok(EasyPart {
                    a: sub.ia().to_vec(),
                    b,
                    c,
                    outcome,
                })
            }
            None => Ok(EasyPart {
                outcome: sparse_detect(sub, &self.params, stats)?,
                a: sub.ia().to_vec(),
                b: sub.ib().to_vec(),
                c: sub.ic().to_vec(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_counts() {
        assert_eq!(required(1.0, 7), 7);
        assert_eq!(required(0.5, 7), 4);
        assert_eq!(required(0.25, 8), 2);
        assert_eq!(required(1e-6, 3), 1);
        assert_eq!(required(0.5, 0), 0);
    }

    #[test]
    fn config_rejects_bad_fractions() {
        assert!(FrameworkConfig::new(0.0, 1.0, 1.0).is_err());
        assert!(FrameworkConfig::new(1.0, 1.5, 1.0).is_err());
        assert!(FrameworkConfig::new(1.0, 1.0, f64::NAN).is_err());
        assert!(FrameworkConfig::new(1.0, 0.5, 0.25).is_ok());
    }

    #[test]
    fn targets_fixed_and_permuted() {
        let cfg = FrameworkConfig::new(1.0, 0.5, 0.25).unwrap();
        assert_eq!(fraction_targets(&cfg, [4, 8, 8], [4, 4, 2]), Ok([4, 4, 2]));
        assert!(fraction_targets(&cfg, [4, 8, 8], [4, 2, 4]).is_err());
        let perm = cfg.with_assignment(FractionAssignment::AnyPermutation);
        assert_eq!(fraction_targets(&perm, [4, 8, 8], [4, 2, 4]), Ok([4, 2, 4]));
        assert!(fraction_targets(&perm, [4, 8, 8], [3, 8, 8]).is_ok());
        assert!(fraction_targets(&perm, [4, 8, 8], [1, 1, 8]).is_err());
    }

    #[test]
    fn default_threshold_value() {
        assert_eq!(default_volume_threshold(0), 0);
        assert_eq!(default_volume_threshold(4), 32);
        assert_eq!(default_volume_threshold(100), 100_000);
    }
}
