//! Recursive high-degree divide-and-conquer triangle detector.
//!
//! Each node of the recursion does one of:
//! * exhaustive search when `|B|` or `|C|` is below the small threshold,
//! * the sparse table scan when every A vertex satisfies the degree bound,
//! * otherwise a split around the lowest-index high-degree vertex `v₁`: two
//!   child views that never both contain a pair of `B₁ × C₁`, followed (only if
//!   both children report no triangle) by a scan of `B₁ × C₁` for an edge.
//!
//! The recursion runs on an explicit stack so deep instances cannot overflow,
//! and visits nodes in the same order as the natural recursive formulation.

use crate::bitmat::{first_common3, mask_from_indices, WORD_BITS};
use crate::fourruss::{check_degree_condition, sparse_detect, SparseParams};
use crate::graph::{difference, Part, RunStats, SubInstance, TripartiteGraph, Triangle};

pub use crate::graph::Verdict;

/// Largest `|B0| * |C0|` for which the charged-pair ledger is kept (32 MiB of bits).
pub const CHARGE_LEDGER_BUDGET: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectorConfig {
    pub sparse: SparseParams,
    /// Overrides the `Δ⁶` cutoff below which a view is searched exhaustively.
    pub small_threshold: Option<usize>,
    /// Track every charged `(b, c)` pair and assert none is charged twice.
    pub debug_charge_check: bool,
}

impl DetectorConfig {
    pub fn new(delta: usize) -> Self {
        Self {
            sparse: SparseParams::new(delta),
            small_threshold: None,
            debug_charge_check: false,
        }
    }

    pub fn with_small_threshold(mut self, threshold: usize) -> Self {
        self.small_threshold = Some(threshold.max(1));
        self
    }

    pub fn with_charge_check(mut self, on: bool) -> Self {
        self.debug_charge_check = on;
        self
    }

    pub fn with_sparse(mut self, sparse: SparseParams) -> Self {
        self.sparse = sparse;
        self
    }

    pub fn delta(&self) -> usize {
        self.sparse.delta()
    }

    /// The cutoff used for a run whose effective delta is `delta`.
    pub fn small_threshold_for(&self, delta: usize) -> usize {
        self.small_threshold
            .unwrap_or_else(|| delta.saturating_pow(6))
            .max(1)
    }
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self::new(2)
    }
}

/// Something that happened at one recursion node. Slices are original indices.
#[derive(Debug, Clone, Copy)]
pub enum DetectorEvent<'a> {
    Node {
        sizes: [usize; 3],
    },
    Exhaustive {
        ib: &'a [usize],
        ic: &'a [usize],
    },
    Sparse {
        ib: &'a [usize],
        ic: &'a [usize],
    },
    /// `ib` and `ic` are the B and C lists of the view `vertex` was picked from.
    HighDegree {
        vertex: usize,
        ib: &'a [usize],
        ic: &'a [usize],
        degree_b: usize,
        degree_c: usize,
        size_b: usize,
        size_c: usize,
        delta: usize,
    },
    Split {
        parent: [usize; 3],
        b1: usize,
        c1: usize,
        branches: [[usize; 3]; 2],
    },
    PairScan {
        vertex: usize,
        b1: &'a [usize],
        c1: &'a [usize],
    },
}

pub trait DetectorObserver {
    fn on_event(&mut self, event: &DetectorEvent<'_>);
}

impl DetectorObserver for () {
    fn on_event(&mut self, _: &DetectorEvent<'_>) {}
}

impl<F: FnMut(&DetectorEvent<'_>)> DetectorObserver for F {
    fn on_event(&mut self, event: &DetectorEvent<'_>) {
        self(event)
    }
}

/// Outcome of the charged-pair uniqueness check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChargeReport {
    /// False when the instance was too large to keep a ledger.
    pub checked: bool,
    pub pairs_recorded: u64,
    pub duplicates: u64,
    pub first_duplicate: Option<(usize, usize)>,
}

impl ChargeReport {
    pub fn held(&self) -> bool {
        self.duplicates == 0
    }
}

/// Bitset over `B0 x C0` recording every pair charged by a leaf or pair scan.
#[derive(Debug, Clone)]
pub struct ChargeLedger {
    n_c: usize,
    seen: Vec<u64>,
    report: ChargeReport,
}

impl ChargeLedger {
    /// `None` if `n_b * n_c` exceeds [`CHARGE_LEDGER_BUDGET`].
    pub fn new(n_b: usize, n_c: usize) -> Option<Self> {
        let cells = n_b.checked_mul(n_c).filter(|&x| x <= CHARGE_LEDGER_BUDGET)?;
        Some(Self {
            n_c,
            seen: vec![0; cells.div_ceil(WORD_BITS)],
            report: ChargeReport {
                checked: true,
                ..ChargeReport::default()
            },
        })
    }

    pub fn charge(&mut self, bs: &[usize], cs: &[usize]) {
        for &b in bs {
            for &c in cs {
                let idx = b * self.n_c + c;
                let (w, bit) = (idx / WORD_BITS, 1u64 << (idx % WORD_BITS));
                if self.seen[w] & bit != 0 {
                    self.report.duplicates += 1;
                    self.report.first_duplicate.get_or_insert((b, c));
                } else {
                    self.seen[w] |= bit;
                }
                self.report.pairs_recorded += 1;
            }
        }
    }

    pub fn report(&self) -> ChargeReport {
        self.report
    }
}

impl DetectorObserver for ChargeLedger {
    fn on_event(&mut self, event: &DetectorEvent<'_>) {
        match *event {
            DetectorEvent::Exhaustive { ib, ic } | DetectorEvent::Sparse { ib, ic } => self.charge(ib, ic),
            DetectorEvent::PairScan { b1, c1, .. } => self.charge(b1, c1),
            _ => {}
        }
    }
}

/// Detects a triangle in `g`. With `debug_charge_check` set, also asserts that
/// no `(b, c)` pair was charged twice.
pub fn detect(g: &TripartiteGraph, cfg: &DetectorConfig, stats: &mut RunStats) -> Verdict {
    if cfg.debug_charge_check {
        let (verdict, report) = check_charging(g, cfg, stats);
        assert!(
            report.held(),
            "pair ({:?}) charged twice; {} duplicate charges",
            report.first_duplicate,
            report.duplicates
        );
        verdict
    } else {
        detect_observed(g, cfg, stats, &mut ())
    }
}

/// Runs [`detect`] with a charge ledger and returns its report. The report is
/// marked unchecked when the instance is too large for the ledger.
pub fn check_charging(g: &TripartiteGraph, cfg: &DetectorConfig, stats: &mut RunStats) -> (Verdict, ChargeReport) {
    match ChargeLedger::new(g.n_b(), g.n_c()) {
        Some(mut ledger) => {
            let v = detect_observed(g, cfg, stats, &mut ledger);
            (v, ledger.report())
        }
        None => (detect_observed(g, cfg, stats, &mut ()), ChargeReport::default()),
    }
}

enum Task<'g> {
    Visit(SubInstance<'g>),
    Scan {
        vertex: usize,
        b1: Vec<usize>,
        c1: Vec<usize>,
    },
}

/// [`detect`] reporting every recursion event to `observer`.
pub fn detect_observed(
    g: &TripartiteGraph,
    cfg: &DetectorConfig,
    stats: &mut RunStats,
    observer: &mut dyn DetectorObserver,
) -> Verdict {
    // Δ is fixed for the whole recursion; tables of sub-views are never larger
    // than the root's, so clamping once here keeps every build within budget.
    let params = cfg.sparse.clamped_for(g.n_b(), g.n_c());
    let delta = params.delta();
    let small = cfg.small_threshold_for(delta);

    let mut stack = vec![Task::Visit(g.full_view())];
    while let Some(task) = stack.pop() {
        let sub = match task {
            Task::Scan { vertex, b1, c1 } => {
                observer.on_event(&DetectorEvent::PairScan {
                    vertex,
                    b1: &b1,
                    c1: &c1,
                });
                let v = step4_scan(g, &b1, &c1, vertex, stats);
                if v.found() {
                    return v;
                }
                continue;
            }
            Task::Visit(sub) => sub,
        };

        stats.recursion_nodes += 1;
        observer.on_event(&DetectorEvent::Node { sizes: sub.sizes() });
        if sub.has_empty_part() {
            continue;
        }
        let [na, nb, nc] = sub.sizes();

        if nb < small || nc < small {
            observer.on_event(&DetectorEvent::Exhaustive {
                ib: sub.ib(),
                ic: sub.ic(),
            });
            let v = exhaustive_search(&sub, stats);
            if v.found() {
                return v;
            }
            continue;
        }

        let Some(v1) = check_degree_condition(&sub, delta) else {
            observer.on_event(&DetectorEvent::Sparse {
                ib: sub.ib(),
                ic: sub.ic(),
            });
            let v = sparse_detect(&sub, &params, stats).expect("pair table fits: budget checked at the root");
            if v.found() {
                return v;
            }
            continue;
        };

        let b1 = sub.neighborhood_unchecked(v1, Part::B);
        let c1 = sub.neighborhood_unchecked(v1, Part::C);
        observer.on_event(&DetectorEvent::HighDegree {
            vertex: v1,
            ib: sub.ib(),
            ic: sub.ic(),
            degree_b: b1.len(),
            degree_c: c1.len(),
            size_b: nb,
            size_c: nc,
            delta,
        });
        debug_assert!(
            (b1.len() as u128 * c1.len() as u128) * (delta as u128).pow(2) > nb as u128 * nc as u128,
            "selected vertex does not violate the degree bound"
        );

        let a_rest: Vec<usize> = sub.ia().iter().copied().filter(|&a| a != v1).collect();
        let b_rest = difference(sub.ib(), &b1);
        let c_rest = difference(sub.ic(), &c1);
        // |B₁|/|B| > |C₁|/|C|, compared as cross products; ties take the second form.
        let (first, second) = if b1.len() as u128 * nc as u128 > c1.len() as u128 * nb as u128 {
            (
                (a_rest.clone(), sub.ib().to_vec(), c_rest),
                (a_rest, b_rest, c1.clone()),
            )
        } else {
            (
                (a_rest.clone(), b_rest, sub.ic().to_vec()),
                (a_rest, b1.clone(), c_rest),
            )
        };
        observer.on_event(&DetectorEvent::Split {
            parent: [na, nb, nc],
            b1: b1.len(),
            c1: c1.len(),
            branches: [
                [first.0.len(), first.1.len(), first.2.len()],
                [second.0.len(), second.1.len(), second.2.len()],
            ],
        });

        stack.push(Task::Scan { vertex: v1, b1, c1 });
        stack.push(Task::Visit(sub.restrict_unchecked(second.0, second.1, second.2)));
        stack.push(Task::Visit(sub.restrict_unchecked(first.0, first.1, first.2)));
    }
    Verdict::TriangleFree
}

/// Triple loop over the view with word-parallel inner scans over C.
///
/// On a triangle-free view the full `|A| * |B| * |C|` volume is counted into
/// `triples_enumerated`; on success the count stops at the hit:
/// `(a-position * |B| + b-position + 1) * |C|`.
pub fn exhaustive_search(sub: &SubInstance<'_>, stats: &mut RunStats) -> Verdict {
    let g = sub.graph();
    let [na, nb, nc] = sub.sizes();
    if na == 0 || nb == 0 || nc == 0 {
        stats.triples_enumerated += (na * nb * nc) as u64;
        return Verdict::TriangleFree;
    }
    let mask_c = sub.mask(Part::C);
    for (ai, &a) in sub.ia().iter().enumerate() {
        let ac_row = g.ac().row_words(a);
        for (bi, &b) in sub.ib().iter().enumerate() {
            if !g.ab().get(a, b) {
                continue;
            }
            if let Some(c) = first_common3(ac_row, g.bc().row_words(b), mask_c) {
                stats.triples_enumerated += ((ai * nb + bi + 1) * nc) as u64;
                return Verdict::Found(Triangle::new(a, b, c));
            }
        }
    }
    stats.triples_enumerated += (na as u64) * (nb as u64) * (nc as u64);
    Verdict::TriangleFree
}

/// Looks for any B-C edge in `b1 x c1` (both sorted neighborhoods of `v1`),
/// returning `(v1, b, c)` for the first one in row-major order.
pub fn step4_scan(g: &TripartiteGraph, b1: &[usize], c1: &[usize], v1: usize, stats: &mut RunStats) -> Verdict {
    stats.pairs_charged += b1.len() as u64 * c1.len() as u64;
    if b1.is_empty() || c1.is_empty() {
        return Verdict::TriangleFree;
    }
    let mask = mask_from_indices(g.n_c(), c1);
    for &b in b1 {
        let hit = g
            .bc()
            .row_words(b)
            .iter()
            .zip(&mask)
            .enumerate()
            .find_map(|(w, (r, m))| {
                let x = r & m;
                (x != 0).then(|| w * WORD_BITS + x.trailing_zeros() as usize)
            });
        if let Some(c) = hit {
            return Verdict::Found(Triangle::new(v1, b, c));
        }
    }
    Verdict::TriangleFree
}
