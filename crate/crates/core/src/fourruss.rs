//! Sparse-case triangle detection with a precomputed subset-pair table.
//!
//! The B and C index lists of a view are cut into contiguous groups of `Δ³`
//! positions. For every subset of at most `subset_cap` positions inside one
//! B-group and every such subset inside one C-group the table stores whether
//! some B-C edge joins them. Each A-vertex then splits its neighborhoods into
//! per-group chunks and answers every chunk pair with a single lookup.
//!
//! Entries live in a dense bit array indexed by `(group pair, subset rank,
//! subset rank)`, where a subset's rank is its position in size-then-colex
//! order. [`PackedSubset`] is the word-sized encoding of a subset, one slot of
//! `offset_bits` per member, padded with a sentinel.

use itertools::Itertools;

use crate::bitmat::{words_for, WORD_BITS};
use crate::error::{Error, Result};
use crate::graph::{Part, RunStats, SubInstance, TripartiteGraph, Triangle, Verdict};

/// Default ceiling on the table size, in bits (128 MiB).
pub const DEFAULT_TABLE_BUDGET_BITS: u128 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparseParams {
    delta: usize,
    subset_cap: Option<usize>,
    table_budget_bits: u128,
}

impl SparseParams {
    /// `delta` is clamped to at least 1. The subset cap defaults to `delta`.
    pub fn new(delta: usize) -> Self {
        Self {
            delta: delta.max(1),
            subset_cap: None,
            table_budget_bits: DEFAULT_TABLE_BUDGET_BITS,
        }
    }

    pub fn with_subset_cap(mut self, cap: usize) -> Self {
        self.subset_cap = Some(cap.max(1));
        self
    }

    pub fn with_table_budget(mut self, bits: u128) -> Self {
        self.table_budget_bits = bits;
        self
    }

    #[inline]
    pub fn delta(&self) -> usize {
        self.delta
    }

    #[inline]
    pub fn subset_cap(&self) -> usize {
        self.subset_cap.unwrap_or(self.delta)
    }

    #[inline]
    pub fn table_budget_bits(&self) -> u128 {
        self.table_budget_bits
    }

    /// Nominal group size `Δ³`.
    pub fn group_size(&self) -> usize {
        self.delta.saturating_pow(3)
    }

    /// Table size in bits for B and C lists of lengths `m` and `n`, after
    /// checking that subsets of both sides fit the packed encoding.
    pub fn table_bits(&self, m: usize, n: usize) -> Result<u128> {
        let b = SideShape::new(m, self.group_size(), self.subset_cap())?;
        let c = SideShape::new(n, self.group_size(), self.subset_cap())?;
        Ok(b.groups as u128 * c.groups as u128 * b.nsub as u128 * c.nsub as u128)
    }

    /// Largest `Δ' <= Δ` whose table for an `m x n` view fits the budget.
    /// Falls back to `Δ = 1`, whose table is no larger than the B-C adjacency.
    pub fn clamped_for(&self, m: usize, n: usize) -> SparseParams {
        let mut p = *self;
        while p.delta > 1 {
            match p.table_bits(m, n) {
                Ok(bits) if bits <= p.table_budget_bits => break,
                _ => p.delta -= 1,
            }
        }
        if p.delta == 1 {
            p.subset_cap = p.subset_cap.map(|c| c.min(1));
            if let Ok(bits) = p.table_bits(m, n) {
                p.table_budget_bits = p.table_budget_bits.max(bits);
            }
        }
        p
    }
}

impl Default for SparseParams {
    fn default() -> Self {
        Self::new(2)
    }
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = match r.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    r
}

fn bit_length(x: usize) -> u32 {
    usize::BITS - x.leading_zeros()
}

/// Geometry of one side of the table.
#[derive(Debug, Clone)]
struct SideShape {
    len: usize,
    /// Positions per group (`min(Δ³, len)`, at least 1).
    span: usize,
    groups: usize,
    cap: usize,
    nsub: usize,
    offset_bits: u32,
}

impl SideShape {
    fn new(len: usize, group_size: usize, cap: usize) -> Result<Self> {
        let span = group_size.min(len).max(1);
        let groups = len.div_ceil(span);
        let cap = cap.min(span);
        let nsub: u128 = (1..=cap).map(|s| binom(span, s)).fold(0u128, u128::saturating_add);
        let offset_bits = bit_length(span);
        let group_bits = bit_length(groups.saturating_sub(1));
        let bits = group_bits as u64 + cap as u64 * offset_bits as u64;
        if bits > 64 || nsub > usize::MAX as u128 {
            return Err(Error::EncodingOverflow {
                bits: bits.min(u32::MAX as u64) as u32,
            });
        }
        Ok(Self {
            len,
            span,
            groups,
            cap,
            nsub: nsub as usize,
            offset_bits,
        })
    }
}

/// One side of the table: its members plus ranking data.
#[derive(Debug, Clone)]
struct Side {
    shape: SideShape,
    members: Vec<usize>,
    /// `size_offset[s]` = number of subsets of size `1..s`.
    size_offset: Vec<usize>,
    /// `choose[i][x]` = C(x, i) for `i <= cap`, `x < span`.
    choose: Vec<Vec<usize>>,
}

impl Side {
    fn new(members: &[usize], group_size: usize, cap: usize) -> Result<Self> {
        let shape = SideShape::new(members.len(), group_size, cap)?;
        let mut size_offset = vec![0usize; shape.cap + 2];
        for s in 1..=shape.cap {
            size_offset[s + 1] = size_offset[s] + binom(shape.span, s) as usize;
        }
        let choose = (0..=shape.cap)
            .map(|i| (0..shape.span).map(|x| binom(x, i) as usize).collect())
            .collect();
        Ok(Self {
            shape,
            members: members.to_vec(),
            size_offset,
            choose,
        })
    }

    fn group_len(&self, g: usize) -> usize {
        let start = g * self.shape.span;
        self.shape.len.saturating_sub(start).min(self.shape.span)
    }

    fn valid(&self, g: usize, offsets: &[usize]) -> bool {
        g < self.shape.groups
            && !offsets.is_empty()
            && offsets.len() <= self.shape.cap
            && offsets.windows(2).all(|w| w[0] < w[1])
            && offsets.last().is_some_and(|&o| o < self.group_len(g))
    }

    /// Size-then-colex rank; `offsets` must be valid.
    fn rank(&self, offsets: &[usize]) -> usize {
        let colex: usize = offsets
            .iter()
            .enumerate()
            .map(|(i, &c)| self.choose[i + 1][c])
            .sum();
        self.size_offset[offsets.len()] + colex
    }

    fn sentinel(&self) -> u64 {
        self.shape.span as u64
    }

    fn pack(&self, g: usize, offsets: &[usize]) -> PackedSubset {
        let ob = self.shape.offset_bits;
        let payload_bits = self.shape.cap as u32 * ob;
        let mut word = if payload_bits >= 64 { 0 } else { (g as u64) << payload_bits };
        for slot in 0..self.shape.cap {
            let v = offsets.get(slot).map_or(self.sentinel(), |&o| o as u64);
            word |= v << (slot as u32 * ob);
        }
        PackedSubset(word)
    }

    fn unpack(&self, p: PackedSubset) -> (usize, Vec<usize>) {
        let ob = self.shape.offset_bits;
        let slot_mask = (1u64 << ob) - 1;
        let payload_bits = self.shape.cap as u32 * ob;
        let group = if payload_bits >= 64 { 0 } else { (p.0 >> payload_bits) as usize };
        let offsets = (0..self.shape.cap)
            .map(|slot| (p.0 >> (slot as u32 * ob)) & slot_mask)
            .take_while(|&v| v != self.sentinel())
            .map(|v| v as usize)
            .collect();
        (group, offsets)
    }
}

/// A subset of one group encoded in a single word: group index in the high
/// bits, sorted member offsets in fixed-width slots, sentinel padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PackedSubset(pub u64);

/// A legal subset resolved to its `(group, rank)` table coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetIndex {
    pub group: usize,
    pub rank: usize,
}

/// A run of neighborhood positions that lies inside a single group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub group: usize,
    /// Offsets within the group, ascending.
    pub offsets: Vec<usize>,
}

/// Splits sorted view positions into per-group chunks of exactly `cap`
/// members plus at most one shorter remainder per group.
pub fn chunk_positions(positions: &[usize], group_size: usize, cap: usize) -> Vec<Chunk> {
    debug_assert!(group_size >= 1 && cap >= 1);
    let mut chunks: Vec<Chunk> = Vec::new();
    for &p in positions {
        let (group, offset) = (p / group_size, p % group_size);
        match chunks.last_mut() {
            Some(last) if last.group == group && last.offsets.len() < cap => last.offsets.push(offset),
            _ => chunks.push(Chunk {
                group,
                offsets: vec![offset],
            }),
        }
    }
    chunks
}

/// Lookup table answering "is there a B-C edge between these two subsets".
#[derive(Debug, Clone)]
pub struct PairTable {
    delta: usize,
    b: Side,
    c: Side,
    bits: Vec<u64>,
}

/// Builds the table for B list `ib` and C list `ic`.
pub fn build_pair_table(
    g: &TripartiteGraph,
    ib: &[usize],
    ic: &[usize],
    params: &SparseParams,
) -> Result<PairTable> {
    PairTable::build(g, ib, ic, params)
}

impl PairTable {
    pub fn build(g: &TripartiteGraph, ib: &[usize], ic: &[usize], params: &SparseParams) -> Result<Self> {
        let required = params.table_bits(ib.len(), ic.len())?;
        if required > params.table_budget_bits() {
            return Err(Error::TableBudgetExceeded {
                required,
                budget: params.table_budget_bits(),
            });
        }
        let b = Side::new(ib, params.group_size(), params.subset_cap())?;
        let c = Side::new(ic, params.group_size(), params.subset_cap())?;
        let mut table = Self {
            delta: params.delta(),
            bits: vec![0u64; words_for(required as usize)],
            b,
            c,
        };
        table.fill(g);
        Ok(table)
    }

    fn fill(&mut self, g: &TripartiteGraph) {
        let (bs, cs) = (&self.b.shape, &self.c.shape);
        let cw = words_for(cs.span);
        // Local C-group adjacency of every B member: `local[gc][p]` is a mask over offsets.
        let local: Vec<Vec<Vec<u64>>> = (0..cs.groups)
            .map(|gc| {
                let cl = self.c.group_len(gc);
                self.b
                    .members
                    .iter()
                    .map(|&bv| {
                        let mut m = vec![0u64; cw];
                        for off in 0..cl {
                            if g.bc().get(bv, self.c.members[gc * cs.span + off]) {
                                m[off / WORD_BITS] |= 1 << (off % WORD_BITS);
                            }
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        // Masks of every C subset, in rank order.
        let mut c_masks = vec![0u64; cs.nsub * cw];
        for s in 1..=cs.cap {
            for combo in (0..cs.span).combinations(s) {
                let r = self.c.rank(&combo);
                for &o in &combo {
                    c_masks[r * cw + o / WORD_BITS] |= 1 << (o % WORD_BITS);
                }
            }
        }
        let mut union = vec![0u64; cw];
        for gb in 0..bs.groups {
            let bl = self.b.group_len(gb);
            for s in 1..=bs.cap.min(bl) {
                for combo in (0..bl).combinations(s) {
                    let rb = self.b.rank(&combo);
                    for (gc, local_c) in local.iter().enumerate() {
                        union.fill(0);
                        for &o in &combo {
                            let row = &local_c[gb * bs.span + o];
                            for (u, r) in union.iter_mut().zip(row) {
                                *u |= r;
                            }
                        }
                        if union.iter().all(|&w| w == 0) {
                            continue;
                        }
                        let base = ((gb * cs.groups + gc) * bs.nsub + rb) * cs.nsub;
                        for rc in 0..cs.nsub {
                            let hit = c_masks[rc * cw..(rc + 1) * cw]
                                .iter()
                                .zip(&union)
                                .any(|(x, y)| x & y != 0);
                            if hit {
                                let idx = base + rc;
                                self.bits[idx / WORD_BITS] |= 1 << (idx % WORD_BITS);
                            }
                        }
                    }
                }
            }
        }
    }

    fn side(&self, part: Part) -> &Side {
        match part {
            Part::B => &self.b,
            Part::C => &self.c,
        }
    }

    #[inline]
    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Effective subset cap of `part` (never larger than its group span).
    pub fn subset_cap(&self, part: Part) -> usize {
        self.side(part).shape.cap
    }

    /// Positions per group on `part`.
    pub fn group_span(&self, part: Part) -> usize {
        self.side(part).shape.span
    }

    pub fn groups(&self, part: Part) -> usize {
        self.side(part).shape.groups
    }

    /// Original vertex indices in group `g` of `part`.
    pub fn group_members(&self, part: Part, g: usize) -> &[usize] {
        let side = self.side(part);
        let start = (g * side.shape.span).min(side.members.len());
        &side.members[start..start + side.group_len(g)]
    }

    /// Number of stored subsets per group on `part` (all sizes `1..=cap`).
    pub fn subsets_per_group(&self, part: Part) -> usize {
        self.side(part).shape.nsub
    }

    pub fn len_bits(&self) -> usize {
        self.b.shape.groups * self.c.shape.groups * self.b.shape.nsub * self.c.shape.nsub
    }

    /// Table coordinates of a subset given by sorted offsets within group `g`.
    pub fn index(&self, part: Part, g: usize, offsets: &[usize]) -> Option<SubsetIndex> {
        let side = self.side(part);
        side.valid(g, offsets).then(|| SubsetIndex {
            group: g,
            rank: side.rank(offsets),
        })
    }

    #[inline]
    pub fn lookup(&self, b: SubsetIndex, c: SubsetIndex) -> bool {
        let (bs, cs) = (&self.b.shape, &self.c.shape);
        let idx = ((b.group * cs.groups + c.group) * bs.nsub + b.rank) * cs.nsub + c.rank;
        (self.bits[idx / WORD_BITS] >> (idx % WORD_BITS)) & 1 == 1
    }

    /// Packs a subset of group `g`. The empty subset is allowed and encodes as
    /// all sentinels.
    pub fn encode(&self, part: Part, g: usize, offsets: &[usize]) -> Result<PackedSubset> {
        let side = self.side(part);
        if !offsets.is_empty() && !side.valid(g, offsets) || g >= side.shape.groups {
            return Err(Error::InvalidParameter(format!(
                "offsets {offsets:?} are not a legal subset of {part:?}-group {g}"
            )));
        }
        Ok(side.pack(g, offsets))
    }

    pub fn decode(&self, part: Part, packed: PackedSubset) -> (usize, Vec<usize>) {
        self.side(part).unpack(packed)
    }

    /// Lookup by packed encodings. An empty side answers `false`; an encoding
    /// that does not decode to a legal subset has no entry.
    pub fn lookup_packed(&self, b: PackedSubset, c: PackedSubset) -> Option<bool> {
        let (gb, ob) = self.b.unpack(b);
        let (gc, oc) = self.c.unpack(c);
        if (ob.is_empty() && gb < self.b.shape.groups) || (oc.is_empty() && gc < self.c.shape.groups) {
            return Some(false);
        }
        let bi = self.index(Part::B, gb, &ob)?;
        let ci = self.index(Part::C, gc, &oc)?;
        Some(self.lookup(bi, ci))
    }
}

/// Lowest-index A vertex with `d(v,B) * d(v,C) > |B| * |C| / Δ²`, if any.
pub fn check_degree_condition(sub: &SubInstance<'_>, delta: usize) -> Option<usize> {
    let bound = sub.ib().len() as u128 * sub.ic().len() as u128;
    let d2 = (delta as u128) * (delta as u128);
    sub.ia().iter().copied().find(|&v| {
        let prod = sub.degree_unchecked(v, Part::B) as u128 * sub.degree_unchecked(v, Part::C) as u128;
        prod * d2 > bound
    })
}

/// Sparse detector: builds the table for the view and scans it.
/// Every A vertex must satisfy the degree bound for `params.delta()`.
pub fn sparse_detect(sub: &SubInstance<'_>, params: &SparseParams, stats: &mut RunStats) -> Result<Verdict> {
    debug_assert!(
        check_degree_condition(sub, params.delta()).is_none(),
        "sparse_detect called on a view with a high-degree vertex"
    );
    let table = PairTable::build(sub.graph(), sub.ib(), sub.ic(), params)?;
    sparse_scan(sub, &table, stats)
}

/// Answers every neighborhood chunk pair of every A vertex with one table lookup.
/// `table` must have been built for this view's B and C lists.
pub fn sparse_scan(sub: &SubInstance<'_>, table: &PairTable, stats: &mut RunStats) -> Result<Verdict> {
    debug_assert_eq!(table.b.members, sub.ib());
    debug_assert_eq!(table.c.members, sub.ic());
    let g = sub.graph();
    stats.sparse_calls += 1;
    stats.pairs_charged += sub.ib().len() as u64 * sub.ic().len() as u64;

    let b_chunks_of = |a: usize| -> Result<Vec<(SubsetIndex, Chunk)>> {
        let positions: Vec<usize> = (0..sub.ib().len()).filter(|&p| g.ab().get(a, sub.ib()[p])).collect();
        index_chunks(table, Part::B, &positions)
    };
    let c_chunks_of = |a: usize| -> Result<Vec<(SubsetIndex, Chunk)>> {
        let positions: Vec<usize> = (0..sub.ic().len()).filter(|&p| g.ac().get(a, sub.ic()[p])).collect();
        index_chunks(table, Part::C, &positions)
    };

    for &a in sub.ia() {
        let bch = b_chunks_of(a)?;
        if bch.is_empty() {
            continue;
        }
        let cch = c_chunks_of(a)?;
        for (bi, bc) in &bch {
            for (ci, cc) in &cch {
                stats.table_queries += 1;
                if table.lookup(*bi, *ci) {
                    return resolve_witness(g, table, a, bc, cc).map(Verdict::Found);
                }
            }
        }
    }
    Ok(Verdict::TriangleFree)
}

fn index_chunks(table: &PairTable, part: Part, positions: &[usize]) -> Result<Vec<(SubsetIndex, Chunk)>> {
    chunk_positions(positions, table.group_span(part), table.subset_cap(part))
        .into_iter()
        .map(|ch| {
            table
                .index(part, ch.group, &ch.offsets)
                .map(|i| (i, ch))
                .ok_or(Error::MissingTableEntry)
        })
        .collect()
}

fn resolve_witness(g: &TripartiteGraph, table: &PairTable, a: usize, bc: &Chunk, cc: &Chunk) -> Result<Triangle> {
    let bm = table.group_members(Part::B, bc.group);
    let cm = table.group_members(Part::C, cc.group);
    for &ob in &bc.offsets {
        for &oc in &cc.offsets {
            if g.bc().get(bm[ob], cm[oc]) {
                return Ok(Triangle::new(a, bm[ob], cm[oc]));
            }
        }
    }
    Err(Error::MissingTableEntry)
}
