//! Tripartite graphs, index-list views over them, and run counters.

use std::fmt;
use std::sync::OnceLock;

use crate::bitmat::{and_count, mask_from_indices, set_bits, BitMatrix};
use crate::error::{Error, Result};

/// Which of the three bipartite adjacencies an edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartPair {
    AB,
    AC,
    BC,
}

impl PartPair {
    pub fn as_str(self) -> &'static str {
        match self {
            PartPair::AB => "AB",
            PartPair::AC => "AC",
            PartPair::BC => "BC",
        }
    }
}

impl std::str::FromStr for PartPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "AB" => Ok(PartPair::AB),
            "AC" => Ok(PartPair::AC),
            "BC" => Ok(PartPair::BC),
            other => Err(Error::UnknownPartPair(other.to_string())),
        }
    }
}

/// The part a degree or neighborhood of an A-vertex is taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    B,
    C,
}

/// A triangle `(a, b, c)` given by original vertex indices of each part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangle {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Triangle {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        Self { a, b, c }
    }
}

/// Outcome of a triangle search. A witness is carried exactly when one was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Found(Triangle),
    TriangleFree,
}

impl Verdict {
    pub fn found(&self) -> bool {
        matches!(self, Verdict::Found(_))
    }

    pub fn witness(&self) -> Option<Triangle> {
        match *self {
            Verdict::Found(t) => Some(t),
            Verdict::TriangleFree => None,
        }
    }
}

/// Work counters for a single run. All counters only ever grow.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    /// Triples inspected by exhaustive leaf searches.
    pub triples_enumerated: u64,
    /// `(b, c)` pairs paid for by sparse calls and pair scans.
    pub pairs_charged: u64,
    pub recursion_nodes: u64,
    pub table_queries: u64,
    pub sparse_calls: u64,
}

impl RunStats {
    pub fn merge(&mut self, other: &RunStats) {
        self.triples_enumerated += other.triples_enumerated;
        self.pairs_charged += other.pairs_charged;
        self.recursion_nodes += other.recursion_nodes;
        self.table_queries += other.table_queries;
        self.sparse_calls += other.sparse_calls;
    }

    /// `(name, value)` pairs in a fixed order.
    pub fn entries(&self) -> [(&'static str, u64); 5] {
        [
            ("triples_enumerated", self.triples_enumerated),
            ("pairs_charged", self.pairs_charged),
            ("recursion_nodes", self.recursion_nodes),
            ("table_queries", self.table_queries),
            ("sparse_calls", self.sparse_calls),
        ]
    }
}

/// Three vertex parts A, B, C with one adjacency matrix per pair of parts.
#[derive(Clone, PartialEq, Eq)]
pub struct TripartiteGraph {
    ab: BitMatrix,
    ac: BitMatrix,
    bc: BitMatrix,
}

impl TripartiteGraph {
    pub fn empty(n_a: usize, n_b: usize, n_c: usize) -> Self {
        Self {
            ab: BitMatrix::new(n_a, n_b),
            ac: BitMatrix::new(n_a, n_c),
            bc: BitMatrix::new(n_b, n_c),
        }
    }

    pub fn from_matrices(ab: BitMatrix, ac: BitMatrix, bc: BitMatrix) -> Result<Self> {
        if ab.rows() != ac.rows() || ab.cols() != bc.rows() || ac.cols() != bc.cols() {
            return Err(Error::DimensionMismatch(format!(
                "AB {}x{}, AC {}x{}, BC {}x{}",
                ab.rows(),
                ab.cols(),
                ac.rows(),
                ac.cols(),
                bc.rows(),
                bc.cols()
            )));
        }
        Ok(Self { ab, ac, bc })
    }

    pub fn from_edge_list(
        n_a: usize,
        n_b: usize,
        n_c: usize,
        edges: &[(PartPair, usize, usize)],
    ) -> Result<Self> {
        let mut g = Self::empty(n_a, n_b, n_c);
        for &(pair, i, j) in edges {
            g.add_edge(pair, i, j)?;
        }
        Ok(g)
    }

    /// Tripartite cover of a general graph: every vertex is copied into A, B and
    /// C, and every edge `{u, v}` is placed in all three pair adjacencies in both
    /// orientations. Triangles of the cover correspond to triangles of the input.
    pub fn from_general(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n, n, n);
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop on vertex {u}")));
            }
            for pair in [PartPair::AB, PartPair::AC, PartPair::BC] {
                g.add_edge(pair, u, v)?;
                g.add_edge(pair, v, u)?;
            }
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, pair: PartPair, i: usize, j: usize) -> Result<()> {
        let m = self.matrix_mut(pair);
        if i >= m.rows() || j >= m.cols() {
            return Err(Error::EdgeOutOfRange {
                pair: pair.as_str(),
                i,
                j,
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        m.set(i, j, true);
        Ok(())
    }

    pub fn remove_edge(&mut self, pair: PartPair, i: usize, j: usize) {
        self.matrix_mut(pair).set(i, j, false);
    }

    fn matrix_mut(&mut self, pair: PartPair) -> &mut BitMatrix {
        match pair {
            PartPair::AB => &mut self.ab,
            PartPair::AC => &mut self.ac,
            PartPair::BC => &mut self.bc,
        }
    }

    pub fn matrix(&self, pair: PartPair) -> &BitMatrix {
        match pair {
            PartPair::AB => &self.ab,
            PartPair::AC => &self.ac,
            PartPair::BC => &self.bc,
        }
    }

    #[inline]
    pub fn ab(&self) -> &BitMatrix {
        &self.ab
    }

    #[inline]
    pub fn ac(&self) -> &BitMatrix {
        &self.ac
    }

    #[inline]
    pub fn bc(&self) -> &BitMatrix {
        &self.bc
    }

    #[inline]
    pub fn n_a(&self) -> usize {
        self.ab.rows()
    }

    #[inline]
    pub fn n_b(&self) -> usize {
        self.ab.cols()
    }

    #[inline]
    pub fn n_c(&self) -> usize {
        self.ac.cols()
    }

    pub fn is_triangle(&self, t: Triangle) -> bool {
        t.a < self.n_a()
            && t.b < self.n_b()
            && t.c < self.n_c()
            && self.ab.get(t.a, t.b)
            && self.ac.get(t.a, t.c)
            && self.bc.get(t.b, t.c)
    }

    pub fn edge_count(&self, pair: PartPair) -> usize {
        self.matrix(pair).count_ones()
    }

    /// View over every vertex.
    pub fn full_view(&self) -> SubInstance<'_> {
        SubInstance::new_unchecked(
            self,
            (0..self.n_a()).collect(),
            (0..self.n_b()).collect(),
            (0..self.n_c()).collect(),
        )
    }

    /// Validated view; lists must be strictly increasing and in range.
    pub fn view(&self, ia: Vec<usize>, ib: Vec<usize>, ic: Vec<usize>) -> Result<SubInstance<'_>> {
        check_list(&ia, self.n_a(), "A")?;
        check_list(&ib, self.n_b(), "B")?;
        check_list(&ic, self.n_c(), "C")?;
        Ok(SubInstance::new_unchecked(self, ia, ib, ic))
    }

    /// Serializes in the graph text format (`nA nB nC` then `P i j` lines).
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.n_a(), self.n_b(), self.n_c());
        for pair in [PartPair::AB, PartPair::AC, PartPair::BC] {
            let m = self.matrix(pair);
            for i in 0..m.rows() {
                for j in set_bits(m.row_words(i)) {
                    s.push_str(&format!("{} {i} {j}\n", pair.as_str()));
                }
            }
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing \"nA nB nC\" header".into(),
        })?;
        let sizes = parse_numbers(header, hline, 3)?;
        let mut g = Self::empty(sizes[0], sizes[1], sizes[2]);
        for (lineno, line) in lines {
            let mut it = line.split_whitespace();
            let pair: PartPair = it
                .next()
                .unwrap()
                .parse()
                .map_err(|e: Error| Error::Parse {
                    line: lineno,
                    message: e.to_string(),
                })?;
            let rest: Vec<&str> = it.collect();
            let ij = parse_numbers(&rest.join(" "), lineno, 2)?;
            g.add_edge(pair, ij[0], ij[1]).map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
        }
        Ok(g)
    }

    /// Parses the general-graph format (`n` then `i j` lines) and applies the
    /// tripartite cover.
    pub fn parse_general_text(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing vertex count header".into(),
        })?;
        let n = parse_numbers(header, hline, 1)?[0];
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            let uv = parse_numbers(line, lineno, 2)?;
            if uv[0] >= n || uv[1] >= n || uv[0] == uv[1] {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("invalid edge {} {} for {n} vertices", uv[0], uv[1]),
                });
            }
            edges.push((uv[0], uv[1]));
        }
        Self::from_general(n, &edges)
    }
}

impl fmt::Debug for TripartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Non-blank lines with `#` comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap().trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_numbers(line: &str, lineno: usize, count: usize) -> Result<Vec<usize>> {
    let nums: Vec<usize> = line
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: lineno,
            message: format!("{e} in {line:?}"),
        })?;
    if nums.len() != count {
        return Err(Error::Parse {
            line: lineno,
            message: format!("expected {count} numbers, found {}", nums.len()),
        });
    }
    Ok(nums)
}

fn check_list(list: &[usize], bound: usize, part: &'static str) -> Result<()> {
    let increasing = list.windows(2).all(|w| w[0] < w[1]);
    if !increasing || list.last().is_some_and(|&x| x >= bound) {
        return Err(Error::NotSubset(part));
    }
    Ok(())
}

/// True iff sorted `sub` is a subset of sorted `sup`.
fn is_sorted_subset(sub: &[usize], sup: &[usize]) -> bool {
    if !sub.windows(2).all(|w| w[0] < w[1]) {
        return false;
    }
    let mut it = sup.iter();
    sub.iter().all(|x| it.by_ref().any(|y| y == x))
}

/// Sorted difference `all \ remove` of two sorted lists.
pub fn difference(all: &[usize], remove: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(all.len().saturating_sub(remove.len()));
    let mut r = remove.iter().peekable();
    for &x in all {
        while r.peek().is_some_and(|&&y| y < x) {
            r.next();
        }
        if r.peek() != Some(&&x) {
            out.push(x);
        }
    }
    out
}

/// A sub-instance of a [`TripartiteGraph`] selected by three sorted index
/// lists. Adjacency is never copied; word masks over B and C are built on
/// first use and cached.
pub struct SubInstance<'g> {
    graph: &'g TripartiteGraph,
    ia: Vec<usize>,
    ib: Vec<usize>,
    ic: Vec<usize>,
    mask_b: OnceLock<Vec<u64>>,
    mask_c: OnceLock<Vec<u64>>,
}

impl Clone for SubInstance<'_> {
    fn clone(&self) -> Self {
        Self::new_unchecked(self.graph, self.ia.clone(), self.ib.clone(), self.ic.clone())
    }
}

impl fmt::Debug for SubInstance<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubInstance")
            .field("ia", &self.ia)
            .field("ib", &self.ib)
            .field("ic", &self.ic)
            .finish()
    }
}

impl<'g> SubInstance<'g> {
    pub(crate) fn new_unchecked(
        graph: &'g TripartiteGraph,
        ia: Vec<usize>,
        ib: Vec<usize>,
        ic: Vec<usize>,
    ) -> Self {
        debug_assert!(check_list(&ia, graph.n_a(), "A").is_ok());
        debug_assert!(check_list(&ib, graph.n_b(), "B").is_ok());
        debug_assert!(check_list(&ic, graph.n_c(), "C").is_ok());
        Self {
            graph,
            ia,
            ib,
            ic,
            mask_b: OnceLock::new(),
            mask_c: OnceLock::new(),
        }
    }

    #[inline]
    pub fn graph(&self) -> &'g TripartiteGraph {
        self.graph
    }

    #[inline]
    pub fn ia(&self) -> &[usize] {
        &self.ia
    }

    #[inline]
    pub fn ib(&self) -> &[usize] {
        &self.ib
    }

    #[inline]
    pub fn ic(&self) -> &[usize] {
        &self.ic
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.ia.len(), self.ib.len(), self.ic.len()]
    }

    /// `|A| * |B| * |C|`.
    pub fn volume(&self) -> u128 {
        self.ia.len() as u128 * self.ib.len() as u128 * self.ic.len() as u128
    }

    pub fn has_empty_part(&self) -> bool {
        self.ia.is_empty() || self.ib.is_empty() || self.ic.is_empty()
    }

    pub fn part(&self, part: Part) -> &[usize] {
        match part {
            Part::B => &self.ib,
            Part::C => &self.ic,
        }
    }

    /// Word mask over all of B (or C) with this view's indices set.
    pub fn mask(&self, part: Part) -> &[u64] {
        match part {
            Part::B => self
                .mask_b
                .get_or_init(|| mask_from_indices(self.graph.n_b(), &self.ib)),
            Part::C => self
                .mask_c
                .get_or_init(|| mask_from_indices(self.graph.n_c(), &self.ic)),
        }
    }

    /// Adjacency row of A-vertex `v` toward `part`, unmasked.
    #[inline]
    pub(crate) fn row(&self, v: usize, part: Part) -> &'g [u64] {
        match part {
            Part::B => self.graph.ab.row_words(v),
            Part::C => self.graph.ac.row_words(v),
        }
    }

    fn check_member(&self, v: usize) -> Result<()> {
        self.ia
            .binary_search(&v)
            .map(|_| ())
            .map_err(|_| Error::NotInView(v))
    }

    /// `d(v, part)`: neighbors of A-vertex `v` among this view's indices of `part`.
    pub fn degree(&self, v: usize, part: Part) -> Result<usize> {
        self.check_member(v)?;
        Ok(self.degree_unchecked(v, part))
    }

    #[inline]
    pub(crate) fn degree_unchecked(&self, v: usize, part: Part) -> usize {
        and_count(self.row(v, part), self.mask(part))
    }

    /// Sorted neighbors of A-vertex `v` within the view's `part`.
    pub fn neighborhood(&self, v: usize, part: Part) -> Result<Vec<usize>> {
        self.check_member(v)?;
        Ok(self.neighborhood_unchecked(v, part))
    }

    pub(crate) fn neighborhood_unchecked(&self, v: usize, part: Part) -> Vec<usize> {
        let masked: Vec<u64> = self
            .row(v, part)
            .iter()
            .zip(self.mask(part))
            .map(|(r, m)| r & m)
            .collect();
        set_bits(&masked)
    }

    /// View indices of `part` that are not in the sorted list `within`.
    pub fn complement_in(&self, part: Part, within: &[usize]) -> Vec<usize> {
        difference(self.part(part), within)
    }

    /// Narrower view over the same graph. Each new list must be a sorted subset
    /// of the corresponding current list.
    pub fn restrict(&self, ia: Vec<usize>, ib: Vec<usize>, ic: Vec<usize>) -> Result<SubInstance<'g>> {
        if !is_sorted_subset(&ia, &self.ia) {
            return Err(Error::NotSubset("A"));
        }
        if !is_sorted_subset(&ib, &self.ib) {
            return Err(Error::NotSubset("B"));
        }
        if !is_sorted_subset(&ic, &self.ic) {
            return Err(Error::NotSubset("C"));
        }
        Ok(SubInstance::new_unchecked(self.graph, ia, ib, ic))
    }

    pub(crate) fn restrict_unchecked(&self, ia: Vec<usize>, ib: Vec<usize>, ic: Vec<usize>) -> SubInstance<'g> {
        debug_assert!(is_sorted_subset(&ia, &self.ia));
        debug_assert!(is_sorted_subset(&ib, &self.ib));
        debug_assert!(is_sorted_subset(&ic, &self.ic));
        SubInstance::new_unchecked(self.graph, ia, ib, ic)
    }

    pub fn into_lists(self) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        (self.ia, self.ib, self.ic)
    }
}
