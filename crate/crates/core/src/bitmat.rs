//! Row-major bit-packed Boolean matrices.
//!
//! Bit `j` of row `i` lives in word `i * words_per_row + j / 64` at bit
//! position `j % 64`. Pad bits past `cols` in the last word of each row are
//! always zero, so row-level AND/OR/popcount never need masking.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Machine word width in bits.
pub const WORD_BITS: usize = u64::BITS as usize;

/// Number of words needed to hold `bits` bits.
#[inline]
pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn last_word_mask(cols: usize) -> u64 {
    match cols % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Builds a word mask of `len` bits with exactly the given positions set.
pub fn mask_from_indices(len: usize, indices: &[usize]) -> Vec<u64> {
    let mut mask = vec![0u64; words_for(len)];
    for &j in indices {
        debug_assert!(j < len, "mask index {j} out of range {len}");
        mask[j / WORD_BITS] |= 1u64 << (j % WORD_BITS);
    }
    mask
}

/// Positions of the set bits, ascending.
pub fn set_bits(words: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, &word) in words.iter().enumerate() {
        let mut x = word;
        while x != 0 {
            out.push(w * WORD_BITS + x.trailing_zeros() as usize);
            x &= x - 1;
        }
    }
    out
}

/// Popcount of `a & b` over the common prefix.
#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

/// Lowest position set in `a & b & c`, if any.
#[inline]
pub fn first_common3(a: &[u64], b: &[u64], c: &[u64]) -> Option<usize> {
    for (w, ((x, y), z)) in a.iter().zip(b).zip(c).enumerate() {
        let hit = x & y & z;
        if hit != 0 {
            return Some(w * WORD_BITS + hit.trailing_zeros() as usize);
        }
    }
    None
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    /// All-zero `rows x cols` matrix.
    pub fn new(rows: usize, cols: usize) -> Self {
        let words_per_row = words_for(cols);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        let mut m = Self::new(rows, cols);
        if cols > 0 {
            let tail = last_word_mask(cols);
            for i in 0..rows {
                let row = m.row_words_mut(i);
                row.fill(u64::MAX);
                *row.last_mut().unwrap() = tail;
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::new(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    /// The raw word storage, row-major.
    #[inline]
    pub fn data(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols, "({i}, {j}) out of range");
        let word = self.data[i * self.words_per_row + j / WORD_BITS];
        (word >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        debug_assert!(i < self.rows && j < self.cols, "({i}, {j}) out of range");
        let word = &mut self.data[i * self.words_per_row + j / WORD_BITS];
        let bit = 1u64 << (j % WORD_BITS);
        if v {
            *word |= bit;
        } else {
            *word &= !bit;
        }
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        let start = i * self.words_per_row;
        &self.data[start..start + self.words_per_row]
    }

    // Callers must keep the pad bits zero.
    #[inline]
    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        let start = i * self.words_per_row;
        &mut self.data[start..start + self.words_per_row]
    }

    pub fn row_count_ones(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// True iff row `i` of `self` and row `k` of `other` share a set column.
    pub fn rows_intersect(&self, i: usize, other: &BitMatrix, k: usize) -> bool {
        debug_assert_eq!(self.cols, other.cols, "rows_intersect column mismatch");
        self.row_words(i)
            .iter()
            .zip(other.row_words(k))
            .any(|(x, y)| x & y != 0)
    }

    /// Checks the zero-padding invariant.
    pub fn pad_bits_clear(&self) -> bool {
        if self.cols.is_multiple_of(WORD_BITS) {
            return true;
        }
        let tail = last_word_mask(self.cols);
        (0..self.rows).all(|i| self.row_words(i).last().is_none_or(|w| w & !tail == 0))
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::new(self.cols, self.rows);
        for i in 0..self.rows {
            for j in set_bits(self.row_words(i)) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Copies the sub-matrix at the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        BitMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    /// Boolean product: ORs the rows of `b` selected by the set bits of each row of `self`.
    pub fn multiply_bitpacked(&self, b: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != b.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, b.rows, b.cols
            )));
        }
        let mut out = BitMatrix::new(self.rows, b.cols);
        if b.words_per_row == 0 {
            return Ok(out);
        }
        for i in 0..self.rows {
            let start = i * out.words_per_row;
            let acc = &mut out.data[start..start + out.words_per_row];
            for (w, &word) in self.row_words(i).iter().enumerate() {
                let mut x = word;
                while x != 0 {
                    let k = w * WORD_BITS + x.trailing_zeros() as usize;
                    x &= x - 1;
                    for (dst, src) in acc.iter_mut().zip(b.row_words(k)) {
                        *dst |= src;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Serializes in the shared text format: `"R C"` then one `0`/`1` line per row.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(16 + self.rows * (self.cols + 1));
        s.push_str(&format!("{} {}\n", self.rows, self.cols));
        for i in 0..self.rows {
            for j in 0..self.cols {
                s.push(if self.get(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<BitMatrix> {
        let mut lines = text.lines().enumerate();
        let (rows, cols) = match lines.next() {
            Some((_, header)) => parse_header(header)?,
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "missing \"R C\" header".into(),
                })
            }
        };
        let mut m = BitMatrix::new(rows, cols);
        for i in 0..rows {
            let (idx, line) = lines.next().ok_or_else(|| Error::Parse {
                line: i + 2,
                message: format!("expected {rows} rows, found {i}"),
            })?;
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.len() != cols {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("row has {} characters, expected {cols}", line.len()),
                });
            }
            for (j, ch) in line.bytes().enumerate() {
                match ch {
                    b'0' => {}
                    b'1' => m.set(i, j, true),
                    other => {
                        return Err(Error::Parse {
                            line: idx + 1,
                            message: format!("unexpected character {:?}", other as char),
                        })
                    }
                }
            }
        }
        if let Some((idx, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("trailing data after {rows} rows"),
            });
        }
        Ok(m)
    }
}

fn parse_header(header: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse {
        line: 1,
        message: format!("bad header {header:?}, expected \"R C\""),
    };
    let mut it = header.split_whitespace();
    let rows = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
    let cols = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
    if it.next().is_some() {
        return Err(bad());
    }
    Ok((rows, cols))
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BitMatrix::parse_text(s)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows.min(32) {
            for j in 0..self.cols.min(96) {
                f.write_str(if self.get(i, j) { "1" } else { "." })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
