//! Exact linear algebra over the two-element field.
//!
//! Matrices are stored as a sparse set of nonzero positions; elimination
//! converts them on demand into bit-packed rows.  Pivoting always picks the
//! first available nonzero in a fixed column order, so every routine here is
//! deterministic and yields reproducible bases.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

const WORD: usize = 64;

/// Errors raised by the F₂ kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("entry ({row}, {col}) lies outside a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("composition d_out * d_in is nonzero ({nonzero} nonzero entries)")]
    CompositionNotZero { nonzero: usize },
}

/// A dense bit vector over F₂ with a fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        F2Vector {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    /// Builds a vector from the positions of its ones.  Repeated positions
    /// cancel, as they would in a formal sum over F₂.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut v = F2Vector::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        F2Vector::from_indices(len, [i])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &F2Vector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    /// Index of the first one, if any.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    /// Positions of all ones in increasing order.
    pub fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let t = w.trailing_zeros() as usize;
                out.push(k * WORD + t);
                w &= w - 1;
            }
        }
        out
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Inner product over F₂.
    pub fn dot(&self, other: &F2Vector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vector[{}]{:?}", self.len, self.ones())
    }
}

/// A sparse matrix over F₂.  `rows` counts target basis elements and `cols`
/// counts source basis elements, so a differential `d: C → C` is stored with
/// `(target, source)` entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeSet<(usize, usize)>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            entries: BTreeSet::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i)).collect(),
        }
    }

    /// Builds a matrix from `(row, col)` positions.  A position listed twice
    /// cancels and is not stored.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut m = BitMatrix::zero(rows, cols);
        for (r, c) in entries {
            if r >= rows || c >= cols {
                return Err(LinalgError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            m.toggle(r, c);
        }
        Ok(m)
    }

    /// Builds a matrix from dense rows of 0/1 values.
    pub fn from_dense(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = BitMatrix::zero(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (c, &x) in row.iter().enumerate() {
                if x % 2 == 1 {
                    m.entries.insert((r, c));
                }
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[F2Vector]) -> Self {
        let mut m = BitMatrix::zero(rows, columns.len());
        for (c, v) in columns.iter().enumerate() {
            assert_eq!(v.len(), rows, "column length mismatch");
            for r in v.ones() {
                m.entries.insert((r, c));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.entries.contains(&(r, c))
    }

    pub fn toggle(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "entry out of range");
        if !self.entries.remove(&(r, c)) {
            self.entries.insert((r, c));
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|&(r, c)| (c, r)).collect(),
        }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zero(self.rows, other.cols);
        for c in 0..other.cols {
            let col = self.mul_vec(&other.column(c));
            for r in col.ones() {
                out.entries.insert((r, c));
            }
        }
        Ok(out)
    }

    /// Column `c` as a vector of length `rows`.
    pub fn column(&self, c: usize) -> F2Vector {
        let mut v = F2Vector::zeros(self.rows);
        for &(r, cc) in &self.entries {
            if cc == c {
                v.flip(r);
            }
        }
        v
    }

    pub fn columns(&self) -> Vec<F2Vector> {
        let mut cols = vec![F2Vector::zeros(self.rows); self.cols];
        for &(r, c) in &self.entries {
            cols[c].flip(r);
        }
        cols
    }

    /// Bit-packed rows, each of length `cols`.
    pub fn packed_rows(&self) -> Vec<F2Vector> {
        let mut rows = vec![F2Vector::zeros(self.cols); self.rows];
        for &(r, c) in &self.entries {
            rows[r].flip(c);
        }
        rows
    }

    /// Applies the matrix to a source vector.
    pub fn mul_vec(&self, v: &F2Vector) -> F2Vector {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = F2Vector::zeros(self.rows);
        for &(r, c) in &self.entries {
            if v.get(c) {
                out.flip(r);
            }
        }
        out
    }

    /// Restricts to the given row and column index lists, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        let rpos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let cpos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut out = BitMatrix::zero(rows.len(), cols.len());
        for &(r, c) in &self.entries {
            if let (Some(&ri), Some(&ci)) = (rpos.get(&r), cpos.get(&c)) {
                out.entries.insert((ri, ci));
            }
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Reduced row echelon form of the packed rows: the nonzero rows and their
/// pivot columns, pivots taken left to right.
fn row_reduce(m: &BitMatrix) -> (Vec<F2Vector>, Vec<usize>) {
    let mut rows = m.packed_rows();
    let mut pivots = Vec::new();
    let mut next = 0;
    for c in 0..m.cols {
        let Some(p) = (next..rows.len()).find(|&r| rows[r].get(c)) else {
            continue;
        };
        rows.swap(next, p);
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(c) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(c);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    (rows, pivots)
}

/// Rank over F₂.
pub fn rank(m: &BitMatrix) -> usize {
    row_reduce(m).1.len()
}

/// A basis of the kernel, one vector per free column (in column order).
pub fn kernel_basis(m: &BitMatrix) -> Vec<F2Vector> {
    let (rows, pivots) = row_reduce(m);
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    (0..m.cols)
        .filter(|c| !pivot_set.contains(c))
        .map(|free| {
            let mut v = F2Vector::unit(m.cols, free);
            for (row, &pc) in rows.iter().zip(&pivots) {
                if row.get(free) {
                    v.flip(pc);
                }
            }
            v
        })
        .collect()
}

/// Dimension of `ker(d_out) / im(d_in)`.
pub fn homology_rank(d_in: &BitMatrix, d_out: &BitMatrix) -> Result<usize, LinalgError> {
    if d_in.rows != d_out.cols {
        return Err(LinalgError::DimensionMismatch(format!(
            "d_in has {} rows but d_out has {} columns",
            d_in.rows, d_out.cols
        )));
    }
    let comp = d_out.mul(d_in)?;
    if !comp.is_zero() {
        return Err(LinalgError::CompositionNotZero {
            nonzero: comp.nnz(),
        });
    }
    Ok(d_out.cols - rank(d_out) - rank(d_in))
}

/// An incrementally built echelon basis whose vectors remember which of the
/// inserted "tagged" vectors they are combinations of.  Used to express a
/// vector in a chosen basis modulo an untagged subspace, e.g. homology
/// classes modulo boundaries.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    tag_len: usize,
    pivots: BTreeMap<usize, (F2Vector, F2Vector)>,
}

impl Echelon {
    pub fn new(dim: usize, tag_len: usize) -> Self {
        Echelon {
            dim,
            tag_len,
            pivots: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Reduces `v` against the basis.  Returns the remainder and the tag of
    /// the combination that was subtracted.
    pub fn reduce(&self, v: &F2Vector) -> (F2Vector, F2Vector) {
        let mut rem = v.clone();
        let mut tag = F2Vector::zeros(self.tag_len);
        let mut start = 0;
        while let Some(p) = first_one_from(&rem, start) {
            if let Some((basis, btag)) = self.pivots.get(&p) {
                rem.xor_assign(basis);
                tag.xor_assign(btag);
            }
            start = p + 1;
        }
        (rem, tag)
    }

    pub fn contains(&self, v: &F2Vector) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Inserts an untagged vector; returns whether it enlarged the span.
    pub fn insert(&mut self, v: &F2Vector) -> bool {
        self.insert_tagged(v, &F2Vector::zeros(self.tag_len))
    }

    /// Inserts a vector carrying the given tag; returns whether it enlarged
    /// the span.
    pub fn insert_tagged(&mut self, v: &F2Vector, tag: &F2Vector) -> bool {
        let (rem, sub) = self.reduce(v);
        match rem.first_one() {
            None => false,
            Some(p) => {
                let mut t = tag.clone();
                t.xor_assign(&sub);
                self.pivots.insert(p, (rem, t));
                true
            }
        }
    }
}

fn first_one_from(v: &F2Vector, start: usize) -> Option<usize> {
    (start..v.len()).find(|&i| v.get(i))
}
