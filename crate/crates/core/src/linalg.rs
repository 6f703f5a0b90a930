//! Exact linear algebra over F₂.
//!
//! Matrices are stored column-wise as packed bit vectors. Elimination is
//! column-major: each column is reduced against the pivots found so far,
//! where the pivot of a column is its first set bit.

use std::fmt;

const WORD: usize = 64;

/// A packed vector over F₂.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; len.div_ceil(WORD)] }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_ones<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut v = BitVec::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD + t)
                }
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// A matrix over F₂.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        BitMatrix { rows, cols, columns: vec![BitVec::zeros(rows); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from its set positions. Repeated positions cancel.
    pub fn from_entries<I: IntoIterator<Item = (usize, usize)>>(rows: usize, cols: usize, entries: I) -> Self {
        let mut m = BitMatrix::zero(rows, cols);
        for (r, c) in entries {
            m.columns[c].flip(r);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = BitMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x & 1 == 1);
            }
        }
        m
    }

    pub fn from_columns(rows: usize, columns: Vec<BitVec>) -> Self {
        assert!(columns.iter().all(|c| c.len() == rows));
        BitMatrix { rows, cols: columns.len(), columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.columns[c].get(r)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.columns[c].set(r, value);
    }

    pub fn column(&self, c: usize) -> &BitVec {
        &self.columns[c]
    }

    pub fn push_column(&mut self, col: BitVec) {
        assert_eq!(col.len(), self.rows);
        self.columns.push(col);
        self.cols += 1;
    }

    /// Set positions in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.columns.iter().enumerate().flat_map(|(c, col)| col.ones().map(move |r| (r, c)))
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix::from_entries(self.cols, self.rows, self.entries().map(|(r, c)| (c, r)))
    }

    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols);
        let mut out = BitVec::zeros(self.rows);
        for c in x.ones() {
            out.xor_assign(&self.columns[c]);
        }
        out
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows);
        BitMatrix {
            rows: self.rows,
            cols: other.cols,
            columns: other.columns.iter().map(|c| self.mul_vec(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(BitVec::is_zero)
    }

    pub fn rank(&self) -> usize {
        ImageBasis::new(self).rank()
    }

    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        ImageBasis::new(self).solve(b)
    }

    pub fn in_image(&self, b: &BitVec) -> bool {
        ImageBasis::new(self).contains(b)
    }
}

/// A reduced basis for the column space of a matrix, remembering how each
/// reduced column was assembled from the original ones so that membership
/// queries can return a preimage.
#[derive(Clone, Debug)]
pub struct ImageBasis {
    rows: usize,
    cols: usize,
    /// `pivot_of_row[r]` is the reduced column whose first set bit is `r`.
    pivot_of_row: Vec<Option<usize>>,
    reduced: Vec<BitVec>,
    combos: Vec<BitVec>,
}

impl ImageBasis {
    pub fn new(m: &BitMatrix) -> Self {
        let mut basis = ImageBasis::empty(m.rows, m.cols);
        for (j, col) in m.columns.iter().enumerate() {
            basis.insert(col.clone(), BitVec::from_ones(m.cols, [j]));
        }
        basis
    }

    /// An empty basis that will accept up to `cols` columns of height `rows`.
    pub fn empty(rows: usize, cols: usize) -> Self {
        ImageBasis { rows, cols, pivot_of_row: vec![None; rows], reduced: Vec::new(), combos: Vec::new() }
    }

    /// Adds original column `j` (0-based, `j < cols`).
    pub fn add_column(&mut self, j: usize, col: BitVec) {
        assert_eq!(col.len(), self.rows);
        self.insert(col, BitVec::from_ones(self.cols, [j]));
    }

    fn insert(&mut self, mut v: BitVec, mut combo: BitVec) {
        while let Some(p) = v.first_one() {
            match self.pivot_of_row[p] {
                Some(k) => {
                    v.xor_assign(&self.reduced[k]);
                    combo.xor_assign(&self.combos[k]);
                }
                None => {
                    self.pivot_of_row[p] = Some(self.reduced.len());
                    self.reduced.push(v);
                    self.combos.push(combo);
                    return;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.reduced.len()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Some `x` with `M x = b`, or `None` when `b` is not in the column span.
    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        assert_eq!(b.len(), self.rows, "right-hand side has the wrong length");
        let mut v = b.clone();
        let mut x = BitVec::zeros(self.cols);
        while let Some(p) = v.first_one() {
            let k = self.pivot_of_row[p]?;
            v.xor_assign(&self.reduced[k]);
            x.xor_assign(&self.combos[k]);
        }
        Some(x)
    }

    pub fn contains(&self, b: &BitVec) -> bool {
        assert_eq!(b.len(), self.rows, "right-hand side has the wrong length");
        let mut v = b.clone();
        while let Some(p) = v.first_one() {
            match self.pivot_of_row[p] {
                Some(k) => v.xor_assign(&self.reduced[k]),
                None => return false,
            }
        }
        true
    }
}
