//! Dense bit-packed linear algebra over GF(2).
//!
//! Rows are stored as little-endian `u64` words: column `c` of a row lives in
//! word `c / 64`, bit `c % 64`. Padding bits past `n_cols` are always zero,
//! which lets equality, popcounts and XORs work on whole words.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Iterator over the set bit positions of a packed word slice.
pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> Ones<'a> {
    fn new(words: &'a [u64]) -> Self {
        Ones {
            words,
            idx: 0,
            cur: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + tz);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

/// A binary vector of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinVector {
    len: usize,
    words: Vec<u64>,
}

impl BinVector {
    pub fn zeros(len: usize) -> Self {
        BinVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Vector of length `len` with ones at `positions`.
    pub fn from_ones(len: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for p in positions {
            v.set(p, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters. Whitespace is ignored.
    pub fn parse_bitstring(s: &str) -> Result<Self> {
        let mut bits = Vec::new();
        for (i, ch) in s.chars().filter(|c| !c.is_whitespace()).enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("invalid bit {other:?} at position {i}"),
                    })
                }
            }
        }
        Ok(Self::from_bools(&bits))
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> Ones<'_> {
        Ones::new(&self.words)
    }

    pub fn xor(&self, other: &BinVector) -> Result<BinVector> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch(format!(
                "vector lengths {} and {}",
                self.len, other.len
            )));
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(BinVector {
            len: self.len,
            words,
        })
    }

    /// Parity of the inner product with a packed row of the same length.
    #[inline]
    fn dot_words(&self, row: &[u64]) -> bool {
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(row) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }
}

impl fmt::Debug for BinVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinVector({})", self.to_bitstring())
    }
}

/// Row-major bit-packed binary matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    n_rows: usize,
    n_cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BinMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        let stride = words_for(n_cols);
        BinMatrix {
            n_rows,
            n_cols,
            stride,
            data: vec![0; n_rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries. Any nonzero entry counts as 1.
    pub fn from_dense<R: AsRef<[u8]>>(n_cols: usize, rows: &[R]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), n_cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {n_cols}",
                    row.len()
                )));
            }
            for (j, &b) in row.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from per-row lists of column positions.
    pub fn from_supports<R: AsRef<[usize]>>(n_cols: usize, rows: &[R]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), n_cols);
        for (i, row) in rows.iter().enumerate() {
            for &j in row.as_ref() {
                if j >= n_cols {
                    return Err(Error::DimensionMismatch(format!(
                        "row {i} references column {j} of {n_cols}"
                    )));
                }
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n_rows && j < self.n_cols);
        (self.data[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n_rows && j < self.n_cols);
        let w = &mut self.data[i * self.stride + j / WORD];
        let mask = 1u64 << (j % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// Packed words of row `i`.
    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BinVector {
        BinVector {
            len: self.n_cols,
            words: self.row_words(i).to_vec(),
        }
    }

    /// Column positions of the ones in row `i`, ascending.
    pub fn row_ones(&self, i: usize) -> Ones<'_> {
        Ones::new(self.row_words(i))
    }

    /// The sparse row-support index: sorted one-positions of every row.
    pub fn row_supports(&self) -> Vec<Vec<usize>> {
        (0..self.n_rows)
            .map(|i| self.row_ones(i).collect())
            .collect()
    }

    /// Sorted row positions of the ones in every column.
    pub fn col_supports(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.n_cols];
        for i in 0..self.n_rows {
            for j in self.row_ones(i) {
                cols[j].push(i);
            }
        }
        cols
    }

    pub fn row_weights(&self) -> Vec<usize> {
        (0..self.n_rows)
            .map(|i| {
                self.row_words(i)
                    .iter()
                    .map(|w| w.count_ones() as usize)
                    .sum()
            })
            .collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.n_cols];
        for i in 0..self.n_rows {
            for j in self.row_ones(i) {
                w[j] += 1;
            }
        }
        w
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = BinVector> + '_ {
        (0..self.n_rows).map(move |i| self.row(i))
    }

    /// Vertical concatenation. All blocks must share a column count.
    pub fn vstack<'a>(
        n_cols: usize,
        blocks: impl IntoIterator<Item = &'a BinMatrix>,
    ) -> Result<Self> {
        let stride = words_for(n_cols);
        let mut data = Vec::new();
        let mut n_rows = 0;
        for b in blocks {
            if b.n_cols != n_cols {
                return Err(Error::DimensionMismatch(format!(
                    "cannot stack {} columns onto {n_cols}",
                    b.n_cols
                )));
            }
            data.extend_from_slice(&b.data);
            n_rows += b.n_rows;
        }
        Ok(BinMatrix {
            n_rows,
            n_cols,
            stride,
            data,
        })
    }

    /// Horizontal concatenation. All blocks must share a row count.
    pub fn hstack(blocks: &[BinMatrix]) -> Result<Self> {
        let n_rows = blocks.first().map_or(0, |b| b.n_rows);
        if let Some(b) = blocks.iter().find(|b| b.n_rows != n_rows) {
            return Err(Error::DimensionMismatch(format!(
                "cannot join {} rows beside {n_rows}",
                b.n_rows
            )));
        }
        let n_cols = blocks.iter().map(|b| b.n_cols).sum();
        let mut m = Self::zeros(n_rows, n_cols);
        let mut offset = 0;
        for b in blocks {
            for i in 0..n_rows {
                for j in b.row_ones(i) {
                    m.set(i, offset + j, true);
                }
            }
            offset += b.n_cols;
        }
        Ok(m)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in self.row_ones(i) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Returns the matrix whose column `perm[j]` is column `j` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n_cols)?;
        let mut m = Self::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            for j in self.row_ones(i) {
                m.set(i, perm[j], true);
            }
        }
        Ok(m)
    }

    /// Returns the matrix whose row `perm[i]` is row `i` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n_rows)?;
        let mut m = Self::zeros(self.n_rows, self.n_cols);
        for (i, &dst) in perm.iter().enumerate() {
            m.data[dst * self.stride..(dst + 1) * self.stride].copy_from_slice(self.row_words(i));
        }
        Ok(m)
    }

    /// Matrix-vector product `self · vᵀ`, e.g. a syndrome.
    pub fn mul_vec(&self, v: &BinVector) -> Result<BinVector> {
        if v.len() != self.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} against {} columns",
                v.len(),
                self.n_cols
            )));
        }
        let mut out = BinVector::zeros(self.n_rows);
        for i in 0..self.n_rows {
            if v.dot_words(self.row_words(i)) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "permutation of length {} applied to {n} positions",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidConfig(format!("not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinMatrix {}x{}", self.n_rows, self.n_cols)?;
        for i in 0..self.n_rows {
            writeln!(f, "  {}", self.row(i).to_bitstring())?;
        }
        Ok(())
    }
}

/// Row-reduces a packed row set in place, returning the pivot columns in
/// ascending order. On return the first `pivots.len()` rows form an echelon
/// basis whose leading one sits at the corresponding pivot.
fn echelonize(rows: &mut [Vec<u64>], n_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..n_cols {
        if top == rows.len() {
            break;
        }
        let (w, mask) = (col / WORD, 1u64 << (col % WORD));
        let Some(found) = (top..rows.len()).find(|&r| rows[r][w] & mask != 0) else {
            continue;
        };
        rows.swap(top, found);
        let (head, tail) = rows.split_at_mut(top + 1);
        let pivot_row = &head[top];
        for row in tail.iter_mut() {
            if row[w] & mask != 0 {
                for (a, b) in row[w..].iter_mut().zip(&pivot_row[w..]) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        top += 1;
    }
    pivots
}

fn packed_rows(m: &BinMatrix) -> Vec<Vec<u64>> {
    (0..m.n_rows).map(|i| m.row_words(i).to_vec()).collect()
}

/// Rank over GF(2).
pub fn rank(m: &BinMatrix) -> usize {
    let mut rows = packed_rows(m);
    echelonize(&mut rows, m.n_cols).len()
}

/// `a · bᵀ` over GF(2).
pub fn mul_transpose(a: &BinMatrix, b: &BinMatrix) -> Result<BinMatrix> {
    if a.n_cols != b.n_cols {
        return Err(Error::DimensionMismatch(format!(
            "a has {} columns, b has {}",
            a.n_cols, b.n_cols
        )));
    }
    let mut out = BinMatrix::zeros(a.n_rows, b.n_rows);
    for i in 0..a.n_rows {
        let ra = a.row_words(i);
        for j in 0..b.n_rows {
            let parity = ra
                .iter()
                .zip(b.row_words(j))
                .fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones());
            if parity & 1 == 1 {
                out.set(i, j, true);
            }
        }
    }
    Ok(out)
}

/// Whether `v` is a GF(2) combination of the rows of `m`.
pub fn in_rowspace(v: &BinVector, m: &BinMatrix) -> Result<bool> {
    RowSpace::new(m).contains(v)
}

/// Precomputed echelon basis for repeated row-space membership queries.
#[derive(Clone, Debug)]
pub struct RowSpace {
    n_cols: usize,
    pivots: Vec<usize>,
    basis: Vec<Vec<u64>>,
}

impl RowSpace {
    pub fn new(m: &BinMatrix) -> Self {
        let mut rows = packed_rows(m);
        let pivots = echelonize(&mut rows, m.n_cols);
        rows.truncate(pivots.len());
        RowSpace {
            n_cols: m.n_cols,
            pivots,
            basis: rows,
        }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn contains(&self, v: &BinVector) -> Result<bool> {
        if v.len() != self.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} against {} columns",
                v.len(),
                self.n_cols
            )));
        }
        let mut acc = v.words.clone();
        for (&col, row) in self.pivots.iter().zip(&self.basis) {
            let w = col / WORD;
            if (acc[w] >> (col % WORD)) & 1 == 1 {
                for (a, b) in acc[w..].iter_mut().zip(&row[w..]) {
                    *a ^= b;
                }
            }
        }
        Ok(acc.iter().all(|&w| w == 0))
    }
}
