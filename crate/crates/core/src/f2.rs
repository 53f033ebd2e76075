//! Dense, bit-packed linear algebra over GF(2).
//!
//! Matrices are stored row-major with each row padded to a whole number of
//! 64-bit words. Bits past `cols` in the last word of a row are always zero,
//! so row operations can work word-at-a-time without masking.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
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

    /// Builds a vector from the indices of its set bits.
    pub fn from_support(len: usize, support: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in support {
            v.set(i, true);
        }
        v
    }

    /// Parses a string of `0`/`1` characters; other characters are rejected.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for (col, ch) in s.chars().enumerate() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                other => {
                    return Err(Error::parse(1, col + 1, format!("unexpected character {other:?}")))
                }
            }
        }
        Ok(Self::from_bits(&bits))
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
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        BitVec {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
            len: self.len,
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        let parity: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        parity & 1 == 1
    }

    /// Indices of set bits in increasing order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let tz = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.support().next()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Concatenation `self | other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.support() {
            out.set(i, true);
        }
        for i in other.support() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec(")?;
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// The all-ones matrix.
    pub fn ones(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, true);
            }
        }
        m
    }

    /// Square matrix with `v` on the diagonal.
    pub fn diag(v: &BitVec) -> Self {
        let mut m = Self::zeros(v.len(), v.len());
        for i in v.support() {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of `0`/`1` values. Panics on ragged input.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &b) in r.iter().enumerate() {
                if b & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from strings such as `"110"`. Panics on malformed input;
    /// intended for literals in code and tests.
    pub fn from_strs(rows: &[&str]) -> Self {
        let parsed: Vec<Vec<u8>> = rows
            .iter()
            .map(|r| {
                r.bytes()
                    .map(|c| match c {
                        b'0' => 0,
                        b'1' => 1,
                        _ => panic!("invalid matrix literal {r:?}"),
                    })
                    .collect()
            })
            .collect();
        Self::from_rows(&parsed)
    }

    /// Stacks bit vectors of equal length as rows. `cols` is used when `rows` is empty.
    pub fn from_bitvecs(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            m.set_row(i, r);
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

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        (self.data[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let idx = i * self.stride + j / WORD;
        let mask = 1u64 << (j % WORD);
        if value {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        self.data[i * self.stride + j / WORD] ^= 1u64 << (j % WORD);
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec {
            words: self.row_words(i).to_vec(),
            len: self.cols,
        }
    }

    pub fn set_row(&mut self, i: usize, v: &BitVec) {
        assert_eq!(v.len(), self.cols, "row length mismatch");
        self.row_words_mut(i).copy_from_slice(v.words());
    }

    pub fn column(&self, j: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn row_iter(&self) -> impl Iterator<Item = BitVec> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// `row[dst] ^= row[src]`.
    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        if src == dst {
            self.row_words_mut(dst).fill(0);
            return;
        }
        let stride = self.stride;
        let (s, d) = (src * stride, dst * stride);
        for k in 0..stride {
            let w = self.data[s + k];
            self.data[d + k] ^= w;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn col_weight(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, j)).count()
    }

    /// Number of ones in the matrix.
    pub fn weight(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row_support(i) {
                t.set(j, i, true);
            }
        }
        t
    }

    pub fn row_support(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(i).iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let tz = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                op: "multiply",
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let mut acc = vec![0u64; other.stride];
            for k in self.row_support(i) {
                for (a, b) in acc.iter_mut().zip(other.row_words(k)) {
                    *a ^= b;
                }
            }
            out.row_words_mut(i).copy_from_slice(&acc);
        }
        Ok(out)
    }

    /// Elementwise sum over GF(2).
    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix> {
        self.zip_words(other, "add", |a, b| a ^ b)
    }

    /// Elementwise product, i.e. the intersection of supports.
    pub fn pointwise_and(&self, other: &BitMatrix) -> Result<BitMatrix> {
        self.zip_words(other, "pointwise_and", |a, b| a & b)
    }

    fn zip_words(
        &self,
        other: &BitMatrix,
        op: &'static str,
        f: impl Fn(u64, u64) -> u64,
    ) -> Result<BitMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension {
                op,
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a = f(*a, b);
        }
        Ok(out)
    }

    /// `M · v` for a column vector `v`.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "mul_vec length mismatch");
        let mut out = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            let parity: u32 = self
                .row_words(i)
                .iter()
                .zip(v.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            if parity & 1 == 1 {
                out.set(i, true);
            }
        }
        out
    }

    /// `v · M` for a row vector `v`, i.e. the combination of rows selected by `v`.
    pub fn vec_mul(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.rows, "vec_mul length mismatch");
        let mut out = BitVec::zeros(self.cols);
        for i in v.support() {
            for (a, b) in out.words.iter_mut().zip(self.row_words(i)) {
                *a ^= b;
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let (r1, c1) = self.shape();
        let (r2, c2) = other.shape();
        let mut out = BitMatrix::zeros(r1 * r2, c1 * c2);
        for i in 0..r1 {
            for j in self.row_support(i) {
                for k in 0..r2 {
                    for l in other.row_support(k) {
                        out.set(i * r2 + k, j * c2 + l, true);
                    }
                }
            }
        }
        out
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension {
                op: "hstack",
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        let mut out = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in self.row_support(i) {
                out.set(i, j, true);
            }
            for j in other.row_support(i) {
                out.set(i, self.cols + j, true);
            }
        }
        Ok(out)
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension {
                op: "vstack",
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(BitMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        })
    }

    pub fn push_row(&mut self, v: &BitVec) {
        assert_eq!(v.len(), self.cols, "row length mismatch");
        self.data.extend_from_slice(v.words());
        self.rows += 1;
    }

    pub fn select_rows(&self, indices: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(indices.len(), self.cols);
        for (dst, &src) in indices.iter().enumerate() {
            out.row_words_mut(dst).copy_from_slice(self.row_words(src));
        }
        out
    }

    pub fn select_cols(&self, indices: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, indices.len());
        for i in 0..self.rows {
            for (dst, &src) in indices.iter().enumerate() {
                if self.get(i, src) {
                    out.set(i, dst, true);
                }
            }
        }
        out
    }

    pub fn without_row(&self, index: usize) -> BitMatrix {
        let keep: Vec<usize> = (0..self.rows).filter(|&i| i != index).collect();
        self.select_rows(&keep)
    }

    /// GF(2) rank.
    pub fn rank(&self) -> usize {
        Echelon::new(self).rank()
    }

    /// Rows form a basis of the null space `{x : M xᵀ = 0}`.
    pub fn kernel_basis(&self) -> BitMatrix {
        let ech = Echelon::new(self);
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut out = BitMatrix::zeros(free.len(), self.cols);
        for (r, &f) in free.iter().enumerate() {
            out.set(r, f, true);
            for (row, &p) in ech.pivots.iter().enumerate() {
                if ech.basis.get(row, f) {
                    out.set(r, p, true);
                }
            }
        }
        out
    }

    /// True iff `v` is a GF(2) combination of rows.
    pub fn rowspace_contains(&self, v: &BitVec) -> bool {
        Echelon::new(self).contains(v)
    }

    /// A matrix whose rows are an independent basis of this row space.
    pub fn row_basis(&self) -> BitMatrix {
        Echelon::new(self).into_basis()
    }

    /// Calls `f` on each of the `2^rows − 1` nonzero row combinations, in
    /// Gray-code order so consecutive words differ by one row. Rows need not
    /// be independent. Panics for 64 or more rows.
    pub fn for_each_combination(&self, mut f: impl FnMut(&BitVec)) {
        assert!(self.rows < 64, "too many rows to enumerate");
        let rows: Vec<BitVec> = self.row_iter().collect();
        let mut word = BitVec::zeros(self.cols);
        for step in 1u64..(1u64 << self.rows) {
            word.xor_assign(&rows[step.trailing_zeros() as usize]);
            f(&word);
        }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            let v = BitVec::random(cols, rng);
            m.set_row(i, &v);
        }
        m
    }

    /// Uniformly random invertible `k × k` matrix by rejection sampling.
    pub fn random_invertible(k: usize, seed: u64) -> BitMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_invertible_with(k, &mut rng)
    }

    pub fn random_invertible_with<R: Rng + ?Sized>(k: usize, rng: &mut R) -> BitMatrix {
        loop {
            let m = BitMatrix::random(k, k, rng);
            if m.rank() == k {
                return m;
            }
        }
    }

    /// Parses the dense text format: a header line `R C` followed by `R`
    /// lines of exactly `C` characters from `{0,1}`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn from_dense_text(text: &str) -> Result<BitMatrix> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end()))
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, 1, "missing header line"))?;
        let mut fields = header.split_whitespace();
        let mut dim = |name: &str| -> Result<usize> {
            let tok = fields
                .next()
                .ok_or_else(|| Error::parse(hline, 1, format!("missing {name} in header")))?;
            tok.parse::<usize>()
                .map_err(|_| Error::parse(hline, 1, format!("invalid {name} {tok:?}")))
        };
        let rows = dim("row count")?;
        let cols = dim("column count")?;
        if fields.next().is_some() {
            return Err(Error::parse(hline, 1, "header must be `R C`"));
        }
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            let (lno, line) = lines
                .next()
                .ok_or_else(|| Error::parse(hline + r + 1, 1, format!("expected {rows} rows, found {r}")))?;
            let line = line.trim();
            let mut count = 0;
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '0' | '1' if c < cols => {
                        if ch == '1' {
                            m.set(r, c, true);
                        }
                    }
                    '0' | '1' => {
                        return Err(Error::parse(lno, c + 1, format!("row longer than {cols} columns")))
                    }
                    other => {
                        return Err(Error::parse(lno, c + 1, format!("unexpected character {other:?}")))
                    }
                }
                count += 1;
            }
            if count != cols {
                return Err(Error::parse(
                    lno,
                    count + 1,
                    format!("row has {count} entries, expected {cols}"),
                ));
            }
        }
        if let Some((lno, _)) = lines.next() {
            return Err(Error::parse(lno, 1, format!("more than {rows} rows")));
        }
        Ok(m)
    }

    pub fn to_dense_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                s.push(if self.get(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{}", self.get(i, j) as u8)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form of a matrix, used for rank, membership and
/// reduction modulo a row space. Built from a copy; the input is untouched.
#[derive(Clone, Debug)]
pub struct Echelon {
    basis: BitMatrix,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(m: &BitMatrix) -> Self {
        let mut a = m.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| a.get(i, c)) else {
                continue;
            };
            a.swap_rows(r, p);
            for i in 0..a.rows {
                if i != r && a.get(i, c) {
                    a.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let basis = a.select_rows(&(0..r).collect::<Vec<_>>());
        Echelon { basis, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> &BitMatrix {
        &self.basis
    }

    pub fn into_basis(self) -> BitMatrix {
        self.basis
    }

    /// Canonical representative of `v` modulo the row space.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut out = v.clone();
        for (row, &p) in self.pivots.iter().enumerate() {
            if out.get(p) {
                for (a, b) in out.words.iter_mut().zip(self.basis.row_words(row)) {
                    *a ^= b;
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.basis.cols(), "vector length mismatch");
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span if it is independent. Returns whether the rank grew.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.first_one() else {
            return false;
        };
        for i in 0..self.basis.rows() {
            if self.basis.get(i, p) {
                for k in 0..self.basis.stride {
                    let w = r.words[k];
                    self.basis.data[i * self.basis.stride + k] ^= w;
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(pos, p);
        let mut rows: Vec<BitVec> = self.basis.row_iter().collect();
        rows.insert(pos, r);
        self.basis = BitMatrix::from_bitvecs(self.basis.cols(), &rows);
        true
    }
}
