//! Classical binary linear codes defined by parity checks.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2::{BitMatrix, BitVec};

/// Largest dimension for which codewords are enumerated exhaustively.
pub const MAX_ENUM_DIMENSION: usize = 24;

/// A code distance; `Infinite` stands for codes without nonzero codewords.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Distance::Infinite)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

/// The kernel of a parity-check matrix `H`, with a generator matrix `G`.
///
/// `H` is kept verbatim, redundant rows included.
#[derive(Clone, Debug)]
pub struct LinearCode {
    h: BitMatrix,
    g: BitMatrix,
    distance: OnceLock<Distance>,
}

impl LinearCode {
    /// `C = ker(H)` with the elimination-canonical kernel basis as generator.
    pub fn from_checks(h: BitMatrix) -> Self {
        let g = h.kernel_basis();
        Self {
            h,
            g,
            distance: OnceLock::new(),
        }
    }

    /// Uses a caller-supplied generator, which must be a basis of `ker(H)`.
    pub fn with_generator(h: BitMatrix, g: BitMatrix) -> Result<Self> {
        if g.cols() != h.cols() {
            return Err(Error::Dimension {
                op: "with_generator",
                lhs: h.shape(),
                rhs: g.shape(),
            });
        }
        let k = h.cols() - h.rank();
        if g.rank() != k || g.rows() != k {
            return Err(Error::Parameter(format!(
                "generator has {} rows of rank {}, expected {k} independent rows",
                g.rows(),
                g.rank()
            )));
        }
        if !h.mul(&g.transpose())?.is_zero() {
            return Err(Error::Parameter("generator rows are not codewords".into()));
        }
        Ok(Self {
            h,
            g,
            distance: OnceLock::new(),
        })
    }

    /// The code spanned by the rows of `m` (e.g. the row space of a BBS matrix).
    pub fn from_span(m: &BitMatrix) -> Self {
        let g = m.row_basis();
        let h = g.kernel_basis();
        Self {
            h,
            g,
            distance: OnceLock::new(),
        }
    }

    pub fn checks(&self) -> &BitMatrix {
        &self.h
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.g
    }

    pub fn n(&self) -> usize {
        self.h.cols()
    }

    pub fn k(&self) -> usize {
        self.g.rows()
    }

    /// Number of parity checks, redundant ones included.
    pub fn m(&self) -> usize {
        self.h.rows()
    }

    pub fn contains(&self, w: &BitVec) -> bool {
        self.h.mul_vec(w).is_zero()
    }

    /// Minimum distance, computed once by exhaustive enumeration and cached.
    pub fn distance(&self) -> Result<Distance> {
        if let Some(d) = self.distance.get() {
            return Ok(*d);
        }
        let d = min_distance_bruteforce(self)?;
        Ok(*self.distance.get_or_init(|| d))
    }

    pub fn cached_distance(&self) -> Option<Distance> {
        self.distance.get().copied()
    }

    pub fn transpose_code(&self) -> TransposeCode {
        TransposeCode {
            code: LinearCode::from_checks(self.h.transpose()),
        }
    }

    pub fn ldpc_profile(&self) -> LdpcProfile {
        ldpc_profile(&self.h)
    }
}

/// Minimum Hamming weight over the `2ᵏ − 1` nonzero codewords.
///
/// Walks the codewords in Gray-code order.
pub fn min_distance_bruteforce(code: &LinearCode) -> Result<Distance> {
    let k = code.k();
    if k == 0 {
        return Ok(Distance::Infinite);
    }
    if k > MAX_ENUM_DIMENSION {
        return Err(Error::Capacity {
            what: "codeword enumeration",
            size: 1u128 << k,
            limit: 1u128 << MAX_ENUM_DIMENSION,
        });
    }
    let mut best = usize::MAX;
    code.generator().for_each_combination(|w| best = best.min(w.weight()));
    Ok(Distance::Finite(best))
}

/// The code `ker(Hᵀ)`; its codewords are linear dependencies among checks.
#[derive(Clone, Debug)]
pub struct TransposeCode {
    code: LinearCode,
}

impl TransposeCode {
    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn k(&self) -> usize {
        self.code.k()
    }

    pub fn distance(&self) -> Result<Distance> {
        self.code.distance()
    }

    /// Generator of the transpose code (`F` in the hypergraph product).
    pub fn generator(&self) -> &BitMatrix {
        self.code.generator()
    }
}

/// Maximum column weight `b` and row weight `c` of a check matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LdpcProfile {
    pub b: usize,
    pub c: usize,
}

pub fn ldpc_profile(h: &BitMatrix) -> LdpcProfile {
    LdpcProfile {
        b: (0..h.cols()).map(|j| h.col_weight(j)).max().unwrap_or(0),
        c: (0..h.rows()).map(|i| h.row_weight(i)).max().unwrap_or(0),
    }
}

/// The `(n−1) × n` bidiagonal check matrix of the length-`n` repetition code.
pub fn repetition_checks(n: usize) -> BitMatrix {
    let mut h = BitMatrix::zeros(n.saturating_sub(1), n);
    for i in 0..n.saturating_sub(1) {
        h.set(i, i, true);
        h.set(i, i + 1, true);
    }
    h
}

/// The cyclic `n × n` repetition-code checks (one redundant row).
pub fn cyclic_repetition_checks(n: usize) -> BitMatrix {
    let mut h = repetition_checks(n).vstack(&BitMatrix::zeros(1, n)).expect("same width");
    h.set(n - 1, 0, true);
    h.set(n - 1, n - 1, true);
    h
}

pub fn repetition_code(n: usize) -> Result<LinearCode> {
    if n < 2 {
        return Err(Error::Parameter(format!("repetition code needs n >= 2, got {n}")));
    }
    LinearCode::with_generator(repetition_checks(n), BitMatrix::ones(1, n))
}

pub fn hamming_checks() -> BitMatrix {
    BitMatrix::from_strs(&["1101100", "1011010", "0111001"])
}

pub fn hamming_generator() -> BitMatrix {
    BitMatrix::from_strs(&["1000110", "0100101", "0010011", "0001111"])
}

/// The [7,4,3] Hamming code with the systematic `H` and `G` pair.
pub fn hamming_code() -> LinearCode {
    LinearCode::with_generator(hamming_checks(), hamming_generator()).expect("valid Hamming pair")
}

/// Parses the alist sparse format.
///
/// Layout: `n m` (columns, rows), then the maximum column and row degrees,
/// then the `n` column degrees, the `m` row degrees, `n` lines of 1-indexed
/// row indices per column and `m` lines of 1-indexed column indices per row.
/// Zero entries are treated as padding.
pub fn read_alist(text: &str) -> Result<BitMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let mut next_numbers = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| Error::parse(0, 1, format!("unexpected end of input reading {what}")))?;
        let mut out = Vec::new();
        let mut col = 1;
        for tok in line.split_whitespace() {
            let pos = line[col - 1..].find(tok).map_or(col, |p| col + p);
            let v = tok
                .parse::<usize>()
                .map_err(|_| Error::parse(lno, pos, format!("invalid integer {tok:?} in {what}")))?;
            out.push(v);
            col = pos + tok.len();
        }
        Ok((lno, out))
    };

    let (lno, header) = next_numbers("header")?;
    let [n, m] = header[..] else {
        return Err(Error::parse(lno, 1, "header must be `n m`"));
    };
    let (lno, maxes) = next_numbers("maximum degrees")?;
    if maxes.len() != 2 {
        return Err(Error::parse(lno, 1, "expected two maximum degrees"));
    }
    let (lno, col_deg) = next_numbers("column degrees")?;
    if col_deg.len() != n {
        return Err(Error::parse(lno, 1, format!("expected {n} column degrees")));
    }
    let (lno, row_deg) = next_numbers("row degrees")?;
    if row_deg.len() != m {
        return Err(Error::parse(lno, 1, format!("expected {m} row degrees")));
    }

    let mut h = BitMatrix::zeros(m, n);
    for (j, &deg) in col_deg.iter().enumerate() {
        let (lno, entries) = next_numbers("column adjacency")?;
        let entries: Vec<usize> = entries.into_iter().filter(|&v| v != 0).collect();
        if entries.len() != deg {
            return Err(Error::parse(lno, 1, format!("column {} lists {} rows, degree says {deg}", j + 1, entries.len())));
        }
        for r in entries {
            if r > m {
                return Err(Error::parse(lno, 1, format!("row index {r} out of range")));
            }
            h.set(r - 1, j, true);
        }
    }
    for (i, &deg) in row_deg.iter().enumerate() {
        let (lno, entries) = next_numbers("row adjacency")?;
        let entries: Vec<usize> = entries.into_iter().filter(|&v| v != 0).collect();
        if entries.len() != deg {
            return Err(Error::parse(lno, 1, format!("row {} lists {} columns, degree says {deg}", i + 1, entries.len())));
        }
        for c in entries {
            if c > n || !h.get(i, c - 1) {
                return Err(Error::parse(lno, 1, format!("row {} entry {c} disagrees with column lists", i + 1)));
            }
        }
    }
    Ok(h)
}

pub fn write_alist(h: &BitMatrix) -> String {
    let (m, n) = h.shape();
    let ht = h.transpose();
    let col_deg: Vec<usize> = (0..n).map(|j| ht.row_weight(j)).collect();
    let row_deg: Vec<usize> = (0..m).map(|i| h.row_weight(i)).collect();
    // empty adjacency lists are written as a single 0 so no line is blank
    let join = |v: &mut dyn Iterator<Item = usize>| {
        let s = v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        if s.is_empty() { "0".to_string() } else { s }
    };
    let mut s = format!("{n} {m}\n");
    s += &format!(
        "{} {}\n",
        col_deg.iter().max().copied().unwrap_or(0),
        row_deg.iter().max().copied().unwrap_or(0)
    );
    s += &join(&mut col_deg.iter().copied());
    s.push('\n');
    s += &join(&mut row_deg.iter().copied());
    s.push('\n');
    for j in 0..n {
        s += &join(&mut ht.row_support(j).map(|r| r + 1));
        s.push('\n');
    }
    for i in 0..m {
        s += &join(&mut h.row_support(i).map(|c| c + 1));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent distance oracle: smallest weight `w` for which some
    /// support of size `w` satisfies every check.
    fn distance_by_support_weight(h: &BitMatrix) -> Distance {
        let n = h.cols();
        for w in 1..=n {
            let mut found = false;
            for mask in 0u32..(1u32 << n) {
                if mask.count_ones() as usize == w {
                    let v = BitVec::from_support(n, (0..n).filter(|i| mask >> i & 1 == 1));
                    if h.mul_vec(&v).is_zero() {
                        found = true;
                        break;
                    }
                }
            }
            if found {
                return Distance::Finite(w);
            }
        }
        Distance::Infinite
    }

    #[test]
    fn from_checks_examples() {
        let rep = LinearCode::from_checks(repetition_checks(3));
        assert_eq!((rep.n(), rep.k()), (3, 1));
        assert_eq!(rep.generator(), &BitMatrix::from_strs(&["111"]));

        let ham = LinearCode::from_checks(hamming_checks());
        assert_eq!((ham.n(), ham.k()), (7, 4));

        let free = LinearCode::from_checks(BitMatrix::zeros(0, 4));
        assert_eq!(free.k(), 4);
        assert_eq!(free.generator(), &BitMatrix::identity(4));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(repetition_code(5).unwrap().distance().unwrap(), Distance::Finite(5));
        assert_eq!(hamming_code().distance().unwrap(), Distance::Finite(3));
        let c = LinearCode::with_generator(BitMatrix::zeros(0, 2), BitMatrix::identity(2)).unwrap();
        assert_eq!(c.distance().unwrap(), Distance::Finite(1));
        let trivial = LinearCode::from_checks(BitMatrix::identity(3));
        assert_eq!(trivial.distance().unwrap(), Distance::Infinite);
    }

    #[test]
    fn distance_capacity_guard() {
        let big = LinearCode::from_checks(BitMatrix::zeros(0, 25));
        assert!(matches!(min_distance_bruteforce(&big), Err(Error::Capacity { .. })));
    }

    #[test]
    fn distance_matches_support_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(2..=12);
            let m = rng.gen_range(1..=n);
            let h = BitMatrix::random(m, n, &mut rng);
            let code = LinearCode::from_checks(h.clone());
            assert_eq!(code.distance().unwrap(), distance_by_support_weight(&h), "{h:?}");
        }
    }

    #[test]
    fn transpose_examples() {
        let rep = repetition_code(3).unwrap();
        let t = rep.transpose_code();
        assert_eq!((t.n(), t.k()), (2, 0));
        assert_eq!(t.distance().unwrap(), Distance::Infinite);

        let toric = LinearCode::from_checks(cyclic_repetition_checks(3));
        let t = toric.transpose_code();
        assert_eq!((t.n(), t.k()), (3, 1));
        assert_eq!(t.distance().unwrap(), Distance::Finite(3));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let h = BitMatrix::random(rng.gen_range(0..7), rng.gen_range(1..9), &mut rng);
            let c = LinearCode::from_checks(h);
            let t = c.transpose_code();
            assert_eq!(c.n() as isize - c.k() as isize, t.n() as isize - t.k() as isize);
            // transposing again through the same matrix recovers the original parameters
            let tt = t.code().transpose_code();
            assert_eq!((tt.n(), tt.k()), (c.n(), c.k()));
        }
    }

    #[test]
    fn named_families() {
        assert_eq!(repetition_code(3).unwrap().checks(), &BitMatrix::from_strs(&["110", "011"]));
        assert_eq!(ldpc_profile(&repetition_checks(3)), LdpcProfile { b: 2, c: 2 });
        assert_eq!(ldpc_profile(&hamming_checks()), LdpcProfile { b: 3, c: 4 });
        let ham = hamming_code();
        assert!(ham.checks().mul(&ham.generator().transpose()).unwrap().is_zero());
        assert!(repetition_code(1).is_err());
    }

    #[test]
    fn generator_invariants_on_random_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..40 {
            let h = BitMatrix::random(rng.gen_range(0..8), rng.gen_range(1..12), &mut rng);
            let c = LinearCode::from_checks(h.clone());
            assert!(h.mul(&c.generator().transpose()).unwrap().is_zero());
            assert_eq!(c.generator().rank(), c.k());
            assert_eq!(c.k(), c.n() - h.rank());
        }
    }

    #[test]
    fn alist_roundtrip_and_errors() {
        let h = hamming_checks();
        let text = write_alist(&h);
        assert!(text.starts_with("7 3\n3 4\n"));
        assert_eq!(read_alist(&text).unwrap(), h);

        let padded = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n";
        assert_eq!(read_alist(padded).unwrap(), repetition_checks(3));

        let bad = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 3\n2 3\n";
        assert!(matches!(read_alist(bad), Err(Error::Parse { line: 8, .. })));
        assert!(matches!(read_alist("3 x\n"), Err(Error::Parse { line: 1, column: 3, .. })));
    }
}
