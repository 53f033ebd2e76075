//! Bravyi-Bacon-Shor codes BBS(A), their 2D-local augmented form aBBS(A),
//! and construction from a pair of classical codes.

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{Distance, LinearCode};
use crate::error::{Error, Result};
use crate::f2::{BitMatrix, BitVec};
use crate::pauli::{CodeParams, CssGroup, QubitLayout, SubsystemCode};

/// Lattice name of the BBS layout.
pub const LATTICE: &str = "L";
/// Lattice names of the aBBS layout.
pub const LATTICE_1: &str = "L1";
pub const LATTICE_2: &str = "L2";

/// Largest `k` for which [`minimize_weight_q`] enumerates all invertible `Q`.
pub const MAX_EXHAUSTIVE_K: usize = 4;

/// Removes all-zero rows and columns. Returns the reduced matrix and the
/// indices that were dropped.
pub fn strip_zero_lines(a: &BitMatrix) -> Result<(BitMatrix, Vec<usize>, Vec<usize>)> {
    if a.is_zero() {
        return Err(Error::Parameter("matrix has no nonzero entries".into()));
    }
    let (keep_r, drop_r): (Vec<usize>, Vec<usize>) = (0..a.rows()).partition(|&i| a.row_weight(i) > 0);
    let (keep_c, drop_c): (Vec<usize>, Vec<usize>) = (0..a.cols()).partition(|&j| a.col_weight(j) > 0);
    if !drop_r.is_empty() || !drop_c.is_empty() {
        warn!(
            "removing {} zero row(s) and {} zero column(s) from A",
            drop_r.len(),
            drop_c.len()
        );
    }
    Ok((a.select_rows(&keep_r).select_cols(&keep_c), drop_r, drop_c))
}

/// Data shared by BBS(A) and aBBS(A): the reduced matrix and its two codes.
#[derive(Clone, Debug)]
struct Classical {
    a: BitMatrix,
    removed_rows: Vec<usize>,
    removed_cols: Vec<usize>,
    c1: LinearCode,
    c2: LinearCode,
}

impl Classical {
    fn new(a: &BitMatrix) -> Result<Self> {
        let (a, removed_rows, removed_cols) = strip_zero_lines(a)?;
        Ok(Self {
            c1: LinearCode::from_span(&a.transpose()),
            c2: LinearCode::from_span(&a),
            a,
            removed_rows,
            removed_cols,
        })
    }

    fn distance(&self) -> Result<Distance> {
        Ok(self.c1.distance()?.min(self.c2.distance()?))
    }
}

macro_rules! classical_accessors {
    () => {
        /// The matrix after zero rows and columns were removed.
        pub fn a(&self) -> &BitMatrix {
            &self.cl.a
        }

        pub fn removed_rows(&self) -> &[usize] {
            &self.cl.removed_rows
        }

        pub fn removed_cols(&self) -> &[usize] {
            &self.cl.removed_cols
        }

        /// `C₁ = col(A)`, length `n₁`.
        pub fn c1(&self) -> &LinearCode {
            &self.cl.c1
        }

        /// `C₂ = row(A)`, length `n₂`.
        pub fn c2(&self) -> &LinearCode {
            &self.cl.c2
        }

        /// Parity checks of `C₁`; rows span `ker(Aᵀ)`.
        pub fn h1(&self) -> &BitMatrix {
            self.cl.c1.checks()
        }

        /// Parity checks of `C₂`; rows span `ker(A)`.
        pub fn h2(&self) -> &BitMatrix {
            self.cl.c2.checks()
        }

        pub fn code(&self) -> &SubsystemCode {
            &self.code
        }

        pub fn layout(&self) -> &QubitLayout {
            self.code.layout()
        }

        pub fn n(&self) -> usize {
            self.code.n()
        }

        /// `rank(A)`.
        pub fn k(&self) -> usize {
            self.cl.c2.k()
        }

        /// `min(d₁, d₂)` from the classical codes.
        pub fn distance(&self) -> Result<Distance> {
            self.cl.distance()
        }

        /// Distance against X-type logicals, `d₂`.
        pub fn distance_x(&self) -> Result<Distance> {
            self.cl.c2.distance()
        }

        /// Distance against Z-type logicals, `d₁`.
        pub fn distance_z(&self) -> Result<Distance> {
            self.cl.c1.distance()
        }

        pub fn params(&self) -> Result<CodeParams> {
            Ok(CodeParams {
                n: self.n(),
                k: self.k(),
                d: Some(self.distance()?),
            })
        }
    };
}

/// BBS(A): one qubit per nonzero entry of `A`.
#[derive(Clone, Debug)]
pub struct BbsCode {
    cl: Classical,
    code: SubsystemCode,
}

impl BbsCode {
    classical_accessors!();

    /// Global indices of the qubits in row `i`, left to right.
    pub fn row_qubits(&self, i: usize) -> Vec<usize> {
        let l = self.layout().lattice(LATTICE).expect("bbs lattice");
        (0..l.cols).filter_map(|j| l.site(i, j)).collect()
    }

    /// Global indices of the qubits in column `j`, top to bottom.
    pub fn col_qubits(&self, j: usize) -> Vec<usize> {
        let l = self.layout().lattice(LATTICE).expect("bbs lattice");
        (0..l.rows).filter_map(|i| l.site(i, j)).collect()
    }

    /// Rows `diag(r)A` for each check row `r` of `H₁`, flattened.
    pub fn x_stabilizer_rows(&self) -> BitMatrix {
        bbs_stabilizer_rows(&self.cl, self.layout()).0
    }

    /// Rows `A diag(c)` for each check row `c` of `H₂`, flattened.
    pub fn z_stabilizer_rows(&self) -> BitMatrix {
        bbs_stabilizer_rows(&self.cl, self.layout()).1
    }

    pub fn weight_bounds(&self) -> Result<WeightBounds> {
        let (n1, n2) = self.a().shape();
        let finite = |d: Distance| d.finite().unwrap_or(0);
        let (d, dx, dz) = (
            finite(self.distance()?),
            finite(self.distance_x()?),
            finite(self.distance_z()?),
        );
        Ok(WeightBounds {
            lower: d * n1.min(n2),
            middle: (dx * n1).min(dz * n2),
            weight: self.a().weight(),
            upper: n1 * n2,
        })
    }
}

/// `D·min(n₁,n₂) ≤ min(D_X n₁, D_Z n₂) ≤ |A| ≤ n₁n₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightBounds {
    pub lower: usize,
    pub middle: usize,
    pub weight: usize,
    pub upper: usize,
}

impl WeightBounds {
    pub fn holds(&self) -> bool {
        self.lower <= self.middle && self.middle <= self.weight && self.weight <= self.upper
    }
}

/// Builds BBS(A) with consecutive-pair XX gauge operators in columns and ZZ
/// in rows. Zero rows and columns of `A` are removed first.
pub fn bbs_from_matrix(a: &BitMatrix) -> Result<BbsCode> {
    let cl = Classical::new(a)?;
    let mut layout = QubitLayout::new();
    layout.add_lattice(LATTICE, &cl.a)?;
    let lat = layout.lattice(LATTICE).expect("just added");
    let n = layout.n();
    let (n1, n2) = cl.a.shape();
    let mut gx = BitMatrix::zeros(0, n);
    let mut gz = BitMatrix::zeros(0, n);
    for j in 0..n2 {
        let col: Vec<usize> = (0..n1).filter_map(|i| lat.site(i, j)).collect();
        for w in col.windows(2) {
            gx.push_row(&BitVec::from_support(n, [w[0], w[1]]));
        }
    }
    for i in 0..n1 {
        let row: Vec<usize> = (0..n2).filter_map(|j| lat.site(i, j)).collect();
        for w in row.windows(2) {
            gz.push_row(&BitVec::from_support(n, [w[0], w[1]]));
        }
    }
    let (sx, sz) = bbs_stabilizer_rows(&cl, &layout);
    let code = SubsystemCode::with_stabilizer(layout, CssGroup::new(gx, gz)?, CssGroup::new(sx, sz)?)?;
    Ok(BbsCode { cl, code })
}

fn bbs_stabilizer_rows(cl: &Classical, layout: &QubitLayout) -> (BitMatrix, BitMatrix) {
    let flat = |s: &BitMatrix| layout.support_from_matrix(LATTICE, s).expect("support inside A");
    let mut sx = BitMatrix::zeros(0, layout.n());
    for r in cl.c1.checks().row_iter() {
        sx.push_row(&flat(&BitMatrix::diag(&r).mul(&cl.a).expect("square diag")));
    }
    let mut sz = BitMatrix::zeros(0, layout.n());
    for c in cl.c2.checks().row_iter() {
        sz.push_row(&flat(&cl.a.mul(&BitMatrix::diag(&c)).expect("square diag")));
    }
    (sx, sz)
}

/// aBBS(A): BBS(A) spread over two overlaid lattices so that every gauge
/// generator is a nearest-neighbour pair or a single qubit.
#[derive(Clone, Debug)]
pub struct AbbsCode {
    cl: Classical,
    code: SubsystemCode,
}

/// Role of a qubit in the aBBS layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QubitType {
    /// Shared by both lattices, where `A_ij = 1`.
    Shared,
    /// Only in `L₁`, where `A_ij = 0`.
    FirstOnly,
    /// Only in `L₂`, where `A_ij = 0`.
    SecondOnly,
}

impl AbbsCode {
    classical_accessors!();

    pub fn qubit_type(&self, q: usize) -> QubitType {
        let pos = self.layout().positions(q);
        match pos.as_slice() {
            [_, _] => QubitType::Shared,
            [(name, _, _)] if *name == LATTICE_1 => QubitType::FirstOnly,
            _ => QubitType::SecondOnly,
        }
    }

    /// `4n₁n₂ − (n₁+n₂) − 2|A|`.
    pub fn generator_count(&self) -> usize {
        self.code.gauge().gx.rows() + self.code.gauge().gz.rows()
    }
}

/// Builds aBBS(A). Qubits of `L₁` are numbered row-major first, then the
/// `L₂`-only qubits row-major.
pub fn abbs_from_matrix(a: &BitMatrix) -> Result<AbbsCode> {
    let cl = Classical::new(a)?;
    let (n1, n2) = cl.a.shape();
    let full = BitMatrix::ones(n1, n2);
    let mut layout = QubitLayout::new();
    layout.add_lattice(LATTICE_1, &full)?;
    layout.add_lattice_sharing(LATTICE_2, &full, Some((LATTICE_1, &cl.a)))?;
    let n = layout.n();
    let at = |name: &str, i: usize, j: usize| layout.index(name, i, j).expect("full lattice");

    let mut gx = BitMatrix::zeros(0, n);
    let mut gz = BitMatrix::zeros(0, n);
    for i in 0..n1 {
        for j in 0..n2 {
            if i + 1 < n1 {
                gx.push_row(&BitVec::from_support(n, [at(LATTICE_1, i, j), at(LATTICE_1, i + 1, j)]));
            }
        }
    }
    for i in 0..n1 {
        for j in 0..n2 {
            if j + 1 < n2 {
                gz.push_row(&BitVec::from_support(n, [at(LATTICE_2, i, j), at(LATTICE_2, i, j + 1)]));
            }
        }
    }
    for i in 0..n1 {
        for j in 0..n2 {
            if !cl.a.get(i, j) {
                gx.push_row(&BitVec::unit(n, at(LATTICE_2, i, j)));
                gz.push_row(&BitVec::unit(n, at(LATTICE_1, i, j)));
            }
        }
    }

    let mut sx = BitMatrix::zeros(0, n);
    for r in cl.c1.checks().row_iter() {
        let s = BitMatrix::diag(&r).mul(&full)?;
        sx.push_row(&layout.support_from_matrix(LATTICE_2, &s)?);
    }
    let mut sz = BitMatrix::zeros(0, n);
    for c in cl.c2.checks().row_iter() {
        let s = full.mul(&BitMatrix::diag(&c))?;
        sz.push_row(&layout.support_from_matrix(LATTICE_1, &s)?);
    }
    let code = SubsystemCode::with_stabilizer(layout, CssGroup::new(gx, gz)?, CssGroup::new(sx, sz)?)?;
    Ok(AbbsCode { cl, code })
}

/// BBS(G₁ᵀ Q G₂) for codes of equal dimension and invertible `Q`.
pub fn bbs_from_codes(c1: &LinearCode, c2: &LinearCode, q: &BitMatrix) -> Result<BbsCode> {
    bbs_from_matrix(&product_matrix(c1, c2, q)?)
}

/// `A = G₁ᵀ Q G₂`.
pub fn product_matrix(c1: &LinearCode, c2: &LinearCode, q: &BitMatrix) -> Result<BitMatrix> {
    let k = c1.k();
    if c2.k() != k || q.shape() != (k, k) {
        return Err(Error::Parameter(format!(
            "need k1 = k2 = size of Q, got k1={k}, k2={}, Q {}x{}",
            c2.k(),
            q.rows(),
            q.cols()
        )));
    }
    if k == 0 {
        return Err(Error::Parameter("codes have dimension 0".into()));
    }
    if q.rank() != k {
        return Err(Error::Parameter("Q is singular".into()));
    }
    c1.generator().transpose().mul(q)?.mul(c2.generator())
}

/// How [`minimize_weight_q`] searches over invertible `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QSearch {
    /// Every invertible matrix; requires `k ≤ 4`.
    Exhaustive,
    /// Random restarts with single-entry hill climbing, at most `budget`
    /// evaluations in total.
    Heuristic { restarts: usize, budget: usize, seed: u64 },
}

impl QSearch {
    /// Exhaustive when `k ≤ 4`, otherwise the given heuristic settings.
    pub fn auto(k: usize, restarts: usize, budget: usize, seed: u64) -> Self {
        if k <= MAX_EXHAUSTIVE_K {
            QSearch::Exhaustive
        } else {
            QSearch::Heuristic { restarts, budget, seed }
        }
    }
}

#[derive(Clone, Debug)]
pub struct QSearchResult {
    pub q: BitMatrix,
    pub weight: usize,
    pub evaluations: usize,
    /// True when every invertible `Q` was tried.
    pub certified: bool,
    pub code: BbsCode,
}

/// Finds `Q` minimizing `|G₁ᵀ Q G₂|`. Ties go to the first candidate found.
pub fn minimize_weight_q(c1: &LinearCode, c2: &LinearCode, search: QSearch) -> Result<QSearchResult> {
    let k = c1.k();
    let identity = BitMatrix::identity(k);
    product_matrix(c1, c2, &identity)?;
    let left = c1.generator().transpose();
    let right = c2.generator();
    let weight = |q: &BitMatrix| left.mul(q).and_then(|m| m.mul(right)).map(|a| a.weight()).expect("shapes checked");

    let (q, w, evaluations, certified) = match search {
        QSearch::Exhaustive => {
            if k > MAX_EXHAUSTIVE_K {
                return Err(Error::Capacity {
                    what: "exhaustive Q search (k)",
                    size: k as u128,
                    limit: MAX_EXHAUSTIVE_K as u128,
                });
            }
            let mut best: Option<(BitMatrix, usize)> = None;
            let mut evaluations = 0;
            for mask in 0u32..(1 << (k * k)) {
                let q = BitMatrix::from_bitvecs(
                    k,
                    &(0..k)
                        .map(|i| BitVec::from_support(k, (0..k).filter(|j| mask >> (i * k + j) & 1 == 1)))
                        .collect::<Vec<_>>(),
                );
                if q.rank() != k {
                    continue;
                }
                evaluations += 1;
                let w = weight(&q);
                if best.as_ref().is_none_or(|(_, bw)| w < *bw) {
                    best = Some((q, w));
                }
            }
            let (q, w) = best.expect("identity is invertible");
            (q, w, evaluations, true)
        }
        QSearch::Heuristic { restarts, budget, seed } => {
            let restarts = restarts.max(1);
            let per = (budget / restarts).max(1);
            let results: Vec<(BitMatrix, usize, usize)> = (0..restarts)
                .into_par_iter()
                .map(|r| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
                    let mut q = if r == 0 {
                        BitMatrix::identity(k)
                    } else {
                        BitMatrix::random_invertible_with(k, &mut rng)
                    };
                    let mut w = weight(&q);
                    let mut evals = 1;
                    'climb: while evals < per {
                        for i in 0..k {
                            for j in 0..k {
                                if evals >= per {
                                    break 'climb;
                                }
                                let mut cand = q.clone();
                                cand.flip(i, j);
                                if cand.rank() != k {
                                    continue;
                                }
                                evals += 1;
                                let cw = weight(&cand);
                                if cw < w {
                                    q = cand;
                                    w = cw;
                                    continue 'climb;
                                }
                            }
                        }
                        break;
                    }
                    (q, w, evals)
                })
                .collect();
            let evaluations = results.iter().map(|r| r.2).sum();
            let (q, w, _) = results
                .into_iter()
                .min_by_key(|r| r.1)
                .expect("at least one restart");
            (q, w, evaluations, false)
        }
    };
    let code = bbs_from_codes(c1, c2, &q)?;
    Ok(QSearchResult {
        q,
        weight: w,
        evaluations,
        certified,
        code,
    })
}
