//! Hypergraph product codes HGP(H₁, H₂).
//!
//! Qubits live on lattice `L` (`n₁ × n₂`) followed by lattice `l`
//! (`n₁ᵀ × n₂ᵀ`), both row-major, so a vector `(s, t)` reshapes to the pair
//! of support matrices `(S, T)`.

use serde::{Deserialize, Serialize};

use crate::classical::{ldpc_profile, Distance, LinearCode};
use crate::error::{Error, Result};
use crate::f2::{BitMatrix, BitVec};
use crate::pauli::{CodeParams, CssGroup, QubitLayout, SubsystemCode};

pub const LATTICE_BIG: &str = "L";
pub const LATTICE_SMALL: &str = "l";

/// Row-major reshape of a length `rows·cols` vector.
pub fn reshape(v: &BitVec, rows: usize, cols: usize) -> Result<BitMatrix> {
    if v.len() != rows * cols {
        return Err(Error::Dimension {
            op: "reshape",
            lhs: (rows, cols),
            rhs: (v.len(), 1),
        });
    }
    let mut m = BitMatrix::zeros(rows, cols);
    for k in v.support() {
        m.set(k / cols, k % cols, true);
    }
    Ok(m)
}

/// Inverse of [`reshape`].
pub fn unreshape(m: &BitMatrix) -> BitVec {
    let cols = m.cols();
    BitVec::from_support(
        m.rows() * cols,
        (0..m.rows()).flat_map(|i| m.row_support(i).map(move |j| i * cols + j)),
    )
}

/// Quantum LDPC degrees: each qubit is in at most `beta` stabilizer
/// generators and each generator has weight at most `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumLdpc {
    pub beta: usize,
    pub gamma: usize,
}

#[derive(Clone, Debug)]
pub struct HgpCode {
    h1: BitMatrix,
    h2: BitMatrix,
    c1: LinearCode,
    c2: LinearCode,
    c1t: LinearCode,
    c2t: LinearCode,
    lx: BitMatrix,
    lz: BitMatrix,
    code: SubsystemCode,
}

/// Builds HGP(H₁, H₂) from the block matrices
/// `S_X = (H₁⊗I | I⊗H₂ᵀ)` and `S_Z = (I⊗H₂ | H₁ᵀ⊗I)`. Redundant checks are
/// allowed.
pub fn hgp_code(h1: &BitMatrix, h2: &BitMatrix) -> Result<HgpCode> {
    let (n1t, n1) = h1.shape();
    let (n2t, n2) = h2.shape();
    let c1 = LinearCode::from_checks(h1.clone());
    let c2 = LinearCode::from_checks(h2.clone());
    let c1t = LinearCode::from_checks(h1.transpose());
    let c2t = LinearCode::from_checks(h2.transpose());
    let i = BitMatrix::identity;

    let sx = h1.kron(&i(n2)).hstack(&i(n1t).kron(&h2.transpose()))?;
    let sz = i(n1).kron(h2).hstack(&h1.transpose().kron(&i(n2t)))?;
    let zeros_l = |rows: usize| BitMatrix::zeros(rows, n1t * n2t);
    let zeros_big = |rows: usize| BitMatrix::zeros(rows, n1 * n2);

    let lx_mid = i(n1).kron(c2.generator());
    let lx_low = c1t.generator().kron(&i(n2t));
    let lx = sx
        .vstack(&lx_mid.hstack(&zeros_l(lx_mid.rows()))?)?
        .vstack(&zeros_big(lx_low.rows()).hstack(&lx_low)?)?;
    let lz_mid = c1.generator().kron(&i(n2));
    let lz_low = i(n1t).kron(c2t.generator());
    let lz = sz
        .vstack(&lz_mid.hstack(&zeros_l(lz_mid.rows()))?)?
        .vstack(&zeros_big(lz_low.rows()).hstack(&lz_low)?)?;

    let mut layout = QubitLayout::new();
    layout.add_lattice(LATTICE_BIG, &BitMatrix::ones(n1, n2))?;
    layout.add_lattice(LATTICE_SMALL, &BitMatrix::ones(n1t, n2t))?;
    let group = CssGroup::new(sx, sz)?;
    if !group.is_abelian() {
        return Err(Error::Consistency("S_X S_Zᵀ is nonzero".into()));
    }
    let code = SubsystemCode::with_stabilizer(layout, group.clone(), group)?;
    let out = HgpCode {
        h1: h1.clone(),
        h2: h2.clone(),
        c1,
        c2,
        c1t,
        c2t,
        lx,
        lz,
        code,
    };
    if out.code.k() != out.k_formula() {
        return Err(Error::Consistency(format!(
            "K from ranks is {}, from code dimensions {}",
            out.code.k(),
            out.k_formula()
        )));
    }
    Ok(out)
}

impl HgpCode {
    pub fn h1(&self) -> &BitMatrix {
        &self.h1
    }

    pub fn h2(&self) -> &BitMatrix {
        &self.h2
    }

    pub fn code(&self) -> &SubsystemCode {
        &self.code
    }

    pub fn layout(&self) -> &QubitLayout {
        self.code.layout()
    }

    pub fn sx(&self) -> &BitMatrix {
        &self.code.gauge().gx
    }

    pub fn sz(&self) -> &BitMatrix {
        &self.code.gauge().gz
    }

    /// `S_X` stacked on `I⊗G₂ | 0` and `0 | F₁⊗I`.
    pub fn lx(&self) -> &BitMatrix {
        &self.lx
    }

    /// `S_Z` stacked on `G₁⊗I | 0` and `0 | I⊗F₂`.
    pub fn lz(&self) -> &BitMatrix {
        &self.lz
    }

    pub fn classical(&self) -> [&LinearCode; 4] {
        [&self.c1, &self.c2, &self.c1t, &self.c2t]
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    /// `N − rank S_X − rank S_Z`.
    pub fn k(&self) -> usize {
        self.code.k()
    }

    /// `k₁k₂ + k₁ᵀk₂ᵀ`.
    pub fn k_formula(&self) -> usize {
        self.c1.k() * self.c2.k() + self.c1t.k() * self.c2t.k()
    }

    /// Closed-form distance. Each of the two logical sectors contributes its
    /// pair of classical distances when it encodes anything.
    pub fn distance(&self) -> Result<Distance> {
        let mut d = Distance::Infinite;
        if self.c1.k() * self.c2.k() > 0 {
            d = d.min(self.c1.distance()?).min(self.c2.distance()?);
        }
        if self.c1t.k() * self.c2t.k() > 0 {
            d = d.min(self.c1t.distance()?).min(self.c2t.distance()?);
        }
        Ok(d)
    }

    /// Minimum weight nontrivial logical by enumeration (`N ≤ 14`).
    pub fn distance_bruteforce(&self) -> Result<Distance> {
        self.code.dressed_distance_bruteforce()
    }

    pub fn params(&self) -> Result<CodeParams> {
        Ok(CodeParams {
            n: self.n(),
            k: self.k(),
            d: Some(self.distance()?),
        })
    }

    /// `β = max(b₁+b₂, c₁+c₂)`, `γ = max(c₁+b₂, b₁+c₂)`.
    pub fn ldpc(&self) -> QuantumLdpc {
        let p1 = ldpc_profile(&self.h1);
        let p2 = ldpc_profile(&self.h2);
        QuantumLdpc {
            beta: (p1.b + p2.b).max(p1.c + p2.c),
            gamma: (p1.c + p2.b).max(p1.b + p2.c),
        }
    }

    /// Splits a length-`N` vector into its `(S, T)` lattice supports.
    pub fn split(&self, v: &BitVec) -> Result<(BitMatrix, BitMatrix)> {
        let (n1t, n1) = self.h1.shape();
        let (n2t, n2) = self.h2.shape();
        if v.len() != self.n() {
            return Err(Error::Dimension {
                op: "hgp split",
                lhs: (self.n(), 1),
                rhs: (v.len(), 1),
            });
        }
        let big = n1 * n2;
        let s = BitVec::from_support(big, v.support().filter(|&k| k < big));
        let t = BitVec::from_support(n1t * n2t, v.support().filter(|&k| k >= big).map(|k| k - big));
        Ok((reshape(&s, n1, n2)?, reshape(&t, n1t, n2t)?))
    }
}

/// X-stabilizer space from the lattice conditions
/// `S H₂ᵀ = H₁ᵀ T`, `G₁ S = 0`, `T F₂ᵀ = 0`, as a basis over `(s, t)`.
pub fn reshaped_x_stabilizers(h1: &BitMatrix, h2: &BitMatrix) -> Result<BitMatrix> {
    let g1 = LinearCode::from_checks(h1.clone()).generator().clone();
    let f2 = LinearCode::from_checks(h2.transpose()).generator().clone();
    solve_lattice_conditions(h1, h2, |s, t| {
        Ok(vec![
            s.mul(&h2.transpose())?.add(&h1.transpose().mul(t)?)?,
            g1.mul(s)?,
            t.mul(&f2.transpose())?,
        ])
    })
}

/// Z-stabilizer space from `H₁ S = T H₂`, `S G₂ᵀ = 0`, `F₁ T = 0`.
pub fn reshaped_z_stabilizers(h1: &BitMatrix, h2: &BitMatrix) -> Result<BitMatrix> {
    let g2 = LinearCode::from_checks(h2.clone()).generator().clone();
    let f1 = LinearCode::from_checks(h1.transpose()).generator().clone();
    solve_lattice_conditions(h1, h2, |s, t| {
        Ok(vec![
            h1.mul(s)?.add(&t.mul(h2)?)?,
            s.mul(&g2.transpose())?,
            f1.mul(t)?,
        ])
    })
}

// Kernel of a linear map on (S, T), assembled column by column from unit inputs.
fn solve_lattice_conditions(
    h1: &BitMatrix,
    h2: &BitMatrix,
    map: impl Fn(&BitMatrix, &BitMatrix) -> Result<Vec<BitMatrix>>,
) -> Result<BitMatrix> {
    let (n1t, n1) = h1.shape();
    let (n2t, n2) = h2.shape();
    let n = n1 * n2 + n1t * n2t;
    let mut columns = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = BitMatrix::zeros(n1, n2);
        let mut t = BitMatrix::zeros(n1t, n2t);
        if k < n1 * n2 {
            s.set(k / n2, k % n2, true);
        } else {
            let k = k - n1 * n2;
            t.set(k / n2t, k % n2t, true);
        }
        let out = map(&s, &t)?;
        let flat = out.iter().fold(BitVec::zeros(0), |acc, m| acc.concat(&unreshape(m)));
        columns.push(flat);
    }
    let m = BitMatrix::from_bitvecs(columns.first().map_or(0, BitVec::len), &columns).transpose();
    Ok(m.kernel_basis())
}
