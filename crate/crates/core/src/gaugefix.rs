//! Gauge fixing: ancilla embedding, verification of the fixing relation,
//! and the BBS and hypergraph-product fixings of aBBS(A).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bbs::{self, abbs_from_matrix, bbs_from_matrix, strip_zero_lines, QubitType};
use crate::classical::{repetition_checks, Distance};
use crate::error::{Error, Result};
use crate::f2::{BitMatrix, BitVec, Echelon};
use crate::hgp::{self, hgp_code};
use crate::pauli::{CssGroup, PauliKind, QubitLayout, SubsystemCode};

/// Extra lattices of the four-lattice layout.
pub const LATTICE_L1_SMALL: &str = "l1";
pub const LATTICE_L2_SMALL: &str = "l2";
/// Lattice holding qubits added by [`append_fresh_ancillas`].
pub const LATTICE_ANCILLA: &str = "anc";

/// Target qubits for each ancilla kind: `|+⟩` adds `X_i` to the gauge group,
/// `|0⟩` adds `Z_i`, and a bare gauge qubit adds both.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaSpec {
    pub plus: Vec<usize>,
    pub zero: Vec<usize>,
    pub gauge: Vec<usize>,
}

impl AncillaSpec {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.plus.len(), self.zero.len(), self.gauge.len())
    }

    fn all(&self) -> impl Iterator<Item = usize> + '_ {
        self.plus.iter().chain(&self.zero).chain(&self.gauge).copied()
    }
}

/// Places `code` on `target` through `data_map` (code qubit → target qubit)
/// and fills every remaining target qubit with the ancillas in `spec`.
/// Every target qubit must be covered exactly once.
pub fn append_ancillas(
    code: &SubsystemCode,
    target: &QubitLayout,
    data_map: &[usize],
    spec: &AncillaSpec,
) -> Result<SubsystemCode> {
    let n = target.n();
    if data_map.len() != code.n() {
        return Err(Error::Layout(format!(
            "data map has {} entries for {} qubits",
            data_map.len(),
            code.n()
        )));
    }
    let mut owner = vec![false; n];
    for q in data_map.iter().copied().chain(spec.all()) {
        if q >= n {
            return Err(Error::Layout(format!("placement {q} outside layout of {n} qubits")));
        }
        if owner[q] {
            return Err(Error::Layout(format!("qubit {q} placed twice")));
        }
        owner[q] = true;
    }
    if let Some(q) = owner.iter().position(|&o| !o) {
        return Err(Error::Layout(format!("qubit {q} has no assignment")));
    }
    let relabel = |m: &BitMatrix| {
        let mut out = BitMatrix::zeros(0, n);
        for row in m.row_iter() {
            out.push_row(&BitVec::from_support(n, row.support().map(|q| data_map[q])));
        }
        out
    };
    let mut gx = relabel(&code.gauge().gx);
    let mut gz = relabel(&code.gauge().gz);
    let mut sx = relabel(&code.stabilizer().gx);
    let mut sz = relabel(&code.stabilizer().gz);
    for &q in &spec.plus {
        gx.push_row(&BitVec::unit(n, q));
        sx.push_row(&BitVec::unit(n, q));
    }
    for &q in &spec.zero {
        gz.push_row(&BitVec::unit(n, q));
        sz.push_row(&BitVec::unit(n, q));
    }
    for &q in &spec.gauge {
        gx.push_row(&BitVec::unit(n, q));
        gz.push_row(&BitVec::unit(n, q));
    }
    SubsystemCode::with_stabilizer(target.clone(), CssGroup::new(gx, gz)?, CssGroup::new(sx, sz)?)
}

/// Appends `m₊`, `m₀`, `m_g` new qubits in that order on a one-row lattice.
pub fn append_fresh_ancillas(code: &SubsystemCode, plus: usize, zero: usize, gauge: usize) -> Result<SubsystemCode> {
    let total = plus + zero + gauge;
    if total == 0 {
        return Ok(code.clone());
    }
    let mut target = code.layout().clone();
    target.add_free_qubits(LATTICE_ANCILLA, total)?;
    let base = code.n();
    let spec = AncillaSpec {
        plus: (base..base + plus).collect(),
        zero: (base + plus..base + plus + zero).collect(),
        gauge: (base + plus + zero..base + total).collect(),
    };
    append_ancillas(code, &target, &(0..base).collect::<Vec<_>>(), &spec)
}

/// Maps every qubit of `src` to `target` by lattice position, following the
/// `(source lattice, target lattice)` pairs.
pub fn lattice_map(src: &QubitLayout, target: &QubitLayout, pairs: &[(&str, &str)]) -> Result<Vec<usize>> {
    let mut map = vec![None; src.n()];
    for &(from, to) in pairs {
        let l = src
            .lattice(from)
            .ok_or_else(|| Error::Layout(format!("no source lattice {from:?}")))?;
        for (i, j, q) in l.sites() {
            let t = target
                .index(to, i, j)
                .ok_or_else(|| Error::Layout(format!("site ({i}, {j}) missing from {to:?}")))?;
            match map[q] {
                Some(prev) if prev != t => {
                    return Err(Error::Layout(format!("qubit {q} maps to both {prev} and {t}")))
                }
                _ => map[q] = Some(t),
            }
        }
    }
    map.into_iter()
        .enumerate()
        .map(|(q, t)| t.ok_or_else(|| Error::Layout(format!("source qubit {q} unmapped"))))
        .collect()
}

/// Which inclusion of the fixing chain failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inclusion {
    /// `S(G) ≤ S(G′)`
    StabilizerInFixedStabilizer,
    /// `S(G′) ≤ G′`
    FixedStabilizerInFixedGauge,
    /// `G′ ≤ G`
    FixedGaugeInGauge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    KMismatch { fixed: usize, original: usize },
    NotContained {
        inclusion: Inclusion,
        kind: PauliKind,
        row: usize,
        support: Vec<usize>,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::KMismatch { fixed, original } => {
                write!(f, "K mismatch: fixed code has K={fixed}, original K={original}")
            }
            Witness::NotContained {
                inclusion,
                kind,
                row,
                support,
            } => write!(f, "{inclusion:?} fails at {kind:?} row {row} with support {support:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn pass() -> Self {
        Self {
            holds: true,
            witness: None,
        }
    }

    fn fail(w: Witness) -> Self {
        Self {
            holds: false,
            witness: Some(w),
        }
    }
}

/// Checks that `fixed` is a gauge fixing of `original`: equal `K` and
/// `S(G) ≤ S(G′) ≤ G′ ≤ G`. The first failure is returned as a witness,
/// checking `K` before the inclusions.
pub fn is_gauge_fixing(fixed: &SubsystemCode, original: &SubsystemCode) -> Result<Verdict> {
    if fixed.n() != original.n() {
        return Err(Error::Layout(format!(
            "codes act on {} and {} qubits",
            fixed.n(),
            original.n()
        )));
    }
    if fixed.k() != original.k() {
        return Ok(Verdict::fail(Witness::KMismatch {
            fixed: fixed.k(),
            original: original.k(),
        }));
    }
    let steps = [
        (Inclusion::StabilizerInFixedStabilizer, original.stabilizer(), fixed.stabilizer()),
        (Inclusion::FixedStabilizerInFixedGauge, fixed.stabilizer(), fixed.gauge()),
        (Inclusion::FixedGaugeInGauge, fixed.gauge(), original.gauge()),
    ];
    for (inclusion, sub, sup) in steps {
        for (kind, rows, span) in [(PauliKind::X, &sub.gx, &sup.gx), (PauliKind::Z, &sub.gz, &sup.gz)] {
            let ech = Echelon::new(span);
            if let Some((row, v)) = rows.row_iter().enumerate().find(|(_, v)| !ech.contains(v)) {
                return Ok(Verdict::fail(Witness::NotContained {
                    inclusion,
                    kind,
                    row,
                    support: v.support().collect(),
                }));
            }
        }
    }
    Ok(Verdict::pass())
}

/// A copy of `code` with one gauge generator removed; for negative controls.
pub fn delete_gauge_generator(code: &SubsystemCode, kind: PauliKind, row: usize) -> Result<SubsystemCode> {
    let g = code.gauge();
    let (gx, gz) = match kind {
        PauliKind::X => (g.gx.without_row(row), g.gz.clone()),
        PauliKind::Z => (g.gx.clone(), g.gz.without_row(row)),
    };
    SubsystemCode::new(code.layout().clone(), CssGroup::new(gx, gz)?)
}

/// BBS(A) with `|+⟩` on type-2 and `|0⟩` on type-1 sites, and aBBS(A), both
/// on the aBBS layout.
#[derive(Clone, Debug)]
pub struct BbsFixing {
    pub fixed: SubsystemCode,
    pub original: SubsystemCode,
    pub ancillas: AncillaSpec,
}

pub fn bbs_fixing_of_abbs(a: &BitMatrix) -> Result<BbsFixing> {
    let abbs = abbs_from_matrix(a)?;
    let bbs = bbs_from_matrix(a)?;
    let target = abbs.layout().clone();
    let map = lattice_map(bbs.layout(), &target, &[(bbs::LATTICE, bbs::LATTICE_1)])?;
    let mut ancillas = AncillaSpec::default();
    for q in 0..target.n() {
        match abbs.qubit_type(q) {
            QubitType::Shared => {}
            QubitType::FirstOnly => ancillas.zero.push(q),
            QubitType::SecondOnly => ancillas.plus.push(q),
        }
    }
    let fixed = append_ancillas(bbs.code(), &target, &map, &ancillas)?;
    Ok(BbsFixing {
        fixed,
        original: abbs.code().clone(),
        ancillas,
    })
}

/// The three codes of the hypergraph-product fixing on lattices
/// `L₁ ∪ L₂ ∪ l₁ ∪ l₂`.
#[derive(Clone, Debug)]
pub struct HgpFixings {
    /// HGP(H_R, H₂) with `|+⟩` on type-2 sites and bare gauge qubits on `l₂`.
    pub q_prime: SubsystemCode,
    /// HGP(H₁, H_R) with `|0⟩` on type-1 sites and bare gauge qubits on `l₁`.
    pub q_double_prime: SubsystemCode,
    /// aBBS(A) with bare gauge qubits on `l₁` and `l₂`.
    pub q: SubsystemCode,
    pub h1: BitMatrix,
    pub h2: BitMatrix,
}

/// Canonical checks `(H₁, H₂)` with rows spanning `ker(Aᵀ)` and `ker(A)`.
pub fn kernel_checks(a: &BitMatrix) -> (BitMatrix, BitMatrix) {
    (a.transpose().kernel_basis(), a.kernel_basis())
}

fn same_span(a: &BitMatrix, b: &BitMatrix) -> bool {
    let r = a.vstack(b).map(|m| m.rank()).unwrap_or(usize::MAX);
    r == a.rank() && r == b.rank()
}

pub fn hgp_fixings_of_abbs(a: &BitMatrix, h1: &BitMatrix, h2: &BitMatrix) -> Result<HgpFixings> {
    let (stripped, dr, dc) = strip_zero_lines(a)?;
    if !dr.is_empty() || !dc.is_empty() {
        return Err(Error::Parameter("A must have no zero rows or columns".into()));
    }
    let (n1, n2) = stripped.shape();
    let (k1, k2) = kernel_checks(&stripped);
    if h1.cols() != n1 || !same_span(h1, &k1) {
        return Err(Error::Parameter("rows of H1 must span ker(A^T)".into()));
    }
    if h2.cols() != n2 || !same_span(h2, &k2) {
        return Err(Error::Parameter("rows of H2 must span ker(A)".into()));
    }
    let (n1t, n2t) = (h1.rows(), h2.rows());

    let abbs = abbs_from_matrix(&stripped)?;
    let mut target = abbs.layout().clone();
    target.add_lattice(LATTICE_L1_SMALL, &BitMatrix::ones(n1.saturating_sub(1), n2t))?;
    target.add_lattice(LATTICE_L2_SMALL, &BitMatrix::ones(n1t, n2.saturating_sub(1)))?;
    let sites = |name: &str| -> Vec<usize> {
        target
            .lattice(name)
            .map(|l| l.sites().map(|(_, _, q)| q).collect())
            .unwrap_or_default()
    };
    let (small1, small2) = (sites(LATTICE_L1_SMALL), sites(LATTICE_L2_SMALL));
    let by_type = |t: QubitType| -> Vec<usize> { (0..abbs.n()).filter(|&q| abbs.qubit_type(q) == t).collect() };

    let q = append_ancillas(
        abbs.code(),
        &target,
        &(0..abbs.n()).collect::<Vec<_>>(),
        &AncillaSpec {
            gauge: small1.iter().chain(&small2).copied().collect(),
            ..Default::default()
        },
    )?;

    let hp = hgp_code(&repetition_checks(n1), h2)?;
    let map = lattice_map(
        hp.layout(),
        &target,
        &[(hgp::LATTICE_BIG, bbs::LATTICE_1), (hgp::LATTICE_SMALL, LATTICE_L1_SMALL)],
    )?;
    let q_prime = append_ancillas(
        hp.code(),
        &target,
        &map,
        &AncillaSpec {
            plus: by_type(QubitType::SecondOnly),
            gauge: small2,
            ..Default::default()
        },
    )?;

    let hpp = hgp_code(h1, &repetition_checks(n2))?;
    let map = lattice_map(
        hpp.layout(),
        &target,
        &[(hgp::LATTICE_BIG, bbs::LATTICE_2), (hgp::LATTICE_SMALL, LATTICE_L2_SMALL)],
    )?;
    let q_double_prime = append_ancillas(
        hpp.code(),
        &target,
        &map,
        &AncillaSpec {
            zero: by_type(QubitType::FirstOnly),
            gauge: small1,
            ..Default::default()
        },
    )?;

    Ok(HgpFixings {
        q_prime,
        q_double_prime,
        q,
        h1: h1.clone(),
        h2: h2.clone(),
    })
}

/// Result of enumerating the dressed logicals of a fixed code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DressedCheck {
    pub holds: bool,
    pub checked: usize,
    pub counterexamples: usize,
    pub fixed_distance: Distance,
    pub original_distance: Distance,
}

/// Every nontrivial dressed logical of `fixed` is one of `original`, and
/// `D(fixed) ≥ D(original)`. Enumeration, so `N ≤ 14`.
pub fn dressed_subset_check(fixed: &SubsystemCode, original: &SubsystemCode) -> Result<DressedCheck> {
    if fixed.n() != original.n() {
        return Err(Error::Layout("codes act on different qubit counts".into()));
    }
    let mut checked = 0;
    let mut counterexamples = 0;
    for kind in [PauliKind::X, PauliKind::Z] {
        fixed.for_each_dressed_logical(kind, |v| {
            checked += 1;
            if !original.is_dressed_logical(kind, v) {
                counterexamples += 1;
            }
        })?;
    }
    let fixed_distance = fixed.dressed_distance_bruteforce()?;
    let original_distance = original.dressed_distance_bruteforce()?;
    Ok(DressedCheck {
        holds: counterexamples == 0 && fixed_distance >= original_distance,
        checked,
        counterexamples,
        fixed_distance,
        original_distance,
    })
}

/// Stabilizers shared by two fixings, and whether they contain `S(G)`.
pub fn gauge_switching_check(
    first: &SubsystemCode,
    second: &SubsystemCode,
    original: &SubsystemCode,
) -> Result<(CssGroup, bool)> {
    let common = first.stabilizer().intersection(second.stabilizer())?;
    let ok = common.contains_group(original.stabilizer());
    Ok((common, ok))
}
