//! CSS Pauli groups on lattice layouts and subsystem code parameters.
//!
//! Every operator is a support vector over global qubit indices. Lattices
//! only provide named `(i, j)` views onto those indices, and two lattices may
//! map a site to the same qubit. Phases are ignored throughout.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::classical::Distance;
use crate::error::{Error, Result};
use crate::f2::{BitMatrix, BitVec, Echelon};

/// Largest qubit count accepted by [`SubsystemCode::dressed_distance_bruteforce`].
pub const MAX_BRUTEFORCE_QUBITS: usize = 14;

/// A rectangular array of sites, each holding a global qubit index or empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    sites: Vec<Option<usize>>,
}

impl Lattice {
    pub fn site(&self, i: usize, j: usize) -> Option<usize> {
        self.sites[i * self.cols + j]
    }

    pub fn occupied(&self) -> usize {
        self.sites.iter().flatten().count()
    }

    /// Occupied sites in row-major order.
    pub fn sites(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.sites
            .iter()
            .enumerate()
            .filter_map(move |(k, s)| s.map(|q| (k / self.cols, k % self.cols, q)))
    }
}

/// Named lattices over a common set of `N` physical qubits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitLayout {
    lattices: Vec<Lattice>,
    n: usize,
}

impl QubitLayout {
    pub fn new() -> Self {
        Self::default()
    }

    /// A single fully occupied `rows × cols` lattice.
    pub fn grid(name: &str, rows: usize, cols: usize) -> Self {
        let mut layout = Self::new();
        layout
            .add_lattice(name, &BitMatrix::ones(rows, cols))
            .expect("fresh layout");
        layout
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lattices(&self) -> &[Lattice] {
        &self.lattices
    }

    pub fn lattice(&self, name: &str) -> Option<&Lattice> {
        self.lattices.iter().find(|l| l.name == name)
    }

    fn lattice_or_err(&self, name: &str) -> Result<&Lattice> {
        self.lattice(name)
            .ok_or_else(|| Error::Layout(format!("no lattice named {name:?}")))
    }

    pub fn index(&self, lattice: &str, i: usize, j: usize) -> Option<usize> {
        let l = self.lattice(lattice)?;
        if i < l.rows && j < l.cols {
            l.site(i, j)
        } else {
            None
        }
    }

    /// Adds a lattice whose occupied sites get fresh qubits in row-major order.
    pub fn add_lattice(&mut self, name: &str, occupied: &BitMatrix) -> Result<()> {
        self.add_lattice_sharing(name, occupied, None)
    }

    /// Adds a lattice; sites marked in `shared.1` reuse the qubit at the same
    /// position of lattice `shared.0`, the remaining occupied sites are fresh.
    pub fn add_lattice_sharing(
        &mut self,
        name: &str,
        occupied: &BitMatrix,
        shared: Option<(&str, &BitMatrix)>,
    ) -> Result<()> {
        if self.lattice(name).is_some() {
            return Err(Error::Layout(format!("duplicate lattice {name:?}")));
        }
        let (rows, cols) = occupied.shape();
        let mut sites = vec![None; rows * cols];
        if let Some((other, mask)) = shared {
            if mask.shape() != occupied.shape() {
                return Err(Error::Dimension {
                    op: "shared lattice mask",
                    lhs: occupied.shape(),
                    rhs: mask.shape(),
                });
            }
            let other = self.lattice_or_err(other)?;
            if (other.rows, other.cols) != (rows, cols) {
                return Err(Error::Layout(format!(
                    "lattice {:?} has shape {}x{}, expected {rows}x{cols}",
                    other.name, other.rows, other.cols
                )));
            }
            for i in 0..rows {
                for j in 0..cols {
                    if mask.get(i, j) {
                        if !occupied.get(i, j) {
                            return Err(Error::Layout(format!("shared site ({i}, {j}) is not occupied")));
                        }
                        let q = other.site(i, j).ok_or_else(|| {
                            Error::Layout(format!("shared site ({i}, {j}) is empty in {:?}", other.name))
                        })?;
                        sites[i * cols + j] = Some(q);
                    }
                }
            }
        }
        for i in 0..rows {
            for j in 0..cols {
                if occupied.get(i, j) && sites[i * cols + j].is_none() {
                    sites[i * cols + j] = Some(self.n);
                    self.n += 1;
                }
            }
        }
        self.lattices.push(Lattice {
            name: name.to_string(),
            rows,
            cols,
            sites,
        });
        Ok(())
    }

    /// Adds `count` qubits that belong to no lattice site.
    pub fn add_free_qubits(&mut self, name: &str, count: usize) -> Result<()> {
        self.add_lattice(name, &BitMatrix::ones(1, count))
    }

    /// Disjoint union; qubits of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &QubitLayout) -> Result<QubitLayout> {
        let mut out = self.clone();
        for l in &other.lattices {
            if out.lattice(&l.name).is_some() {
                return Err(Error::Layout(format!("duplicate lattice {:?}", l.name)));
            }
            out.lattices.push(Lattice {
                sites: l.sites.iter().map(|s| s.map(|q| q + self.n)).collect(),
                ..l.clone()
            });
        }
        out.n += other.n;
        Ok(out)
    }

    /// All `(lattice, i, j)` positions of global qubit `q`.
    pub fn positions(&self, q: usize) -> Vec<(&str, usize, usize)> {
        self.lattices
            .iter()
            .flat_map(|l| {
                l.sites()
                    .filter(move |&(_, _, g)| g == q)
                    .map(move |(i, j, _)| (l.name.as_str(), i, j))
            })
            .collect()
    }

    /// Flattens a lattice-shaped support; `S` may only mark occupied sites.
    pub fn support_from_matrix(&self, lattice: &str, s: &BitMatrix) -> Result<BitVec> {
        let l = self.lattice_or_err(lattice)?;
        if s.shape() != (l.rows, l.cols) {
            return Err(Error::Dimension {
                op: "lattice support",
                lhs: (l.rows, l.cols),
                rhs: s.shape(),
            });
        }
        let mut v = BitVec::zeros(self.n);
        for i in 0..l.rows {
            for j in s.row_support(i) {
                let q = l
                    .site(i, j)
                    .ok_or_else(|| Error::Layout(format!("support on empty site ({i}, {j}) of {lattice:?}")))?;
                v.flip(q);
            }
        }
        Ok(v)
    }

    /// The lattice view of a support: entry `(i, j)` is the bit of the qubit there.
    pub fn support_to_matrix(&self, lattice: &str, v: &BitVec) -> Result<BitMatrix> {
        let l = self.lattice_or_err(lattice)?;
        let mut m = BitMatrix::zeros(l.rows, l.cols);
        for (i, j, q) in l.sites() {
            m.set(i, j, v.get(q));
        }
        Ok(m)
    }

    /// One-line description, e.g. `L 2x3 (6); N=6`.
    pub fn header(&self) -> String {
        let parts: Vec<String> = self
            .lattices
            .iter()
            .map(|l| format!("{} {}x{} ({})", l.name, l.rows, l.cols, l.occupied()))
            .collect();
        format!("{}; N={}", parts.join(", "), self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliKind {
    X,
    Z,
}

/// An `X(S)` or `Z(S)` operator given by its support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssPauli {
    pub kind: PauliKind,
    pub support: BitVec,
}

impl CssPauli {
    pub fn x(support: BitVec) -> Self {
        Self {
            kind: PauliKind::X,
            support,
        }
    }

    pub fn z(support: BitVec) -> Self {
        Self {
            kind: PauliKind::Z,
            support,
        }
    }
}

/// Whether two CSS Paulis commute: always for equal kinds, otherwise iff the
/// supports overlap on an even number of qubits.
pub fn commutes(p: &CssPauli, q: &CssPauli) -> Result<bool> {
    if p.support.len() != q.support.len() {
        return Err(Error::Layout(format!(
            "operators act on {} and {} qubits",
            p.support.len(),
            q.support.len()
        )));
    }
    Ok(p.kind == q.kind || !p.support.dot(&q.support))
}

/// A group generated by X-type rows `gx` and Z-type rows `gz`. Generators
/// may be redundant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssGroup {
    pub gx: BitMatrix,
    pub gz: BitMatrix,
}

impl CssGroup {
    pub fn new(gx: BitMatrix, gz: BitMatrix) -> Result<Self> {
        if gx.cols() != gz.cols() {
            return Err(Error::Dimension {
                op: "css group",
                lhs: gx.shape(),
                rhs: gz.shape(),
            });
        }
        Ok(Self { gx, gz })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            gx: BitMatrix::zeros(0, n),
            gz: BitMatrix::zeros(0, n),
        }
    }

    pub fn n(&self) -> usize {
        self.gx.cols()
    }

    /// `GX · GZᵀ`: entry `(a, b)` is 1 iff X-row `a` anticommutes with Z-row `b`.
    pub fn commutation_matrix(&self) -> BitMatrix {
        self.gx.mul(&self.gz.transpose()).expect("shared width")
    }

    pub fn is_abelian(&self) -> bool {
        self.commutation_matrix().is_zero()
    }

    pub fn contains_x(&self, v: &BitVec) -> bool {
        self.gx.rowspace_contains(v)
    }

    pub fn contains_z(&self, v: &BitVec) -> bool {
        self.gz.rowspace_contains(v)
    }

    /// Every X generator of `other` is in this group, and likewise for Z.
    pub fn contains_group(&self, other: &CssGroup) -> bool {
        let ex = Echelon::new(&self.gx);
        let ez = Echelon::new(&self.gz);
        other.gx.row_iter().all(|r| ex.contains(&r)) && other.gz.row_iter().all(|r| ez.contains(&r))
    }

    /// Both groups generate the same subgroup.
    pub fn same_span(&self, other: &CssGroup) -> bool {
        self.contains_group(other) && other.contains_group(self)
    }

    /// Independent generators of the same group.
    pub fn reduced(&self) -> CssGroup {
        CssGroup {
            gx: self.gx.row_basis(),
            gz: self.gz.row_basis(),
        }
    }

    /// Generators of the intersection of two groups on the same qubits.
    pub fn intersection(&self, other: &CssGroup) -> Result<CssGroup> {
        Ok(CssGroup {
            gx: span_intersection(&self.gx, &other.gx)?,
            gz: span_intersection(&self.gz, &other.gz)?,
        })
    }

    /// Dense text with a leading `layout` line, then the X and Z blocks.
    pub fn to_dense_text(&self, layout: &QubitLayout) -> String {
        format!(
            "layout {}\nX\n{}Z\n{}",
            layout.header(),
            self.gx.to_dense_text(),
            self.gz.to_dense_text()
        )
    }

    /// Inverse of [`CssGroup::to_dense_text`]; returns the layout line too.
    pub fn from_dense_text(text: &str) -> Result<(String, CssGroup)> {
        let lines: Vec<&str> = text.lines().collect();
        let header = lines
            .first()
            .and_then(|l| l.strip_prefix("layout "))
            .ok_or_else(|| Error::parse(1, 1, "expected `layout` line"))?;
        let find = |tag: &str| {
            lines
                .iter()
                .position(|l| l.trim() == tag)
                .ok_or_else(|| Error::parse(1, 1, format!("missing `{tag}` block")))
        };
        let (xs, zs) = (find("X")?, find("Z")?);
        if zs < xs {
            return Err(Error::parse(zs + 1, 1, "`Z` block before `X` block"));
        }
        let shift = |e: Error, offset: usize| match e {
            Error::Parse { line, column, message } => Error::Parse {
                line: line + offset,
                column,
                message,
            },
            other => other,
        };
        let gx = BitMatrix::from_dense_text(&lines[xs + 1..zs].join("\n")).map_err(|e| shift(e, xs + 1))?;
        let gz = BitMatrix::from_dense_text(&lines[zs + 1..].join("\n")).map_err(|e| shift(e, zs + 1))?;
        Ok((header.to_string(), CssGroup::new(gx, gz)?))
    }
}

/// Basis of `row(a) ∩ row(b)`.
pub fn span_intersection(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    if a.cols() != b.cols() {
        return Err(Error::Dimension {
            op: "span intersection",
            lhs: a.shape(),
            rhs: b.shape(),
        });
    }
    // x·A = y·B  <=>  (x, y) in the left kernel of [A; B]
    let ab = a.vstack(b)?;
    let deps = ab.transpose().kernel_basis();
    let xs = deps.select_cols(&(0..a.rows()).collect::<Vec<_>>());
    Ok(xs.mul(a)?.row_basis())
}

/// The center of a CSS group: X-part `row(GX) ∩ ker(GZ)`, Z-part
/// `row(GZ) ∩ ker(GX)`, both as independent rows.
pub fn group_center_css(g: &CssGroup) -> CssGroup {
    let m = g.commutation_matrix();
    let x_coeffs = m.transpose().kernel_basis();
    let z_coeffs = m.kernel_basis();
    CssGroup {
        gx: x_coeffs.mul(&g.gx).expect("coefficient width").row_basis(),
        gz: z_coeffs.mul(&g.gz).expect("coefficient width").row_basis(),
    }
}

/// A CSS subsystem code: a gauge group on a layout with its derived center.
#[derive(Clone, Debug)]
pub struct SubsystemCode {
    layout: QubitLayout,
    gauge: CssGroup,
    stabilizer: CssGroup,
    ranks: [usize; 4],
    k: usize,
    logicals: OnceLock<(BitMatrix, BitMatrix)>,
    distance: OnceLock<(Distance, Distance)>,
}

impl SubsystemCode {
    pub fn new(layout: QubitLayout, gauge: CssGroup) -> Result<Self> {
        if gauge.n() != layout.n() {
            return Err(Error::Layout(format!(
                "gauge acts on {} qubits, layout has {}",
                gauge.n(),
                layout.n()
            )));
        }
        let stabilizer = group_center_css(&gauge);
        Self::assemble(layout, gauge, stabilizer)
    }

    fn assemble(layout: QubitLayout, gauge: CssGroup, stabilizer: CssGroup) -> Result<Self> {
        let ranks = [
            gauge.gx.rank(),
            gauge.gz.rank(),
            stabilizer.gx.rows(),
            stabilizer.gz.rows(),
        ];
        let sum: usize = ranks.iter().sum();
        if !sum.is_multiple_of(2) {
            return Err(Error::Consistency(format!("odd rank sum {sum} in K formula")));
        }
        let k = layout
            .n()
            .checked_sub(sum / 2)
            .ok_or_else(|| Error::Consistency(format!("rank sum {sum} exceeds 2N")))?;
        Ok(Self {
            layout,
            gauge,
            stabilizer,
            ranks,
            k,
            logicals: OnceLock::new(),
            distance: OnceLock::new(),
        })
    }

    /// Builds a code from a known stabilizer group, skipping the center
    /// computation. The stabilizer must commute with, and lie in, the gauge
    /// group; it is not checked to be the whole center.
    pub fn with_stabilizer(layout: QubitLayout, gauge: CssGroup, stabilizer: CssGroup) -> Result<Self> {
        if gauge.n() != layout.n() || stabilizer.n() != layout.n() {
            return Err(Error::Layout(format!(
                "groups act on {} and {} qubits, layout has {}",
                gauge.n(),
                stabilizer.n(),
                layout.n()
            )));
        }
        let commute = gauge.gz.mul(&stabilizer.gx.transpose())?.is_zero()
            && gauge.gx.mul(&stabilizer.gz.transpose())?.is_zero();
        if !commute || !gauge.contains_group(&stabilizer) {
            return Err(Error::Consistency("stabilizer is not central in the gauge group".into()));
        }
        let stabilizer = stabilizer.reduced();
        Self::assemble(layout, gauge, stabilizer)
    }

    /// A stabilizer code, i.e. an abelian gauge group.
    pub fn stabilizer_code(layout: QubitLayout, sx: BitMatrix, sz: BitMatrix) -> Result<Self> {
        let g = CssGroup::new(sx, sz)?;
        if !g.is_abelian() {
            return Err(Error::Parameter("stabilizer generators do not commute".into()));
        }
        Self::new(layout, g)
    }

    pub fn layout(&self) -> &QubitLayout {
        &self.layout
    }

    pub fn gauge(&self) -> &CssGroup {
        &self.gauge
    }

    pub fn stabilizer(&self) -> &CssGroup {
        &self.stabilizer
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of gauge qubits, `(rank GX + rank GZ − rank SX − rank SZ)/2`.
    pub fn j(&self) -> usize {
        let [gx, gz, sx, sz] = self.ranks;
        (gx + gz - sx - sz) / 2
    }

    /// `[rank GX, rank GZ, rank SX, rank SZ]`.
    pub fn ranks(&self) -> [usize; 4] {
        self.ranks
    }

    /// Bare logical representatives: X-reps span `ker(GZ)` modulo `row(SX)`,
    /// Z-reps span `ker(GX)` modulo `row(SZ)`.
    pub fn logical_reps(&self) -> (&BitMatrix, &BitMatrix) {
        let (x, z) = self.logicals.get_or_init(|| {
            (
                quotient_reps(&self.gauge.gz.kernel_basis(), &self.stabilizer.gx),
                quotient_reps(&self.gauge.gx.kernel_basis(), &self.stabilizer.gz),
            )
        });
        (x, z)
    }

    /// `reps_X · reps_Zᵀ`; full rank `K` for a consistent code.
    pub fn pairing_matrix(&self) -> BitMatrix {
        let (x, z) = self.logical_reps();
        x.mul(&z.transpose()).expect("shared width")
    }

    /// Whether a support is a nontrivial dressed logical of the given kind:
    /// commutes with the stabilizers of the other kind, outside the gauge span.
    pub fn is_dressed_logical(&self, kind: PauliKind, v: &BitVec) -> bool {
        match kind {
            PauliKind::X => self.stabilizer.gz.mul_vec(v).is_zero() && !self.gauge.contains_x(v),
            PauliKind::Z => self.stabilizer.gx.mul_vec(v).is_zero() && !self.gauge.contains_z(v),
        }
    }

    /// Calls `f` on every nontrivial dressed logical of the given kind.
    pub fn for_each_dressed_logical(&self, kind: PauliKind, mut f: impl FnMut(&BitVec)) -> Result<()> {
        self.check_capacity()?;
        let (checks, gauge) = match kind {
            PauliKind::X => (&self.stabilizer.gz, &self.gauge.gx),
            PauliKind::Z => (&self.stabilizer.gx, &self.gauge.gz),
        };
        let gauge = Echelon::new(gauge);
        checks.kernel_basis().for_each_combination(|v| {
            if !gauge.contains(v) {
                f(v)
            }
        });
        Ok(())
    }

    fn check_capacity(&self) -> Result<()> {
        if self.n() > MAX_BRUTEFORCE_QUBITS {
            return Err(Error::Capacity {
                what: "dressed logical enumeration (qubits)",
                size: self.n() as u128,
                limit: MAX_BRUTEFORCE_QUBITS as u128,
            });
        }
        Ok(())
    }

    /// Minimum weights of X-type and Z-type dressed logicals, by enumeration.
    pub fn dressed_distances_bruteforce(&self) -> Result<(Distance, Distance)> {
        if let Some(d) = self.distance.get() {
            return Ok(*d);
        }
        let mut out = [Distance::Infinite; 2];
        for (slot, kind) in out.iter_mut().zip([PauliKind::X, PauliKind::Z]) {
            let mut best = usize::MAX;
            self.for_each_dressed_logical(kind, |v| best = best.min(v.weight()))?;
            if best != usize::MAX {
                *slot = Distance::Finite(best);
            }
        }
        Ok(*self.distance.get_or_init(|| (out[0], out[1])))
    }

    /// The dressed distance `D`, by enumeration.
    pub fn dressed_distance_bruteforce(&self) -> Result<Distance> {
        let (dx, dz) = self.dressed_distances_bruteforce()?;
        Ok(dx.min(dz))
    }

    pub fn params(&self) -> CodeParams {
        CodeParams {
            n: self.n(),
            k: self.k(),
            d: self.distance.get().map(|(x, z)| (*x).min(*z)),
        }
    }
}

/// Rows of `v` that extend `row(base)`, one per new dimension.
fn quotient_reps(v: &BitMatrix, base: &BitMatrix) -> BitMatrix {
    let mut ech = Echelon::new(base);
    let mut out = BitMatrix::zeros(0, v.cols());
    for row in v.row_iter() {
        if ech.insert(&row) {
            out.push_row(&row);
        }
    }
    out
}

/// `⟦N, K, D⟧`, with `D` absent when not computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: Option<Distance>,
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            Some(d) => write!(f, "[[{},{},{}]]", self.n, self.k, d),
            None => write!(f, "[[{},{},?]]", self.n, self.k),
        }
    }
}
