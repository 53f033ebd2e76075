//! Monte Carlo simulation of the induced decoder for BBS and aBBS codes
//! under independent X/Z data noise and faulty gauge measurements.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bbs::{self, AbbsCode, BbsCode};
use crate::error::{Error, Result};
use crate::f2::{BitMatrix, BitVec, Echelon};
use crate::flip::decode_flip;
use crate::pauli::{PauliKind, SubsystemCode};

/// Two-sided 95% normal quantile used for Wilson intervals.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataNoise {
    /// X and Z flips, each with probability `q`, independently.
    Independent,
    /// X, Y, Z each with probability `q/3`.
    Depolarizing,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub q: f64,
    pub q_prime: f64,
    pub data: DataNoise,
}

impl NoiseModel {
    pub fn new(q: f64, q_prime: f64) -> Result<Self> {
        Self::checked(q, q_prime, DataNoise::Independent)
    }

    pub fn depolarizing(q: f64, q_prime: f64) -> Result<Self> {
        Self::checked(q, q_prime, DataNoise::Depolarizing)
    }

    pub fn ideal() -> Self {
        Self {
            q: 0.0,
            q_prime: 0.0,
            data: DataNoise::Independent,
        }
    }

    fn checked(q: f64, q_prime: f64, data: DataNoise) -> Result<Self> {
        let q_max = match data {
            DataNoise::Independent => 0.5,
            DataNoise::Depolarizing => 0.75,
        };
        if !(0.0..=q_max).contains(&q) {
            return Err(Error::Parameter(format!("q = {q} outside [0, {q_max}]")));
        }
        if !(0.0..=0.5).contains(&q_prime) {
            return Err(Error::Parameter(format!("q' = {q_prime} outside [0, 1/2]")));
        }
        Ok(Self { q, q_prime, data })
    }

    /// Marginal probability of an X (equivalently Z) flip on one qubit.
    pub fn marginal_flip(&self) -> f64 {
        match self.data {
            DataNoise::Independent => self.q,
            DataNoise::Depolarizing => 2.0 * self.q / 3.0,
        }
    }

    fn apply<R: Rng + ?Sized>(&self, frame: &mut Frame, rng: &mut R) {
        if self.q == 0.0 {
            return;
        }
        for i in 0..frame.x.len() {
            match self.data {
                DataNoise::Independent => {
                    if rng.gen_bool(self.q) {
                        frame.x.flip(i);
                    }
                    if rng.gen_bool(self.q) {
                        frame.z.flip(i);
                    }
                }
                DataNoise::Depolarizing => {
                    if rng.gen_bool(self.q) {
                        match rng.gen_range(0..3) {
                            0 => frame.x.flip(i),
                            1 => frame.z.flip(i),
                            _ => {
                                frame.x.flip(i);
                                frame.z.flip(i);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Odd-parity probability of `c` independent flips of probability `q`.
pub fn odd_parity_probability(q: f64, c: usize) -> f64 {
    0.5 * (1.0 - (1.0 - 2.0 * q).powi(c as i32))
}

/// Pauli error frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub x: BitVec,
    pub z: BitVec,
}

impl Frame {
    pub fn zeros(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
        }
    }

    pub fn xor_assign(&mut self, other: &Frame) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }
}

/// One measured gauge operator: a single qubit or a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaugeMeasurement {
    pub a: usize,
    pub b: Option<usize>,
}

impl GaugeMeasurement {
    fn parity(&self, v: &BitVec) -> bool {
        v.get(self.a) ^ self.b.is_some_and(|b| v.get(b))
    }
}

/// Nearest-neighbour chains used by the aBBS cumulative sweep.
#[derive(Clone, Debug)]
struct Sweep {
    /// `pair[l][p]`: measurement on positions `p, p+1` of line `l`.
    pair: Vec<Vec<usize>>,
    /// `single[l][p]`: single-qubit measurement at an unshared position.
    single: Vec<Vec<Option<usize>>>,
    shared: Vec<Vec<bool>>,
}

/// Everything needed to decode one error kind: X errors are seen by Z-type
/// measurements and corrected column by column, Z errors by X-type
/// measurements row by row.
#[derive(Clone, Debug)]
pub struct Sector {
    /// Error kind this sector corrects.
    pub error: PauliKind,
    pub checks: BitMatrix,
    /// Qubits whose error parity is effective bit `i`.
    pub bits: Vec<Vec<usize>>,
    pub correction_sites: Vec<usize>,
    pub measurements: Vec<GaugeMeasurement>,
    /// Measurement indices whose outcomes multiply to stabilizer `j`.
    pub terms: Vec<Vec<usize>>,
    sweep: Option<Sweep>,
}

/// Line-oriented view of a code's lattice: positions along a line are the
/// coordinates the checks act on.
struct Grid<'a> {
    lines: usize,
    len: usize,
    shared: &'a dyn Fn(usize, usize) -> bool,
}

impl Sector {
    fn selected(grid: &Grid, h: &BitVec, l: usize) -> Result<Vec<usize>> {
        let sel: Vec<usize> = h.support().filter(|&p| (grid.shared)(l, p)).collect();
        if sel.len() % 2 == 1 {
            return Err(Error::Consistency(format!(
                "check selects an odd number of shared sites on line {l}"
            )));
        }
        Ok(sel)
    }

    /// Direct pair measurements between consecutive selected sites,
    /// deduplicated across checks.
    fn direct(
        error: PauliKind,
        checks: &BitMatrix,
        bits: Vec<Vec<usize>>,
        grid: Grid,
        site: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        let mut measurements = Vec::new();
        let mut terms = Vec::with_capacity(checks.rows());
        for h in checks.row_iter() {
            let mut t = Vec::new();
            for l in 0..grid.lines {
                let sel = Self::selected(&grid, &h, l)?;
                for pair in sel.chunks(2) {
                    let m = GaugeMeasurement {
                        a: site(l, pair[0]),
                        b: Some(site(l, pair[1])),
                    };
                    let id = *index.entry(m).or_insert_with(|| {
                        measurements.push(m);
                        measurements.len() - 1
                    });
                    t.push(id);
                }
            }
            terms.push(t);
        }
        Ok(Self::finish(error, checks, bits, measurements, terms, None))
    }

    /// Every neighbour pair along each line plus singles at unshared
    /// positions; stabilizers combine whole intervals of pairs.
    fn chained(
        error: PauliKind,
        checks: &BitMatrix,
        bits: Vec<Vec<usize>>,
        grid: Grid,
        line_site: impl Fn(usize, usize) -> usize,
        single_site: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let mut measurements = Vec::new();
        let mut pair = vec![Vec::new(); grid.lines];
        let mut single = vec![vec![None; grid.len]; grid.lines];
        let mut shared = vec![vec![false; grid.len]; grid.lines];
        for (l, row) in pair.iter_mut().enumerate() {
            for p in 0..grid.len.saturating_sub(1) {
                row.push(measurements.len());
                measurements.push(GaugeMeasurement {
                    a: line_site(l, p),
                    b: Some(line_site(l, p + 1)),
                });
            }
        }
        for l in 0..grid.lines {
            for p in 0..grid.len {
                shared[l][p] = (grid.shared)(l, p);
                if !shared[l][p] {
                    single[l][p] = Some(measurements.len());
                    measurements.push(GaugeMeasurement {
                        a: single_site(l, p),
                        b: None,
                    });
                }
            }
        }
        let mut terms = Vec::with_capacity(checks.rows());
        for h in checks.row_iter() {
            let mut t = Vec::new();
            for l in 0..grid.lines {
                let sel = Self::selected(&grid, &h, l)?;
                for w in sel.chunks(2) {
                    t.extend(&pair[l][w[0]..w[1]]);
                }
                t.extend(h.support().filter_map(|p| single[l][p]));
            }
            terms.push(t);
        }
        let sweep = Sweep { pair, single, shared };
        Ok(Self::finish(error, checks, bits, measurements, terms, Some(sweep)))
    }

    fn finish(
        error: PauliKind,
        checks: &BitMatrix,
        bits: Vec<Vec<usize>>,
        measurements: Vec<GaugeMeasurement>,
        terms: Vec<Vec<usize>>,
        sweep: Option<Sweep>,
    ) -> Self {
        let correction_sites = bits.iter().map(|b| *b.iter().min().expect("nonempty bit")).collect();
        Self {
            error,
            checks: checks.clone(),
            bits,
            correction_sites,
            measurements,
            terms,
            sweep,
        }
    }

    fn errors<'f>(&self, frame: &'f Frame) -> &'f BitVec {
        match self.error {
            PauliKind::X => &frame.x,
            PauliKind::Z => &frame.z,
        }
    }

    /// Error parity of each effective bit.
    pub fn bit_values(&self, frame: &Frame) -> BitVec {
        let e = self.errors(frame);
        BitVec::from_bools(&self.bits.iter().map(|b| b.iter().filter(|&&q| e.get(q)).count() % 2 == 1).collect::<Vec<_>>())
    }

    /// Noiseless stabilizer values.
    pub fn true_syndrome(&self, frame: &Frame) -> BitVec {
        self.checks.mul_vec(&self.bit_values(frame))
    }

    /// `c′_j`: gauge measurements combined into stabilizer `j`.
    pub fn measurement_counts(&self) -> Vec<usize> {
        self.terms.iter().map(Vec::len).collect()
    }

    fn measure<R: Rng + ?Sized>(&self, frame: &Frame, q_prime: f64, rng: &mut R) -> BitVec {
        let e = self.errors(frame);
        let mut out = BitVec::zeros(self.measurements.len());
        for (i, m) in self.measurements.iter().enumerate() {
            let flip = q_prime > 0.0 && rng.gen_bool(q_prime);
            if m.parity(e) ^ flip {
                out.flip(i);
            }
        }
        out
    }

    /// Syndrome as the parity of each stabilizer's listed terms.
    pub fn reconstruct_naive(&self, outcomes: &BitVec) -> BitVec {
        BitVec::from_bools(
            &self
                .terms
                .iter()
                .map(|t| t.iter().fold(false, |acc, &m| acc ^ outcomes.get(m)))
                .collect::<Vec<_>>(),
        )
    }

    /// Syndrome by cumulative sums along each line, with the operation
    /// count; falls back to the term lists when there is no chain structure.
    pub fn reconstruct(&self, outcomes: &BitVec) -> (BitVec, Option<BitMatrix>, usize) {
        let Some(sw) = &self.sweep else {
            let ops = self.terms.iter().map(Vec::len).sum();
            return (self.reconstruct_naive(outcomes), None, ops);
        };
        let lines = sw.shared.len();
        let len = sw.shared.first().map_or(0, Vec::len);
        let mut ops = 0;
        let mut cum = BitMatrix::zeros(lines, len);
        for l in 0..lines {
            let mut acc = false;
            for p in 1..len {
                acc ^= outcomes.get(sw.pair[l][p - 1]);
                cum.set(l, p, acc);
                ops += 1;
            }
        }
        let mut syndrome = BitVec::zeros(self.checks.rows());
        for (j, h) in self.checks.row_iter().enumerate() {
            let mut s = false;
            for l in 0..lines {
                let mut open: Option<usize> = None;
                for p in h.support() {
                    if sw.shared[l][p] {
                        match open.take() {
                            None => open = Some(p),
                            Some(p0) => s ^= cum.get(l, p) ^ cum.get(l, p0),
                        }
                    } else if let Some(m) = sw.single[l][p] {
                        s ^= outcomes.get(m);
                    }
                    ops += 1;
                }
            }
            syndrome.set(j, s);
        }
        (syndrome, Some(cum), ops)
    }
}

/// Outcomes and syndrome of one sector in one round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorRecord {
    pub outcomes: BitVec,
    pub syndrome: BitVec,
    /// Cumulative sums `M_lp` for chained sectors.
    pub cumulative: Option<BitMatrix>,
    pub operations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyndromeRecord {
    /// Z-type measurements, detecting X errors.
    pub x_errors: SectorRecord,
    /// X-type measurements, detecting Z errors.
    pub z_errors: SectorRecord,
}

/// Effective classical noise seen by one sector's decoder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveNoise {
    pub c: Vec<usize>,
    pub c_prime: Vec<usize>,
    pub p: Vec<f64>,
    pub p_prime: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveNoisePair {
    pub x_errors: EffectiveNoise,
    pub z_errors: EffectiveNoise,
}

/// Classical decoder run on each sector's syndrome.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decoder {
    #[default]
    Flip,
}

impl Decoder {
    pub fn decode(&self, h: &BitMatrix, syndrome: &BitVec) -> Result<BitVec> {
        match self {
            Decoder::Flip => Ok(decode_flip(h, syndrome)?.correction),
        }
    }
}

/// Outcome of a single trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub residual: Frame,
    pub x_failed: bool,
    pub z_failed: bool,
    /// Per logical qubit: residual anticommutes with the matching bare logical.
    pub logical_x: BitVec,
    pub logical_z: BitVec,
}

impl TrialOutcome {
    pub fn failed(&self) -> bool {
        self.x_failed || self.z_failed
    }
}

/// Binomial rate with a Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub trials: usize,
    pub failures: usize,
    pub rate: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl RateEstimate {
    pub fn new(failures: usize, trials: usize) -> Self {
        let n = trials.max(1) as f64;
        let p = failures as f64 / n;
        let z2 = WILSON_Z * WILSON_Z;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Self {
            trials,
            failures,
            rate: p,
            std_error: (p * (1.0 - p) / n).sqrt(),
            ci_low: (centre - half).max(0.0),
            ci_high: (centre + half).min(1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub rounds: usize,
    pub noise: NoiseModel,
    pub seed: u64,
    pub failure: RateEstimate,
    pub x_failures: usize,
    pub z_failures: usize,
    pub logical_x_failures: Vec<usize>,
    pub logical_z_failures: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Bbs,
    Abbs,
}

/// Induced-decoder simulator for one BBS or aBBS code.
#[derive(Clone, Debug)]
pub struct Simulator {
    construction: Construction,
    code: SubsystemCode,
    x_errors: Sector,
    z_errors: Sector,
    gauge_x: Echelon,
    gauge_z: Echelon,
    decoder: Decoder,
}

impl Simulator {
    pub fn bbs(code: &BbsCode) -> Result<Self> {
        let a = code.a();
        let (n1, n2) = a.shape();
        let l = code.layout().lattice(bbs::LATTICE).expect("bbs lattice");
        let site = |i: usize, j: usize| l.site(i, j).expect("occupied");
        let rows_shared = |i: usize, j: usize| a.get(i, j);
        let cols_shared = |j: usize, i: usize| a.get(i, j);
        let x_errors = Sector::direct(
            PauliKind::X,
            code.h2(),
            (0..n2).map(|j| code.col_qubits(j)).collect(),
            Grid {
                lines: n1,
                len: n2,
                shared: &rows_shared,
            },
            site,
        )?;
        let z_errors = Sector::direct(
            PauliKind::Z,
            code.h1(),
            (0..n1).map(|i| code.row_qubits(i)).collect(),
            Grid {
                lines: n2,
                len: n1,
                shared: &cols_shared,
            },
            |j, i| site(i, j),
        )?;
        Ok(Self::assemble(Construction::Bbs, code.code(), x_errors, z_errors))
    }

    pub fn abbs(code: &AbbsCode) -> Result<Self> {
        let a = code.a();
        let (n1, n2) = a.shape();
        let layout = code.layout();
        let at = |name: &str, i: usize, j: usize| layout.index(name, i, j).expect("full lattice");
        let rows_shared = |i: usize, j: usize| a.get(i, j);
        let cols_shared = |j: usize, i: usize| a.get(i, j);
        // X errors: Z stabilizers on L1 columns, ZZ chains along L2 rows,
        // single Z on L1-only sites.
        let x_errors = Sector::chained(
            PauliKind::X,
            code.h2(),
            (0..n2).map(|j| (0..n1).map(|i| at(bbs::LATTICE_1, i, j)).collect()).collect(),
            Grid {
                lines: n1,
                len: n2,
                shared: &rows_shared,
            },
            |i, j| at(bbs::LATTICE_2, i, j),
            |i, j| at(bbs::LATTICE_1, i, j),
        )?;
        let z_errors = Sector::chained(
            PauliKind::Z,
            code.h1(),
            (0..n1).map(|i| (0..n2).map(|j| at(bbs::LATTICE_2, i, j)).collect()).collect(),
            Grid {
                lines: n2,
                len: n1,
                shared: &cols_shared,
            },
            |j, i| at(bbs::LATTICE_1, i, j),
            |j, i| at(bbs::LATTICE_2, i, j),
        )?;
        Ok(Self::assemble(Construction::Abbs, code.code(), x_errors, z_errors))
    }

    fn assemble(construction: Construction, code: &SubsystemCode, x_errors: Sector, z_errors: Sector) -> Self {
        Self {
            construction,
            gauge_x: Echelon::new(&code.gauge().gx),
            gauge_z: Echelon::new(&code.gauge().gz),
            code: code.clone(),
            x_errors,
            z_errors,
            decoder: Decoder::Flip,
        }
    }

    pub fn with_decoder(mut self, decoder: Decoder) -> Self {
        self.decoder = decoder;
        self
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn code(&self) -> &SubsystemCode {
        &self.code
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn sector(&self, error: PauliKind) -> &Sector {
        match error {
            PauliKind::X => &self.x_errors,
            PauliKind::Z => &self.z_errors,
        }
    }

    pub fn effective_probs(&self, noise: &NoiseModel) -> EffectiveNoisePair {
        let q = noise.marginal_flip();
        let one = |s: &Sector| {
            let c: Vec<usize> = s.bits.iter().map(Vec::len).collect();
            let c_prime = s.measurement_counts();
            EffectiveNoise {
                p: c.iter().map(|&c| odd_parity_probability(q, c)).collect(),
                p_prime: c_prime.iter().map(|&c| odd_parity_probability(noise.q_prime, c)).collect(),
                c,
                c_prime,
            }
        };
        EffectiveNoisePair {
            x_errors: one(&self.x_errors),
            z_errors: one(&self.z_errors),
        }
    }

    /// Multiplies the frame by a uniformly random gauge element.
    fn randomize_gauge<R: Rng + ?Sized>(&self, frame: &mut Frame, rng: &mut R) {
        for row in self.code.gauge().gx.row_iter() {
            if rng.gen::<bool>() {
                frame.x.xor_assign(&row);
            }
        }
        for row in self.code.gauge().gz.row_iter() {
            if rng.gen::<bool>() {
                frame.z.xor_assign(&row);
            }
        }
    }

    /// Applies data noise to `frame`, measures every gauge operator with
    /// outcome flips of probability `q′`, and reconstructs both syndromes.
    pub fn sample_round<R: Rng + ?Sized>(&self, noise: &NoiseModel, frame: &mut Frame, rng: &mut R) -> SyndromeRecord {
        self.randomize_gauge(frame, rng);
        noise.apply(frame, rng);
        let record = |s: &Sector, rng: &mut R| {
            let outcomes = s.measure(frame, noise.q_prime, rng);
            let (syndrome, cumulative, operations) = s.reconstruct(&outcomes);
            SectorRecord {
                outcomes,
                syndrome,
                cumulative,
                operations,
            }
        };
        let x_errors = record(&self.x_errors, rng);
        let z_errors = record(&self.z_errors, rng);
        SyndromeRecord { x_errors, z_errors }
    }

    /// One X per flagged column and one Z per flagged row, on the
    /// lowest-index qubit.
    pub fn induced_decode(&self, x_syndrome: &BitVec, z_syndrome: &BitVec) -> Result<Frame> {
        let mut fix = Frame::zeros(self.n());
        for (s, syn, out) in [
            (&self.x_errors, x_syndrome, &mut fix.x),
            (&self.z_errors, z_syndrome, &mut fix.z),
        ] {
            if syn.is_zero() {
                continue;
            }
            let e = self.decoder.decode(&s.checks, syn)?;
            for i in e.support() {
                out.flip(s.correction_sites[i]);
            }
        }
        Ok(fix)
    }

    /// Classifies a residual frame against the gauge group.
    pub fn classify(&self, residual: Frame) -> TrialOutcome {
        let (lx, lz) = self.code.logical_reps();
        TrialOutcome {
            x_failed: !self.gauge_x.contains(&residual.x),
            z_failed: !self.gauge_z.contains(&residual.z),
            logical_x: lz.mul_vec(&residual.x),
            logical_z: lx.mul_vec(&residual.z),
            residual,
        }
    }

    /// `rounds` noisy rounds with decoding, then one round without new data
    /// noise or measurement faults.
    pub fn run_trial<R: Rng + ?Sized>(&self, noise: &NoiseModel, rounds: usize, rng: &mut R) -> Result<TrialOutcome> {
        let mut frame = Frame::zeros(self.n());
        for _ in 0..rounds {
            let rec = self.sample_round(noise, &mut frame, rng);
            frame.xor_assign(&self.induced_decode(&rec.x_errors.syndrome, &rec.z_errors.syndrome)?);
        }
        let rec = self.sample_round(&NoiseModel::ideal(), &mut frame, rng);
        frame.xor_assign(&self.induced_decode(&rec.x_errors.syndrome, &rec.z_errors.syndrome)?);
        Ok(self.classify(frame))
    }

    /// Independent trials in parallel; trial `t` draws from stream `t` of a
    /// ChaCha8 generator seeded with `seed`.
    pub fn run_trials(&self, noise: &NoiseModel, rounds: usize, trials: usize, seed: u64) -> Result<TrialReport> {
        if trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        let k = self.code.k();
        let tally = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(seed, t);
                self.run_trial(noise, rounds, &mut rng).map(|o| Tally::from_outcome(&o, k))
            })
            .try_reduce(|| Tally::new(k), |a, b| Ok(a.merge(b)))?;
        Ok(TrialReport {
            rounds,
            noise: *noise,
            seed,
            failure: RateEstimate::new(tally.any, trials),
            x_failures: tally.x,
            z_failures: tally.z,
            logical_x_failures: tally.lx,
            logical_z_failures: tally.lz,
        })
    }
}

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

struct Tally {
    any: usize,
    x: usize,
    z: usize,
    lx: Vec<usize>,
    lz: Vec<usize>,
}

impl Tally {
    fn new(k: usize) -> Self {
        Self {
            any: 0,
            x: 0,
            z: 0,
            lx: vec![0; k],
            lz: vec![0; k],
        }
    }

    fn from_outcome(o: &TrialOutcome, k: usize) -> Self {
        let mut t = Self::new(k);
        t.any = o.failed() as usize;
        t.x = o.x_failed as usize;
        t.z = o.z_failed as usize;
        for i in o.logical_x.support() {
            t.lx[i] = 1;
        }
        for i in o.logical_z.support() {
            t.lz[i] = 1;
        }
        t
    }

    fn merge(mut self, other: Self) -> Self {
        self.any += other.any;
        self.x += other.x;
        self.z += other.z;
        for (a, b) in self.lx.iter_mut().zip(other.lx) {
            *a += b;
        }
        for (a, b) in self.lz.iter_mut().zip(other.lz) {
            *a += b;
        }
        self
    }
}

/// Classical counterpart: bit flips with probabilities `p`, check faults
/// with `p_prime`, flip decoding each round, then one ideal round.
/// Failure means a nonzero final error.
pub fn run_classical_trials(
    h: &BitMatrix,
    p: &[f64],
    p_prime: &[f64],
    rounds: usize,
    trials: usize,
    seed: u64,
) -> Result<RateEstimate> {
    if p.len() != h.cols() || p_prime.len() != h.rows() {
        return Err(Error::Dimension {
            op: "classical noise",
            lhs: (h.rows(), h.cols()),
            rhs: (p_prime.len(), p.len()),
        });
    }
    let failures = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut e = BitVec::zeros(h.cols());
            for _ in 0..rounds {
                for (i, &pi) in p.iter().enumerate() {
                    if pi > 0.0 && rng.gen_bool(pi) {
                        e.flip(i);
                    }
                }
                let mut u = h.mul_vec(&e);
                for (j, &pj) in p_prime.iter().enumerate() {
                    if pj > 0.0 && rng.gen_bool(pj) {
                        u.flip(j);
                    }
                }
                e.xor_assign(&decode_flip(h, &u)?.correction);
            }
            e.xor_assign(&decode_flip(h, &h.mul_vec(&e))?.correction);
            Ok(!e.is_zero() as usize)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(RateEstimate::new(failures, trials))
}

/// Quantum failure rate against the sum of the two classical sector rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InducedBoundCheck {
    pub quantum: RateEstimate,
    pub classical_x: RateEstimate,
    pub classical_z: RateEstimate,
    /// `p̄_X + p̄_Z`, which is `2p̄` for symmetric `A`.
    pub bound: f64,
    pub combined_std_error: f64,
    pub holds: bool,
}

/// Runs the quantum simulation and one classical simulation per sector with
/// the effective probabilities; passes if `q̄ ≤ p̄_X + p̄_Z + sigmas·SE`.
pub fn induced_bound_check(
    sim: &Simulator,
    noise: &NoiseModel,
    rounds: usize,
    trials: usize,
    seed: u64,
    sigmas: f64,
) -> Result<InducedBoundCheck> {
    let quantum = sim.run_trials(noise, rounds, trials, seed)?.failure;
    let eff = sim.effective_probs(noise);
    let classical_x = run_classical_trials(
        &sim.x_errors.checks,
        &eff.x_errors.p,
        &eff.x_errors.p_prime,
        rounds,
        trials,
        seed ^ 0x5853,
    )?;
    let classical_z = run_classical_trials(
        &sim.z_errors.checks,
        &eff.z_errors.p,
        &eff.z_errors.p_prime,
        rounds,
        trials,
        seed ^ 0x5a53,
    )?;
    let bound = classical_x.rate + classical_z.rate;
    let combined_std_error =
        (quantum.std_error.powi(2) + classical_x.std_error.powi(2) + classical_z.std_error.powi(2)).sqrt();
    Ok(InducedBoundCheck {
        holds: quantum.rate <= bound + sigmas * combined_std_error,
        quantum,
        classical_x,
        classical_z,
        bound,
        combined_std_error,
    })
}

/// Effective bit and check flips produced by one round from a clean frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveSample {
    pub x_bits: BitVec,
    pub x_checks: BitVec,
    pub z_bits: BitVec,
    pub z_checks: BitVec,
}

impl Simulator {
    pub fn sample_effective<R: Rng + ?Sized>(&self, noise: &NoiseModel, rng: &mut R) -> EffectiveSample {
        let mut frame = Frame::zeros(self.n());
        let rec = self.sample_round(noise, &mut frame, rng);
        let xs = &self.x_errors;
        let zs = &self.z_errors;
        EffectiveSample {
            x_bits: xs.bit_values(&frame),
            x_checks: rec.x_errors.syndrome.xor(&xs.true_syndrome(&frame)),
            z_bits: zs.bit_values(&frame),
            z_checks: rec.z_errors.syndrome.xor(&zs.true_syndrome(&frame)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbs::{abbs_from_matrix, bbs_from_matrix};
    use crate::classical::{hamming_code, repetition_code};
    use proptest::prelude::{any, prop_assert_eq, proptest, ProptestConfig};

    fn cycle() -> BitMatrix {
        BitMatrix::from_strs(&["110", "101", "011"])
    }

    fn binomial_odd(q: f64, c: usize) -> f64 {
        let mut total = 0.0;
        let mut binom = 1.0;
        for l in 0..=c {
            if l > 0 {
                binom = binom * (c - l + 1) as f64 / l as f64;
            }
            if l % 2 == 1 {
                total += binom * q.powi(l as i32) * (1.0 - q).powi((c - l) as i32);
            }
        }
        total
    }

    #[test]
    fn odd_parity_examples() {
        assert_eq!(odd_parity_probability(0.0, 5), 0.0);
        assert!((odd_parity_probability(0.3, 1) - 0.3).abs() < 1e-15);
        assert!((binomial_odd(0.1, 3) - 0.244).abs() < 1e-12);
        for c in 0..12 {
            for q in [0.01, 0.1, 0.37, 0.5] {
                assert!((odd_parity_probability(q, c) - binomial_odd(q, c)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn noise_validation() {
        assert!(NoiseModel::new(0.6, 0.0).is_err());
        assert!(NoiseModel::new(0.1, -0.1).is_err());
        assert!(NoiseModel::depolarizing(0.6, 0.0).is_ok());
        assert!((NoiseModel::depolarizing(0.3, 0.0).unwrap().marginal_flip() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn bbs_measurement_counts() {
        let code = bbs_from_matrix(&BitMatrix::ones(3, 3)).unwrap();
        let sim = Simulator::bbs(&code).unwrap();
        let eff = sim.effective_probs(&NoiseModel::new(0.1, 0.05).unwrap());
        assert_eq!(eff.x_errors.c, vec![3, 3, 3]);
        // c′_j = |A diag(h_j)| / 2
        for (h, &c) in code.h2().row_iter().zip(&eff.x_errors.c_prime) {
            let w = BitMatrix::ones(3, 3).mul(&BitMatrix::diag(&h)).unwrap().weight();
            assert_eq!(c, w / 2);
        }
        assert!((eff.x_errors.p[0] - 0.244).abs() < 1e-12);
        let zero = sim.effective_probs(&NoiseModel::ideal());
        assert!(zero.z_errors.p.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn noiseless_syndrome_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for sim in [
            Simulator::bbs(&bbs_from_matrix(&cycle()).unwrap()).unwrap(),
            Simulator::abbs(&abbs_from_matrix(&cycle()).unwrap()).unwrap(),
        ] {
            for _ in 0..50 {
                let mut frame = Frame {
                    x: BitVec::random(sim.n(), &mut rng),
                    z: BitVec::random(sim.n(), &mut rng),
                };
                let rec = sim.sample_round(&NoiseModel::ideal(), &mut frame, &mut rng);
                assert_eq!(rec.x_errors.syndrome, sim.x_errors.true_syndrome(&frame));
                assert_eq!(rec.z_errors.syndrome, sim.z_errors.true_syndrome(&frame));
                // the stabilizers themselves agree with the code's stabilizer group
                let sz = &sim.code().stabilizer().gz;
                assert_eq!(sz.mul_vec(&frame.x).is_zero(), rec.x_errors.syndrome.is_zero());
            }
        }
    }

    #[test]
    fn single_error_fires_column_checks() {
        let code = bbs_from_matrix(&cycle()).unwrap();
        let sim = Simulator::bbs(&code).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for j in 0..3 {
            let q = code.col_qubits(j)[0];
            let mut frame = Frame::zeros(sim.n());
            frame.x.flip(q);
            let rec = sim.sample_round(&NoiseModel::ideal(), &mut frame, &mut rng);
            assert_eq!(rec.x_errors.syndrome, code.h2().column(j));
        }
    }

    #[test]
    fn single_flipped_outcome() {
        let sim = Simulator::abbs(&abbs_from_matrix(&cycle()).unwrap()).unwrap();
        let s = &sim.x_errors;
        for m in 0..s.measurements.len() {
            let outcomes = BitVec::unit(s.measurements.len(), m);
            let (syn, _, _) = s.reconstruct(&outcomes);
            let expect = BitVec::from_bools(&s.terms.iter().map(|t| t.iter().filter(|&&i| i == m).count() % 2 == 1).collect::<Vec<_>>());
            assert_eq!(syn, expect);
        }
    }

    #[test]
    fn decode_examples() {
        let sim = Simulator::bbs(&bbs_from_matrix(&cycle()).unwrap()).unwrap();
        assert!(sim
            .induced_decode(&BitVec::zeros(1), &BitVec::zeros(1))
            .unwrap()
            .is_identity());

        // Bacon-Shor 3×3: two X errors in one column leave an even column
        let bs = bbs_from_matrix(&BitMatrix::ones(3, 3)).unwrap();
        let sim = Simulator::bbs(&bs).unwrap();
        let mut frame = Frame::zeros(9);
        let col = bs.col_qubits(1);
        frame.x.flip(col[0]);
        frame.x.flip(col[2]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rec = sim.sample_round(&NoiseModel::ideal(), &mut frame, &mut rng);
        assert!(rec.x_errors.syndrome.is_zero());
        assert!(!sim.classify(frame).failed());
    }

    #[test]
    fn hamming_single_errors_corrected() {
        let h = hamming_code();
        let q = BitMatrix::from_strs(&["1000", "0100", "0010", "0001"]);
        let code = bbs::bbs_from_codes(&h, &h, &q).unwrap();
        let sim = Simulator::bbs(&code).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in 0..sim.n() {
            for kind in [PauliKind::X, PauliKind::Z] {
                let mut frame = Frame::zeros(sim.n());
                match kind {
                    PauliKind::X => frame.x.flip(q),
                    PauliKind::Z => frame.z.flip(q),
                }
                let rec = sim.sample_round(&NoiseModel::ideal(), &mut frame, &mut rng);
                frame.xor_assign(&sim.induced_decode(&rec.x_errors.syndrome, &rec.z_errors.syndrome).unwrap());
                assert!(!sim.classify(frame).failed(), "qubit {q} {kind:?}");
            }
        }
    }

    #[test]
    fn zero_noise_never_fails() {
        let code = bbs_from_matrix(&cycle()).unwrap();
        let sim = Simulator::bbs(&code).unwrap();
        let r = sim.run_trials(&NoiseModel::ideal(), 3, 200, 9).unwrap();
        assert_eq!(r.failure.failures, 0);
        let a = Simulator::abbs(&abbs_from_matrix(&cycle()).unwrap()).unwrap();
        assert_eq!(a.run_trials(&NoiseModel::ideal(), 1, 100, 9).unwrap().failure.failures, 0);
        assert!(sim.run_trials(&NoiseModel::ideal(), 1, 0, 9).is_err());
    }

    #[test]
    fn trials_are_reproducible() {
        let code = bbs_from_matrix(&BitMatrix::ones(3, 3)).unwrap();
        let sim = Simulator::bbs(&code).unwrap();
        let noise = NoiseModel::new(0.08, 0.02).unwrap();
        let a = sim.run_trials(&noise, 2, 500, 77).unwrap();
        let b = sim.run_trials(&noise, 2, 500, 77).unwrap();
        assert_eq!(a, b);
        assert!(a.failure.failures > 0);
        assert!(a.failure.ci_low <= a.failure.rate && a.failure.rate <= a.failure.ci_high);
    }

    #[test]
    fn wilson_interval() {
        let r = RateEstimate::new(0, 100);
        assert!(r.ci_low < 1e-12);
        assert!(r.ci_high > 0.03 && r.ci_high < 0.04);
        let r = RateEstimate::new(50, 100);
        assert!((r.ci_low + r.ci_high - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_matches_naive_exhaustively() {
        let sim = Simulator::abbs(&abbs_from_matrix(&BitMatrix::from_strs(&["11", "11"])).unwrap()).unwrap();
        for s in [&sim.x_errors, &sim.z_errors] {
            let m = s.measurements.len();
            assert!(m <= 12);
            for mask in 0u64..(1 << m) {
                let o = BitVec::from_support(m, (0..m).filter(|i| mask >> i & 1 == 1));
                assert_eq!(s.reconstruct(&o).0, s.reconstruct_naive(&o));
            }
        }
    }

    #[test]
    fn bacon_shor_repetition_rate_is_small() {
        let rep = repetition_code(3).unwrap();
        let code = bbs::bbs_from_codes(&rep, &rep, &BitMatrix::identity(1)).unwrap();
        let sim = Simulator::bbs(&code).unwrap();
        let r = sim.run_trials(&NoiseModel::new(0.01, 0.0).unwrap(), 1, 2000, 4).unwrap();
        assert!(r.failure.rate < 0.05);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn syndrome_linear_and_gauge_invariant(seed in any::<u64>(), abbs in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut a = BitMatrix::random(3, 3, &mut rng);
            while a.is_zero() {
                a = BitMatrix::random(3, 3, &mut rng);
            }
            let sim = if abbs {
                Simulator::abbs(&abbs_from_matrix(&a).unwrap()).unwrap()
            } else {
                Simulator::bbs(&bbs_from_matrix(&a).unwrap()).unwrap()
            };
            let n = sim.n();
            let f1 = Frame { x: BitVec::random(n, &mut rng), z: BitVec::random(n, &mut rng) };
            let f2 = Frame { x: BitVec::random(n, &mut rng), z: BitVec::random(n, &mut rng) };
            let mut both = f1.clone();
            both.xor_assign(&f2);
            let ideal = NoiseModel::ideal();
            let s = |f: &Frame, rng: &mut ChaCha8Rng| {
                let mut f = f.clone();
                let r = sim.sample_round(&ideal, &mut f, rng);
                (r.x_errors.syndrome, r.z_errors.syndrome)
            };
            let (x1, z1) = s(&f1, &mut rng);
            let (x2, z2) = s(&f2, &mut rng);
            let (x12, z12) = s(&both, &mut rng);
            prop_assert_eq!(x12, x1.xor(&x2));
            prop_assert_eq!(z12, z1.xor(&z2));

            let g = sim.code().gauge();
            let mut moved = f1.clone();
            for row in g.gx.row_iter() {
                if rng.gen::<bool>() { moved.x.xor_assign(&row); }
            }
            for row in g.gz.row_iter() {
                if rng.gen::<bool>() { moved.z.xor_assign(&row); }
            }
            let (mx, mz) = s(&moved, &mut rng);
            prop_assert_eq!(mx, x1);
            prop_assert_eq!(mz, z1);
        }
    }
}
