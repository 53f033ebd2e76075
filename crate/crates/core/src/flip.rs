//! Bit-flip decoding of expander codes from noisy syndromes.
//!
//! Bits are kept in buckets keyed by their flip gain `2v − deg`, where `v`
//! counts the unsatisfied checks touching the bit. The decoder repeatedly
//! flips the lowest-index bit of the highest bucket while that gain is
//! positive. For a left-regular graph of degree `b` this is the rule
//! "flip when `2v > b`" applied to the highest-`v` bucket.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expander::ExpansionCertificate;
use crate::f2::{BitMatrix, BitVec};

/// Output of [`decode_flip`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    pub correction: BitVec,
    pub flip_count: usize,
    /// Residual unsatisfied checks `u + H e′`.
    pub residual: BitVec,
    /// Check toggles plus bucket moves, for the linear-time bound.
    pub operations: usize,
    /// `|u′|` before the first flip and after each flip, when requested.
    pub trace: Option<Vec<usize>>,
}

/// Mutable decoder state for one syndrome.
#[derive(Clone, Debug)]
pub struct FlipState {
    n: usize,
    bit_checks: Vec<Vec<usize>>,
    check_bits: Vec<Vec<usize>>,
    unsat: BitVec,
    unsat_weight: usize,
    v: Vec<usize>,
    max_degree: usize,
    buckets: Vec<BTreeSet<usize>>,
    top: usize,
    correction: BitVec,
    flip_count: usize,
    operations: usize,
    trace: Option<Vec<usize>>,
}

impl FlipState {
    pub fn new(h: &BitMatrix, u: &BitVec) -> Result<Self> {
        if u.len() != h.rows() {
            return Err(Error::Dimension {
                op: "flip syndrome",
                lhs: h.shape(),
                rhs: (u.len(), 1),
            });
        }
        let n = h.cols();
        let check_bits: Vec<Vec<usize>> = (0..h.rows()).map(|r| h.row_support(r).collect()).collect();
        let mut bit_checks = vec![Vec::new(); n];
        for (r, bits) in check_bits.iter().enumerate() {
            for &i in bits {
                bit_checks[i].push(r);
            }
        }
        let max_degree = bit_checks.iter().map(Vec::len).max().unwrap_or(0);
        let v: Vec<usize> = bit_checks
            .iter()
            .map(|cs| cs.iter().filter(|&&r| u.get(r)).count())
            .collect();
        let mut state = Self {
            n,
            unsat_weight: u.weight(),
            unsat: u.clone(),
            max_degree,
            buckets: vec![BTreeSet::new(); 2 * max_degree + 1],
            top: 0,
            correction: BitVec::zeros(n),
            flip_count: 0,
            operations: 0,
            trace: None,
            bit_checks,
            check_bits,
            v,
        };
        for i in 0..n {
            let k = state.bucket_of(i);
            state.buckets[k].insert(i);
            state.top = state.top.max(k);
        }
        Ok(state)
    }

    /// Records `|u′|` after every flip.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(vec![self.unsat_weight]);
        self
    }

    fn bucket_of(&self, i: usize) -> usize {
        // gain 2v − deg shifted into 0..=2b
        2 * self.v[i] + self.max_degree - self.bit_checks[i].len()
    }

    fn gain_of_bucket(&self, k: usize) -> isize {
        k as isize - self.max_degree as isize
    }

    pub fn unsatisfied(&self) -> &BitVec {
        &self.unsat
    }

    pub fn unsatisfied_weight(&self) -> usize {
        self.unsat_weight
    }

    pub fn unsatisfied_counts(&self) -> &[usize] {
        &self.v
    }

    pub fn correction(&self) -> &BitVec {
        &self.correction
    }

    pub fn flip_count(&self) -> usize {
        self.flip_count
    }

    pub fn operations(&self) -> usize {
        self.operations
    }

    /// Next bit to flip, or `None` once no flip lowers `|u′|`.
    pub fn select(&mut self) -> Option<usize> {
        while self.top > 0 && self.buckets[self.top].is_empty() {
            self.top -= 1;
        }
        if self.gain_of_bucket(self.top) <= 0 {
            return None;
        }
        self.buckets[self.top].first().copied()
    }

    /// Flips bit `i`: toggles its checks and moves every affected bit.
    pub fn flip(&mut self, i: usize) {
        self.correction.flip(i);
        self.flip_count += 1;
        for idx in 0..self.bit_checks[i].len() {
            let r = self.bit_checks[i][idx];
            let now_unsat = !self.unsat.get(r);
            self.unsat.set(r, now_unsat);
            self.operations += 1;
            if now_unsat {
                self.unsat_weight += 1;
            } else {
                self.unsat_weight -= 1;
            }
            for jdx in 0..self.check_bits[r].len() {
                let j = self.check_bits[r][jdx];
                let old = self.bucket_of(j);
                if now_unsat {
                    self.v[j] += 1;
                } else {
                    self.v[j] -= 1;
                }
                let new = self.bucket_of(j);
                self.buckets[old].remove(&j);
                self.buckets[new].insert(j);
                self.top = self.top.max(new);
                self.operations += 1;
            }
        }
        if let Some(t) = self.trace.as_mut() {
            t.push(self.unsat_weight);
        }
    }

    /// Runs to completion.
    pub fn run(mut self) -> Correction {
        while let Some(i) = self.select() {
            self.flip(i);
        }
        Correction {
            correction: self.correction,
            flip_count: self.flip_count,
            residual: self.unsat,
            operations: self.operations,
            trace: self.trace,
        }
    }

    /// Recomputes counts and bucket membership from scratch.
    pub fn check_invariants(&self) -> bool {
        (0..self.n).all(|i| {
            let v = self.bit_checks[i].iter().filter(|&&r| self.unsat.get(r)).count();
            let k = self.bucket_of(i);
            v == self.v[i]
                && self.buckets[k].contains(&i)
                && self.buckets.iter().filter(|b| b.contains(&i)).count() == 1
        }) && self.unsat.weight() == self.unsat_weight
    }
}

/// Decodes syndrome `u` of check matrix `h`.
pub fn decode_flip(h: &BitMatrix, u: &BitVec) -> Result<Correction> {
    Ok(FlipState::new(h, u)?.run())
}

/// As [`decode_flip`], also recording the `|u′|` trace.
pub fn decode_flip_traced(h: &BitMatrix, u: &BitVec) -> Result<Correction> {
    Ok(FlipState::new(h, u)?.with_trace().run())
}

// Slack for comparisons against real-valued budgets.
const BUDGET_TOL: f64 = 1e-9;

/// Error budgets for flip decoding with syndrome noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlipGuarantee {
    pub n: usize,
    pub m: usize,
    pub b: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub r: usize,
    /// `⌊(1−δ)n⌋`.
    pub subset_bound: usize,
    /// `(1−2ε)⌊(1−δ)n⌋`.
    pub capacity: f64,
    /// Largest `|e|` admissible with `f = 0`.
    pub data_budget: usize,
    /// Largest `|f|` admissible with `e = 0`.
    pub check_budget: usize,
    /// Why the parameters fall outside the guarantee, if they do.
    pub inadmissible: Option<String>,
}

/// Budgets for parameters `(n, m, b, δ, ε, r)`. Parameter violations are
/// reported through [`FlipGuarantee::inadmissible`].
pub fn flip_guarantee(n: usize, m: usize, b: usize, delta: f64, epsilon: f64, r: usize) -> FlipGuarantee {
    // guard against (1−δ)n landing just under an integer
    let subset_bound = ((1.0 - delta) * n as f64 + BUDGET_TOL).floor().max(0.0) as usize;
    build_guarantee(n, m, b, delta, epsilon, r, subset_bound)
}

impl FlipGuarantee {
    /// Budgets implied by an exhaustive expansion certificate.
    pub fn from_certificate(cert: &ExpansionCertificate, r: usize) -> Self {
        build_guarantee(
            cert.n_left,
            cert.n_right,
            cert.degree,
            cert.certified_delta,
            cert.certified_epsilon,
            r,
            cert.max_subset_size,
        )
    }

    pub fn is_admissible(&self) -> bool {
        self.inadmissible.is_none()
    }

    /// `|e| + (2/b)|f| ≤ (1−2ε)⌊(1−δ)n⌋`.
    pub fn admissible(&self, e: usize, f: usize) -> bool {
        self.is_admissible()
            && e as f64 + 2.0 * f as f64 / self.b as f64 <= self.capacity + BUDGET_TOL
    }

    /// `|e| + |f| ≤ (1−2ε)⌊(1−δ)n⌋`.
    pub fn admissible_combined(&self, e: usize, f: usize) -> bool {
        self.is_admissible() && (e + f) as f64 <= self.capacity + BUDGET_TOL
    }

    /// `|e| + 2|f| ≤ (1−2ε)⌊(1−δ)n⌋`, the repeated-decoding regime.
    pub fn steady_state(&self, e: usize, f: usize) -> bool {
        self.is_admissible() && (e + 2 * f) as f64 <= self.capacity + BUDGET_TOL
    }

    /// Largest integer below `|f|/r`: the most residual errors allowed.
    pub fn residual_bound(&self, f: usize) -> usize {
        if f == 0 {
            0
        } else {
            f.div_ceil(self.r) - 1
        }
    }
}

fn build_guarantee(
    n: usize,
    m: usize,
    b: usize,
    delta: f64,
    epsilon: f64,
    r: usize,
    subset_bound: usize,
) -> FlipGuarantee {
    let inadmissible = if r < 1 || 4 * r >= b {
        Some(format!("need 1 <= r < b/4, got r={r}, b={b}"))
    } else if epsilon.is_nan() || epsilon >= 0.25 - r as f64 / b as f64 {
        Some(format!("need eps < 1/4 - r/b, got eps={epsilon}, r={r}, b={b}"))
    } else if !(0.0..=1.0).contains(&delta) {
        Some(format!("delta {delta} outside [0, 1]"))
    } else {
        None
    };
    let capacity = (1.0 - 2.0 * epsilon) * subset_bound as f64;
    let (data_budget, check_budget) = if inadmissible.is_none() {
        (
            (capacity + BUDGET_TOL).floor() as usize,
            (capacity * b as f64 / 2.0 + BUDGET_TOL).floor() as usize,
        )
    } else {
        (0, 0)
    };
    FlipGuarantee {
        n,
        m,
        b,
        delta,
        epsilon,
        r,
        subset_bound,
        capacity,
        data_budget,
        check_budget,
        inadmissible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expander::{expansion_profile, BipartiteGraph};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn syndrome(h: &BitMatrix, e: &BitVec) -> BitVec {
        h.mul_vec(e)
    }

    // Minimum-weight error consistent with a syndrome, by enumeration.
    fn nearest(h: &BitMatrix, u: &BitVec) -> Vec<BitVec> {
        let n = h.cols();
        let mut best = usize::MAX;
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let e = BitVec::from_support(n, (0..n).filter(|i| mask >> i & 1 == 1));
            if syndrome(h, &e) == *u {
                let w = e.weight();
                if w < best {
                    best = w;
                    out.clear();
                }
                if w == best {
                    out.push(e);
                }
            }
        }
        out
    }

    #[test]
    fn zero_syndrome() {
        let h = crate::classical::hamming_checks();
        let c = decode_flip(&h, &BitVec::zeros(3)).unwrap();
        assert!(c.correction.is_zero());
        assert_eq!(c.flip_count, 0);
        assert!(decode_flip(&h, &BitVec::zeros(4)).is_err());
    }

    #[test]
    fn repetition_single_error() {
        let h = crate::classical::repetition_checks(5);
        for i in 0..5 {
            let e = BitVec::unit(5, i);
            let c = decode_flip(&h, &syndrome(&h, &e)).unwrap();
            assert_eq!(c.correction, e);
        }
    }

    #[test]
    fn state_invariants_hold_during_decode() {
        let g = crate::expander::random_bipartite(14, 10, 3, 5).unwrap();
        let h = g.checks();
        for seed in 0..20u64 {
            let u = BitVec::random(10, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut st = FlipState::new(&h, &u).unwrap();
            assert!(st.check_invariants());
            while let Some(i) = st.select() {
                let before = st.unsatisfied_weight();
                st.flip(i);
                assert!(st.check_invariants());
                assert!(st.unsatisfied_weight() < before);
            }
            // local optimum: no single flip improves
            for i in 0..14 {
                let deg = h.col_weight(i);
                assert!(2 * st.unsatisfied_counts()[i] <= deg);
            }
        }
    }

    #[test]
    fn complete_graph_code_recovers_within_budget() {
        let g = BipartiteGraph::complete_graph_incidence(8);
        let h = g.checks();
        let cert = expansion_profile(&g, 2).unwrap();
        let guarantee = FlipGuarantee::from_certificate(&cert, 1);
        assert!(guarantee.is_admissible());
        assert_eq!(guarantee.data_budget, 1);
        for i in 0..8 {
            let e = BitVec::unit(8, i);
            let u = syndrome(&h, &e);
            let c = decode_flip(&h, &u).unwrap();
            assert_eq!(c.correction, e);
            assert_eq!(nearest(&h, &u), vec![e]);
        }
    }

    #[test]
    fn matches_nearest_decoding_on_small_codes() {
        // f = 0 and |e| under half the distance on graphs with few shared checks
        let g = BipartiteGraph::complete_graph_incidence(6);
        let h = g.checks();
        for mask in 0u32..(1 << 6) {
            if mask.count_ones() > 2 {
                continue;
            }
            let e = BitVec::from_support(6, (0..6).filter(|i| mask >> i & 1 == 1));
            let u = syndrome(&h, &e);
            let c = decode_flip(&h, &u).unwrap();
            let best = nearest(&h, &u);
            assert_eq!(best.len(), 1);
            assert_eq!(c.correction, best[0]);
        }
    }

    #[test]
    fn guarantee_examples() {
        let g = flip_guarantee(20, 10, 5, 0.8, 0.04, 1);
        assert!(g.is_admissible());
        assert_eq!(g.subset_bound, 4);
        let direct = (1.0f64 - 2.0 * 0.04) * 4.0;
        assert!((g.capacity - direct).abs() < 1e-12);
        assert_eq!(g.data_budget, 3);
        assert!(g.admissible(3, 0));
        assert!(!g.admissible(4, 0));
        assert!(g.admissible(2, 4));
        assert!(!g.admissible(2, 5));
        assert!(g.admissible_combined(2, 1));
        assert!(!g.admissible_combined(2, 2));
        assert!(g.steady_state(1, 1));
        assert!(!g.steady_state(2, 1));
        assert_eq!(g.residual_bound(0), 0);
        assert_eq!(g.residual_bound(1), 0);
        assert_eq!(g.residual_bound(3), 2);

        // boundary of the strict inequality
        let edge = flip_guarantee(20, 10, 8, 0.8, 0.25 - 1.0 / 8.0, 1);
        assert!(!edge.is_admissible());
        assert!(!edge.admissible(0, 0));
        assert!(!flip_guarantee(20, 10, 4, 0.8, 0.0, 1).is_admissible());
        assert!(!flip_guarantee(20, 10, 8, 0.8, 0.0, 0).is_admissible());
        assert_eq!(flip_guarantee(20, 10, 8, 0.8, 0.01, 2).residual_bound(5), 2);
    }

    proptest! {
        #[test]
        fn trace_is_strictly_decreasing(seed in 0u64..500, n in 6usize..24, b in 2usize..5) {
            let g = crate::expander::random_bipartite(n, n, b, seed).unwrap();
            let h = g.checks();
            let u = BitVec::random(n, &mut ChaCha8Rng::seed_from_u64(seed ^ 0xabc));
            let c = decode_flip_traced(&h, &u).unwrap();
            let trace = c.trace.unwrap();
            prop_assert!(trace.windows(2).all(|w| w[1] < w[0]));
            prop_assert_eq!(c.flip_count, trace.len() - 1);
            prop_assert!(c.flip_count <= u.weight());
            prop_assert_eq!(&c.residual, &u.xor(&h.mul_vec(&c.correction)));
            // each flip costs at most b checks times c bits, plus the check toggles
            let (bmax, cmax) = (g.left_degree(), g.right_degree());
            prop_assert!(c.operations <= c.flip_count * bmax * (cmax + 1));
        }
    }
}
