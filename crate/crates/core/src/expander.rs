//! Bipartite graphs, exhaustive expansion certificates and Tanner codes.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::LinearCode;
use crate::error::{Error, Result};
use crate::f2::BitMatrix;

/// Maximum number of left subsets enumerated by [`expansion_profile`].
pub const SUBSET_BUDGET: u128 = 10_000_000;

/// A bipartite graph with left nodes (code bits) and right nodes (checks).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    left_adj: Vec<Vec<usize>>,
    right_adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    /// Builds a graph from per-left-node neighbor lists. Lists are sorted;
    /// repeated neighbors (parallel edges) are rejected.
    pub fn new(n_right: usize, mut left_adj: Vec<Vec<usize>>) -> Result<Self> {
        let mut right_adj = vec![Vec::new(); n_right];
        for (v, nbrs) in left_adj.iter_mut().enumerate() {
            nbrs.sort_unstable();
            for w in nbrs.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::Parameter(format!("parallel edge ({v}, {})", w[0])));
                }
            }
            for &u in nbrs.iter() {
                if u >= n_right {
                    return Err(Error::Parameter(format!("right node {u} out of range")));
                }
                right_adj[u].push(v);
            }
        }
        Ok(Self {
            n_left: left_adj.len(),
            n_right,
            left_adj,
            right_adj,
        })
    }

    /// The Tanner graph of a check matrix: left nodes are columns, right nodes rows.
    pub fn from_checks(h: &BitMatrix) -> Self {
        let ht = h.transpose();
        let left_adj = (0..h.cols()).map(|j| ht.row_support(j).collect()).collect();
        Self::new(h.rows(), left_adj).expect("matrix incidence has no parallel edges")
    }

    /// Vertex-edge incidence of the complete graph `K_k`: `k` left nodes of
    /// degree `k − 1`, one right node per pair, every pair of left nodes
    /// sharing exactly one right neighbor.
    pub fn complete_graph_incidence(k: usize) -> Self {
        let mut left_adj = vec![Vec::new(); k];
        let mut e = 0;
        for a in 0..k {
            for b in a + 1..k {
                left_adj[a].push(e);
                left_adj[b].push(e);
                e += 1;
            }
        }
        Self::new(e, left_adj).expect("simple graph")
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn left_neighbors(&self, v: usize) -> &[usize] {
        &self.left_adj[v]
    }

    pub fn right_neighbors(&self, u: usize) -> &[usize] {
        &self.right_adj[u]
    }

    pub fn edge_count(&self) -> usize {
        self.left_adj.iter().map(Vec::len).sum()
    }

    /// Maximum left degree.
    pub fn left_degree(&self) -> usize {
        self.left_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn right_degree(&self) -> usize {
        self.right_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_left_regular(&self) -> bool {
        let b = self.left_degree();
        self.left_adj.iter().all(|a| a.len() == b)
    }

    /// Incidence matrix `Λ` (left × right).
    pub fn incidence(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.n_left, self.n_right);
        for (v, nbrs) in self.left_adj.iter().enumerate() {
            for &u in nbrs {
                m.set(v, u, true);
            }
        }
        m
    }

    /// Check matrix `H = Λᵀ`.
    pub fn checks(&self) -> BitMatrix {
        self.incidence().transpose()
    }

    pub fn neighborhood_size(&self, subset: &[usize]) -> usize {
        let mut seen = vec![false; self.n_right];
        let mut count = 0;
        for &v in subset {
            for &u in &self.left_adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                }
            }
        }
        count
    }
}

/// Left-regular random graph: each left node picks `b` distinct right nodes
/// uniformly. Deterministic per seed.
pub fn random_bipartite(n_left: usize, n_right: usize, b: usize, seed: u64) -> Result<BipartiteGraph> {
    if b > n_right {
        return Err(Error::Parameter(format!(
            "left degree {b} exceeds number of right nodes {n_right}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left_adj = (0..n_left)
        .map(|_| sample(&mut rng, n_right, b).into_vec())
        .collect();
    BipartiteGraph::new(n_right, left_adj)
}

/// Number of right nodes with exactly one neighbor in `subset`.
pub fn unique_neighbors(g: &BipartiteGraph, subset: &[usize]) -> usize {
    let mut hits = vec![0u32; g.n_right()];
    for &v in subset {
        for &u in g.left_neighbors(v) {
            hits[u] += 1;
        }
    }
    hits.iter().filter(|&&h| h == 1).count()
}

/// The Tanner code `ker(Λᵀ)` of a graph.
pub fn tanner_code(g: &BipartiteGraph) -> LinearCode {
    LinearCode::from_checks(g.checks())
}

/// Exact worst-case expansion over all left subsets up to a given size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCertificate {
    pub n_left: usize,
    pub n_right: usize,
    /// Left degree `b` used in the ratios.
    pub degree: usize,
    pub max_subset_size: usize,
    /// `min_neighbors[s-1] = min_{|S|=s} |Γ(S)|`.
    pub min_neighbors: Vec<usize>,
    /// `epsilon_profile[s-1] = 1 − min_{|S|=s} |Γ(S)| / (b s)`.
    pub epsilon_profile: Vec<f64>,
    pub certified_epsilon: f64,
    pub certified_delta: f64,
}

impl ExpansionCertificate {
    /// Largest subset size covered, `⌊(1−δ)n⌋` for the certified `δ`.
    pub fn subset_bound(&self) -> usize {
        self.max_subset_size
    }

    /// Certificate restricted to subsets of size at most `t`.
    pub fn truncated(&self, t: usize) -> ExpansionCertificate {
        let t = t.min(self.max_subset_size);
        let eps = self.epsilon_profile[..t].to_vec();
        ExpansionCertificate {
            n_left: self.n_left,
            n_right: self.n_right,
            degree: self.degree,
            max_subset_size: t,
            min_neighbors: self.min_neighbors[..t].to_vec(),
            certified_epsilon: eps.iter().copied().fold(0.0, f64::max),
            epsilon_profile: eps,
            certified_delta: 1.0 - t as f64 / self.n_left as f64,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Enumerates every left subset of size `1..=max_subset_size` and records the
/// smallest neighborhood per size.
pub fn expansion_profile(g: &BipartiteGraph, max_subset_size: usize) -> Result<ExpansionCertificate> {
    let n = g.n_left();
    if max_subset_size == 0 || max_subset_size > n {
        return Err(Error::Parameter(format!(
            "subset size must be in 1..={n}, got {max_subset_size}"
        )));
    }
    let total: u128 = (1..=max_subset_size).map(|s| binomial(n, s)).sum();
    if total > SUBSET_BUDGET {
        return Err(Error::Capacity {
            what: "expansion subset enumeration",
            size: total,
            limit: SUBSET_BUDGET,
        });
    }

    // partition by smallest element; combine with a min-reduction
    let min_neighbors = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut best = vec![usize::MAX; max_subset_size];
            let mut counts = vec![0u32; g.n_right()];
            let mut covered = 0usize;
            add_node(g, first, &mut counts, &mut covered);
            best[0] = covered;
            extend(g, first + 1, 1, max_subset_size, &mut counts, &mut covered, &mut best);
            best
        })
        .reduce(
            || vec![usize::MAX; max_subset_size],
            |a, b| a.iter().zip(&b).map(|(x, y)| *x.min(y)).collect(),
        );

    let b = g.left_degree();
    let epsilon_profile: Vec<f64> = min_neighbors
        .iter()
        .enumerate()
        .map(|(i, &m)| 1.0 - m as f64 / (b * (i + 1)) as f64)
        .collect();
    let certified_epsilon = epsilon_profile.iter().copied().fold(0.0, f64::max);
    Ok(ExpansionCertificate {
        n_left: n,
        n_right: g.n_right(),
        degree: b,
        max_subset_size,
        min_neighbors,
        epsilon_profile,
        certified_epsilon,
        certified_delta: 1.0 - max_subset_size as f64 / n as f64,
    })
}

fn add_node(g: &BipartiteGraph, v: usize, counts: &mut [u32], covered: &mut usize) {
    for &u in g.left_neighbors(v) {
        if counts[u] == 0 {
            *covered += 1;
        }
        counts[u] += 1;
    }
}

fn remove_node(g: &BipartiteGraph, v: usize, counts: &mut [u32], covered: &mut usize) {
    for &u in g.left_neighbors(v) {
        counts[u] -= 1;
        if counts[u] == 0 {
            *covered -= 1;
        }
    }
}

fn extend(
    g: &BipartiteGraph,
    start: usize,
    size: usize,
    max_size: usize,
    counts: &mut [u32],
    covered: &mut usize,
    best: &mut [usize],
) {
    if size == max_size {
        return;
    }
    for v in start..g.n_left() {
        add_node(g, v, counts, covered);
        best[size] = best[size].min(*covered);
        extend(g, v + 1, size + 1, max_size, counts, covered, best);
        remove_node(g, v, counts, covered);
    }
}

/// Parameter bounds of the explicit zig-zag expander family, for tables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZigzagBounds {
    pub check_ratio: f64,
    pub max_left_degree: f64,
    pub max_delta: f64,
    pub min_rate: f64,
    pub min_relative_distance: f64,
}

/// Evaluates the zig-zag family bounds for `ε`, `α = m/n` and the family
/// constants `γ`, `σ`. The relative distance bound drops the floor.
pub fn zigzag_bounds(epsilon: f64, alpha: f64, gamma: f64, sigma: f64) -> ZigzagBounds {
    let ea = epsilon * alpha;
    let slack = sigma * ea.powf(gamma + 1.0);
    ZigzagBounds {
        check_ratio: alpha,
        max_left_degree: (1.0 / ea).powf(gamma),
        max_delta: 1.0 - slack,
        min_rate: 1.0 - alpha,
        min_relative_distance: 2.0 * (1.0 - epsilon) * slack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::Distance;

    fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
        (0u32..(1 << n))
            .filter(|m| m.count_ones() as usize == s)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    }

    #[test]
    fn random_graph_examples() {
        let star = random_bipartite(1, 4, 4, 3).unwrap();
        assert_eq!(star.left_neighbors(0), &[0, 1, 2, 3]);

        let g = random_bipartite(20, 15, 4, 99).unwrap();
        assert!(g.is_left_regular());
        assert_eq!(g.left_degree(), 4);
        assert_eq!(g, random_bipartite(20, 15, 4, 99).unwrap());
        let right_sum: usize = (0..15).map(|u| g.right_neighbors(u).len()).sum();
        assert_eq!(right_sum, g.edge_count());
        assert_eq!(right_sum, 20 * 4);

        assert!(random_bipartite(3, 2, 3, 0).is_err());
    }

    #[test]
    fn parallel_edges_rejected() {
        assert!(BipartiteGraph::new(3, vec![vec![0, 0]]).is_err());
        assert!(BipartiteGraph::new(3, vec![vec![3]]).is_err());
    }

    #[test]
    fn expansion_examples() {
        let matching = BipartiteGraph::new(4, (0..4).map(|i| vec![i]).collect()).unwrap();
        let cert = expansion_profile(&matching, 4).unwrap();
        assert!(cert.epsilon_profile.iter().all(|&e| e == 0.0));

        let k22 = BipartiteGraph::new(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let cert = expansion_profile(&k22, 2).unwrap();
        assert_eq!(cert.min_neighbors, vec![2, 2]);
        assert_eq!(cert.epsilon_profile, vec![0.0, 0.5]);
        assert_eq!(cert.certified_epsilon, 0.5);
        assert_eq!(cert.certified_delta, 0.0);
    }

    #[test]
    fn expansion_matches_direct_enumeration() {
        for seed in 0..5 {
            let g = random_bipartite(10, 8, 3, seed).unwrap();
            let cert = expansion_profile(&g, 4).unwrap();
            for s in 1..=4 {
                let direct = subsets(10, s)
                    .iter()
                    .map(|sub| g.neighborhood_size(sub))
                    .min()
                    .unwrap();
                assert_eq!(cert.min_neighbors[s - 1], direct);
                for sub in subsets(10, s) {
                    assert!(g.neighborhood_size(&sub) <= g.left_degree() * s);
                }
            }
        }
    }

    #[test]
    fn expansion_budget_guard() {
        let g = random_bipartite(60, 30, 3, 1).unwrap();
        assert!(matches!(expansion_profile(&g, 8), Err(Error::Capacity { .. })));
    }

    #[test]
    fn unique_neighbor_examples() {
        let k22 = BipartiteGraph::new(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(unique_neighbors(&k22, &[0]), 2);
        assert_eq!(unique_neighbors(&k22, &[0, 1]), 0);
    }

    #[test]
    fn unique_neighbors_on_certified_graphs() {
        for seed in 0..8 {
            let g = random_bipartite(12, 14, 4, seed).unwrap();
            let cert = expansion_profile(&g, 3).unwrap();
            let (eps, b) = (cert.certified_epsilon, cert.degree as f64);
            for s in 1..=3 {
                for sub in subsets(12, s) {
                    let u = unique_neighbors(&g, &sub) as f64;
                    assert!(u >= (1.0 - 2.0 * eps) * b * s as f64 - 1e-9);
                }
            }
        }
    }

    #[test]
    fn tanner_code_examples() {
        let hr = crate::classical::repetition_checks(3);
        let g = BipartiteGraph::from_checks(&hr);
        assert_eq!(g.checks(), hr);
        let code = tanner_code(&g);
        assert_eq!((code.n(), code.k()), (3, 1));
        assert_eq!(code.distance().unwrap(), Distance::Finite(3));

        let ham = BipartiteGraph::from_checks(&crate::classical::hamming_checks());
        let code = tanner_code(&ham);
        assert_eq!((code.n(), code.k()), (7, 4));
        assert_eq!(code.distance().unwrap(), Distance::Finite(3));
    }

    #[test]
    fn expander_code_distance_bound() {
        let mut checked = 0;
        for g in (0..40)
            .map(|seed| random_bipartite(12, 9, 3, seed).unwrap())
            .chain([BipartiteGraph::complete_graph_incidence(6)])
        {
            let code = tanner_code(&g);
            assert!(code.k() >= g.n_left().saturating_sub(g.n_right()));
            let full = expansion_profile(&g, 4).unwrap();
            for t in 1..=4 {
                let cert = full.truncated(t);
                if cert.certified_epsilon >= 0.5 {
                    continue;
                }
                let bound = 2.0 * (1.0 - cert.certified_epsilon) * t as f64;
                match code.distance().unwrap() {
                    Distance::Finite(d) => assert!(d as f64 >= bound - 1e-9),
                    Distance::Infinite => {}
                }
                checked += 1;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn complete_graph_incidence_shares_one_neighbor() {
        let g = BipartiteGraph::complete_graph_incidence(8);
        assert_eq!((g.n_left(), g.n_right(), g.left_degree()), (8, 28, 7));
        let cert = expansion_profile(&g, 2).unwrap();
        assert_eq!(cert.min_neighbors, vec![7, 13]);
        assert!((cert.certified_epsilon - 1.0 / 14.0).abs() < 1e-12);
        let json = cert.to_json();
        let back: ExpansionCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn zigzag_formula() {
        let z = zigzag_bounds(0.1, 0.5, 2.0, 1.0);
        assert!((z.max_left_degree - 400.0).abs() < 1e-9);
        assert!((z.max_delta - (1.0 - 0.05f64.powi(3))).abs() < 1e-12);
        assert_eq!(z.min_rate, 0.5);
    }
}
