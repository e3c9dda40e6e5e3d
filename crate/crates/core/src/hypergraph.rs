//! k-uniform hypergraphs: validation, the canonical topology generators,
//! degree and connectivity queries, and the adjacency tensor.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{checked_pow, SparseMatrix, SparseTensor, DEFAULT_SIZE_CAP};

/// Largest edge count the complete-hypergraph generator will emit.
pub const DEFAULT_EDGE_CAP: usize = 1_000_000;

/// Undirected hypergraph on nodes `1..=n` in which every hyperedge has
/// exactly `k` distinct members. Edges are stored sorted, and the edge list
/// is sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HypergraphFile", into = "HypergraphFile")]
pub struct UniformHypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
}

/// Wire form: `{"n": .., "k": .., "edges": [[..], ..]}` with 1-based ids.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphFile {
    pub n: usize,
    pub k: usize,
    pub edges: Vec<Vec<usize>>,
}

impl TryFrom<HypergraphFile> for UniformHypergraph {
    type Error = Error;
    fn try_from(f: HypergraphFile) -> Result<Self> {
        UniformHypergraph::new(f.n, f.k, f.edges)
    }
}

impl From<UniformHypergraph> for HypergraphFile {
    fn from(g: UniformHypergraph) -> Self {
        HypergraphFile { n: g.n, k: g.k, edges: g.edges }
    }
}

impl UniformHypergraph {
    /// Validates and canonicalizes. Members of each edge are sorted;
    /// repeated members and repeated edges are rejected.
    pub fn new(n: usize, k: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("uniformity must be at least 2, got {k}")));
        }
        if n == 0 {
            return Err(Error::Domain("hypergraph needs at least one node".into()));
        }
        let mut set = BTreeSet::new();
        for mut e in edges {
            if e.len() != k {
                return Err(Error::Domain(format!("edge {e:?} has {} members, expected {k}", e.len())));
            }
            e.sort_unstable();
            if let Some(&bad) = e.iter().find(|&&v| v == 0 || v > n) {
                return Err(Error::Index(format!("node {bad} outside 1..={n}")));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Domain(format!("edge {e:?} repeats a node")));
            }
            if !set.insert(e.clone()) {
                return Err(Error::Domain(format!("duplicate edge {e:?}")));
            }
        }
        Ok(UniformHypergraph { n, k, edges: set.into_iter().collect() })
    }

    /// Like [`new`](Self::new) but collapses edges that coincide as sets.
    fn from_windows(n: usize, k: usize, windows: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let set: BTreeSet<Vec<usize>> = windows
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e
            })
            .collect();
        Self::new(n, k, set.into_iter().collect())
    }

    pub fn empty(n: usize, k: usize) -> Result<Self> {
        Self::new(n, k, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn check_node(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.n {
            return Err(Error::Index(format!("node {j} outside 1..={}", self.n)));
        }
        Ok(())
    }

    /// Number of hyperedges containing node `j`.
    pub fn degree(&self, j: usize) -> Result<usize> {
        self.check_node(j)?;
        Ok(self.edges.iter().filter(|e| e.contains(&j)).count())
    }

    /// Degrees of nodes `1..=n`, in order.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                d[v - 1] += 1;
            }
        }
        d
    }

    /// Partition of the nodes into connected components, each sorted, the
    /// list ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for e in &self.edges {
            let r0 = find(&mut parent, e[0] - 1);
            for &v in &e[1..] {
                let r = find(&mut parent, v - 1);
                if r != r0 {
                    // keep the smaller root so components are keyed by min member
                    let (lo, hi) = if r < r0 { (r, r0) } else { (r0, r) };
                    parent[hi] = lo;
                }
            }
        }
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.n];
        for v in 0..self.n {
            let r = find(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = comps.len();
                comps.push(Vec::new());
            }
            comps[slot[r]].push(v + 1);
        }
        comps
    }

    /// Sub-hypergraph induced on `nodes` (sorted, 1-based), relabelled to
    /// `1..=nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Result<UniformHypergraph> {
        let mut label = vec![0usize; self.n + 1];
        for (i, &v) in nodes.iter().enumerate() {
            self.check_node(v)?;
            label[v] = i + 1;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| label[v] != 0))
            .map(|e| e.iter().map(|&v| label[v]).collect())
            .collect();
        UniformHypergraph::new(nodes.len(), self.k, edges)
    }

    /// Image under the node relabelling `v -> perm[v - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<UniformHypergraph> {
        if perm.len() != self.n {
            return Err(Error::Dimension("permutation length differs from n".into()));
        }
        let edges = self.edges.iter().map(|e| e.iter().map(|&v| perm[v - 1]).collect()).collect();
        UniformHypergraph::new(self.n, self.k, edges)
    }

    /// Adjacency tensor: `1/(k-1)!` at every index permutation of every
    /// hyperedge.
    pub fn adjacency_tensor<T: Scalar>(&self) -> Result<SparseTensor<T>> {
        let coeff = coefficient::<T>(self.k)?;
        let gens: Vec<_> = self.edges.iter().map(|e| (e.clone(), coeff.clone())).collect();
        SparseTensor::supersymmetric(self.n, self.k, &gens)
    }

    /// The `n × n^(k-1)` unfolding of the adjacency tensor.
    pub fn adjacency_unfolding<T: Scalar>(&self) -> Result<SparseMatrix<T>> {
        self.adjacency_unfolding_capped(DEFAULT_SIZE_CAP)
    }

    pub fn adjacency_unfolding_capped<T: Scalar>(&self, cap: usize) -> Result<SparseMatrix<T>> {
        match checked_pow(self.n, self.k - 1) {
            Some(c) if c <= cap => {}
            _ => {
                return Err(Error::Resource(format!(
                    "unfolding width {}^{} exceeds the cap of {cap}",
                    self.n,
                    self.k - 1
                )))
            }
        }
        self.adjacency_tensor()?.unfold(1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hypergraph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Self::from_json(&s).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

/// `1/(k-1)!` in the scalar domain.
pub fn coefficient<T: Scalar>(k: usize) -> Result<T> {
    if k == 0 || k > 20 {
        return Err(Error::Domain(format!("uniformity {k} outside 1..=20")));
    }
    let fact: u64 = (1..k as u64).product();
    T::from_ratio(1, fact).ok_or_else(|| Error::Domain(format!("{fact} is not invertible in this domain")))
}

fn check_params(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Domain(format!("uniformity must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::Domain(format!("uniformity k = {k} exceeds node count n = {n}")));
    }
    Ok(())
}

/// Hyperchain: edges `{j, ..., j+k-1}` for `j = 1..=n-k+1`.
pub fn hyperchain(n: usize, k: usize) -> Result<UniformHypergraph> {
    check_params(n, k)?;
    UniformHypergraph::new(n, k, (1..=n - k + 1).map(|j| (j..j + k).collect()).collect())
}

/// Hyperring: the `n` cyclic windows of length `k`, deduplicated as sets.
pub fn hyperring(n: usize, k: usize) -> Result<UniformHypergraph> {
    check_params(n, k)?;
    let sigma = |j: usize| if j <= n { j } else { j - n };
    UniformHypergraph::from_windows(n, k, (1..=n).map(|j| (j..j + k).map(sigma).collect()))
}

/// Hyperstar: internal nodes `1..k-1` shared by every edge, one edge per
/// leaf `k..=n`.
pub fn hyperstar(n: usize, k: usize) -> Result<UniformHypergraph> {
    check_params(n, k)?;
    let edges = (k..=n)
        .map(|leaf| {
            let mut e: Vec<usize> = (1..k).collect();
            e.push(leaf);
            e
        })
        .collect();
    UniformHypergraph::new(n, k, edges)
}

/// Complete k-uniform hypergraph: all `C(n, k)` subsets.
pub fn complete(n: usize, k: usize) -> Result<UniformHypergraph> {
    complete_capped(n, k, DEFAULT_EDGE_CAP)
}

pub fn complete_capped(n: usize, k: usize, cap: usize) -> Result<UniformHypergraph> {
    check_params(n, k)?;
    match binomial(n, k) {
        Some(c) if c <= cap as u128 => {}
        c => {
            return Err(Error::Resource(format!(
                "C({n}, {k}) = {} edges exceeds the cap of {cap}",
                c.map_or_else(|| "overflow".to_string(), |c| c.to_string())
            )))
        }
    }
    UniformHypergraph::new(n, k, k_subsets(n, k))
}

pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// All `k`-subsets of `1..=n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - (k - 1 - i)) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Topology families with a canonical generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    Chain,
    Ring,
    Star,
    Complete,
}

impl Topology {
    pub const ALL: [Topology; 4] = [Topology::Chain, Topology::Ring, Topology::Star, Topology::Complete];

    pub fn generate(self, n: usize, k: usize) -> Result<UniformHypergraph> {
        match self {
            Topology::Chain => hyperchain(n, k),
            Topology::Ring => hyperring(n, k),
            Topology::Star => hyperstar(n, k),
            Topology::Complete => complete(n, k),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Topology::Chain => "chain",
            Topology::Ring => "ring",
            Topology::Star => "star",
            Topology::Complete => "complete",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Fp, Rational};
    use crate::tensor::{ivec, ModeShape};
    use proptest::prelude::*;

    fn edges(g: &UniformHypergraph) -> Vec<Vec<usize>> {
        g.edges().to_vec()
    }

    #[test]
    fn chain_examples() {
        assert_eq!(edges(&hyperchain(4, 3).unwrap()), vec![vec![1, 2, 3], vec![2, 3, 4]]);
        assert_eq!(edges(&hyperchain(5, 3).unwrap()), vec![vec![1, 2, 3], vec![2, 3, 4], vec![3, 4, 5]]);
        assert_eq!(edges(&hyperchain(4, 4).unwrap()), vec![vec![1, 2, 3, 4]]);
        assert!(matches!(hyperchain(3, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn ring_examples() {
        assert_eq!(
            edges(&hyperring(4, 3).unwrap()),
            vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]
        );
        let r6 = hyperring(6, 3).unwrap();
        assert_eq!(r6.edge_count(), 6);
        assert!(r6.edges().contains(&vec![1, 5, 6]) && r6.edges().contains(&vec![1, 2, 6]));
        assert_eq!(hyperring(3, 3).unwrap().edge_count(), 1);
    }

    #[test]
    fn star_examples() {
        assert_eq!(edges(&hyperstar(5, 3).unwrap()), vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 2, 5]]);
        let s6 = hyperstar(6, 3).unwrap();
        assert_eq!(s6.edge_count(), 4);
        assert!(s6.edges().iter().all(|e| e[..2] == [1, 2]));
        assert_eq!(hyperstar(3, 3).unwrap().edge_count(), 1);
    }

    #[test]
    fn complete_examples() {
        assert_eq!(complete(5, 3).unwrap().edge_count(), 10);
        assert_eq!(complete(6, 3).unwrap().edge_count(), 20);
        assert_eq!(complete(4, 4).unwrap().edge_count(), 1);
        assert!(matches!(complete_capped(30, 15, 1000), Err(Error::Resource(_))));
    }

    #[test]
    fn degree_examples() {
        let c = complete(5, 3).unwrap();
        assert!((1..=5).all(|j| c.degree(j).unwrap() == 6));
        let s = hyperstar(5, 3).unwrap();
        assert_eq!(s.degree(1).unwrap(), 3);
        assert_eq!(s.degree(5).unwrap(), 1);
        let lone = UniformHypergraph::new(4, 3, vec![vec![1, 2, 3]]).unwrap();
        assert_eq!(lone.degree(4).unwrap(), 0);
        assert!(matches!(lone.degree(5), Err(Error::Index(_))));
        assert!(matches!(lone.degree(0), Err(Error::Index(_))));
    }

    #[test]
    fn degree_equals_tensor_row_sum() {
        for g in [hyperstar(6, 3).unwrap(), complete(5, 4).unwrap(), hyperring(5, 3).unwrap()] {
            let a = g.adjacency_unfolding::<Rational>().unwrap();
            for j in 1..=g.n() {
                let s = a.row_entries(j - 1).fold(Rational::from_i64(0), |acc, (_, v)| acc + v.clone());
                assert_eq!(s, Rational::from_i64(g.degree(j).unwrap() as i64));
            }
        }
    }

    #[test]
    fn components_examples() {
        assert_eq!(hyperchain(5, 3).unwrap().connected_components(), vec![vec![1, 2, 3, 4, 5]]);
        let g = UniformHypergraph::new(5, 3, vec![vec![1, 2, 3]]).unwrap();
        assert_eq!(g.connected_components(), vec![vec![1, 2, 3], vec![4], vec![5]]);
        let e = UniformHypergraph::empty(3, 3).unwrap();
        assert_eq!(e.connected_components(), vec![vec![1], vec![2], vec![3]]);
        let two = UniformHypergraph::new(6, 3, vec![vec![1, 4, 6], vec![2, 3, 5]]).unwrap();
        assert_eq!(two.connected_components(), vec![vec![1, 4, 6], vec![2, 3, 5]]);
    }

    #[test]
    fn validation_errors() {
        assert!(UniformHypergraph::new(3, 3, vec![vec![1, 1, 2]]).is_err());
        assert!(UniformHypergraph::new(3, 3, vec![vec![1, 2]]).is_err());
        assert!(matches!(UniformHypergraph::new(3, 3, vec![vec![1, 2, 4]]), Err(Error::Index(_))));
        assert!(UniformHypergraph::new(3, 3, vec![vec![1, 2, 3], vec![3, 2, 1]]).is_err());
        assert!(UniformHypergraph::new(3, 1, vec![]).is_err());
    }

    #[test]
    fn unfolding_single_edge() {
        let g = UniformHypergraph::new(3, 3, vec![vec![1, 2, 3]]).unwrap();
        let a = g.adjacency_unfolding::<Rational>().unwrap();
        let s = ModeShape::cubical(3, 2).unwrap();
        let cols: Vec<usize> = a.row_entries(0).map(|(c, _)| c + 1).collect();
        assert_eq!(cols, vec![ivec(&[3, 2], &s).unwrap(), ivec(&[2, 3], &s).unwrap()]);
        assert!(a.row_entries(0).all(|(_, v)| *v == Rational::from_ratio(1, 2).unwrap()));
        let empty = UniformHypergraph::empty(3, 3).unwrap().adjacency_unfolding::<Fp>().unwrap();
        assert_eq!(empty.nnz(), 0);
        assert_eq!((empty.rows(), empty.cols()), (3, 9));
    }

    #[test]
    fn unfolding_cap() {
        let g = hyperchain(50, 6).unwrap();
        assert!(matches!(g.adjacency_unfolding_capped::<Fp>(1000), Err(Error::Resource(_))));
    }

    #[test]
    fn k2_unfolding_is_adjacency_matrix() {
        for topo in Topology::ALL {
            let g = topo.generate(6, 2).unwrap();
            let a = g.adjacency_unfolding::<Fp>().unwrap().to_dense();
            for i in 1..=6 {
                for j in 1..=6 {
                    let adj = g.edges().contains(&vec![i.min(j), i.max(j)]);
                    assert_eq!(a[(i - 1, j - 1)], if adj { Fp::ONE } else { Fp::ZERO });
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_errors() {
        let g = hyperring(6, 3).unwrap();
        let s = g.to_json();
        assert_eq!(UniformHypergraph::from_json(&s).unwrap(), g);
        assert!(UniformHypergraph::from_json(r#"{"n": 3, "k": 3, "edges": [[1,2,9]]}"#).is_err());
        let err = UniformHypergraph::from_json("{\"n\": 3,\n \"k\": }").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn induced_and_relabel() {
        let g = UniformHypergraph::new(6, 3, vec![vec![1, 4, 6], vec![2, 3, 5]]).unwrap();
        let sub = g.induced(&[2, 3, 5]).unwrap();
        assert_eq!(edges(&sub), vec![vec![1, 2, 3]]);
        let r = hyperchain(4, 3).unwrap().relabel(&[4, 3, 2, 1]).unwrap();
        assert_eq!(edges(&r), vec![vec![1, 2, 3], vec![2, 3, 4]]);
    }

    #[test]
    fn subsets_and_binomials() {
        assert_eq!(k_subsets(4, 2).len(), 6);
        assert_eq!(k_subsets(4, 2)[0], vec![1, 2]);
        assert_eq!(k_subsets(4, 2)[5], vec![3, 4]);
        assert_eq!(binomial(6, 3), Some(20));
        assert_eq!(binomial(3, 5), Some(0));
    }

    proptest! {
        #[test]
        fn generator_invariants(n in 2usize..10, kk in 0usize..8) {
            let k = 2 + kk % (n - 1);
            for topo in Topology::ALL {
                let g = topo.generate(n, k).unwrap();
                prop_assert!(g.edges().iter().all(|e| e.len() == k && e.windows(2).all(|w| w[0] < w[1])));
                let want = match topo {
                    Topology::Chain | Topology::Star => (n - k + 1) as u128,
                    Topology::Ring => if k == n { 1 } else { n as u128 },
                    Topology::Complete => binomial(n, k).unwrap(),
                };
                prop_assert_eq!(g.edge_count() as u128, want);
                prop_assert_eq!(g.degrees().iter().sum::<usize>(), k * g.edge_count());
                if topo != Topology::Complete {
                    // consecutive edges in the construction overlap in k-1 nodes
                    let raw: Vec<Vec<usize>> = match topo {
                        Topology::Chain => (1..=n - k + 1).map(|j| (j..j + k).collect()).collect(),
                        Topology::Ring => (1..=n).map(|j| (j..j + k).map(|v| if v > n { v - n } else { v }).collect()).collect(),
                        _ => (k..=n).map(|l| { let mut e: Vec<usize> = (1..k).collect(); e.push(l); e }).collect(),
                    };
                    for w in raw.windows(2) {
                        let a: BTreeSet<_> = w[0].iter().collect();
                        let b: BTreeSet<_> = w[1].iter().collect();
                        let shared = a.intersection(&b).count();
                        if a != b {
                            prop_assert_eq!(shared, k - 1);
                        }
                    }
                }
            }
        }
    }
}
