//! Minimum observable node sets: greedy rank-gain selection and an
//! exhaustive oracle for small instances.

use std::cmp::Reverse;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{binomial, UniformHypergraph};
use crate::linalg::EchelonBasis;
use crate::observability::{EvalLimits, NomSampler};
use crate::scalar::Fp;

/// Order among candidates with equal rank gain.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Highest degree, then lowest index.
    #[default]
    Degree,
    LowestIndex,
    /// Uniformly random order drawn from the option seed.
    Random,
    /// Earlier in the list wins; unlisted nodes fall back to lowest index.
    Priority(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonOptions {
    /// Lie-derivative levels beyond `J_0`; `None` means `n - 1` for the
    /// (sub-)hypergraph being solved.
    pub depth: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tie_break: TieBreak,
    pub per_component: bool,
    pub limits: EvalLimits,
}

impl Default for MonOptions {
    fn default() -> Self {
        MonOptions {
            depth: None,
            trials: 3,
            seed: 0,
            tie_break: TieBreak::Degree,
            per_component: true,
            limits: EvalLimits::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonVerdict {
    Complete,
    Stalled,
}

/// Selection restricted to one connected component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentMon {
    pub nodes: Vec<usize>,
    pub selected: Vec<usize>,
    pub rank_trace: Vec<usize>,
    pub depth: usize,
    pub verdict: MonVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonResult {
    pub n: usize,
    /// Node ids in selection order.
    pub selected: Vec<usize>,
    /// Rank of the observability matrix after each selection.
    pub rank_trace: Vec<usize>,
    pub verdict: MonVerdict,
    pub component_breakdown: Vec<ComponentMon>,
}

impl MonResult {
    pub fn size(&self) -> usize {
        self.selected.len()
    }

    pub fn rank(&self) -> usize {
        self.rank_trace.last().copied().unwrap_or(0)
    }

    /// Selected ids in increasing order.
    pub fn sorted_selection(&self) -> Vec<usize> {
        let mut s = self.selected.clone();
        s.sort_unstable();
        s
    }
}

/// Sort keys per node (index 0 unused); smaller wins a tie.
fn tie_keys(g: &UniformHypergraph, tb: &TieBreak, seed: u64) -> Vec<(u64, usize)> {
    let n = g.n();
    let mut keys = vec![(0u64, 0usize); n + 1];
    match tb {
        TieBreak::Degree => {
            for (v, d) in g.degrees().into_iter().enumerate() {
                keys[v + 1] = (u64::MAX - d as u64, v + 1);
            }
        }
        TieBreak::LowestIndex => {
            for v in 1..=n {
                keys[v] = (0, v);
            }
        }
        TieBreak::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            for v in 1..=n {
                keys[v] = (rng.random(), v);
            }
        }
        TieBreak::Priority(order) => {
            for v in 1..=n {
                keys[v] = (u64::MAX, v);
            }
            for (pos, &v) in order.iter().enumerate() {
                if (1..=n).contains(&v) && keys[v].0 == u64::MAX {
                    keys[v].0 = pos as u64;
                }
            }
        }
    }
    keys
}

/// Greedy selection over the nodes `labels` of `g` (a component or the
/// whole hypergraph), with `sub` the induced hypergraph on `labels`.
fn greedy_on(sub: &UniformHypergraph, labels: &[usize], keys: &[(u64, usize)], opts: &MonOptions) -> Result<ComponentMon> {
    let n = sub.n();
    let depth = opts.depth.unwrap_or(n - 1);
    let sampler = NomSampler::new(
        &crate::observability::DynamicsSpec::from_hypergraph_capped(sub, opts.limits.size_cap)?,
        depth,
        opts.trials,
        opts.seed,
        opts.limits,
    )?;
    // candidate blocks, computed once per trial
    let blocks: Vec<Vec<_>> = sampler
        .evaluations()
        .iter()
        .map(|ev| (1..=n).map(|i| ev.block(i)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut bases: Vec<EchelonBasis<Fp>> = (0..blocks.len()).map(|_| EchelonBasis::new(n)).collect();
    let mut chosen = vec![false; n];
    let mut selected = Vec::new();
    let mut rank_trace = Vec::new();
    let mut current = 0;
    let mut verdict = MonVerdict::Complete;
    while current < n {
        let mut best: Option<(usize, Reverse<(u64, usize)>, usize)> = None;
        for s in 0..n {
            if chosen[s] {
                continue;
            }
            let r = bases
                .iter()
                .zip(&blocks)
                .map(|(b, bl)| b.rank() + b.gain(&bl[s]))
                .max()
                .unwrap_or(0);
            let cand = (r, Reverse(keys[labels[s]]), s);
            if best.as_ref().is_none_or(|b| (cand.0, cand.1) > (b.0, b.1)) {
                best = Some(cand);
            }
        }
        let Some((r, _, s)) = best.filter(|b| b.0 > current) else {
            verdict = MonVerdict::Stalled;
            break;
        };
        chosen[s] = true;
        for (b, bl) in bases.iter_mut().zip(&blocks) {
            b.extend(&bl[s]);
        }
        let check = bases.iter().map(EchelonBasis::rank).max().unwrap_or(0);
        if check != r {
            return Err(Error::Invariant(format!("rank after selection is {check}, predicted {r}")));
        }
        current = r;
        selected.push(labels[s]);
        rank_trace.push(r);
    }
    Ok(ComponentMon { nodes: labels.to_vec(), selected, rank_trace, depth, verdict })
}

fn single_component(c: ComponentMon, n: usize) -> MonResult {
    MonResult {
        n,
        selected: c.selected.clone(),
        rank_trace: c.rank_trace.clone(),
        verdict: c.verdict,
        component_breakdown: vec![c],
    }
}

/// Greedy MON on the whole hypergraph: repeatedly add the node whose block
/// raises the generic rank most, until rank `n` or no node helps.
pub fn greedy_mon(g: &UniformHypergraph, opts: &MonOptions) -> Result<MonResult> {
    let keys = tie_keys(g, &opts.tie_break, opts.seed);
    let labels: Vec<usize> = (1..=g.n()).collect();
    Ok(single_component(greedy_on(g, &labels, &keys, opts)?, g.n()))
}

/// Greedy MON run separately on each connected component; ranks add up
/// across components because their dynamics are decoupled.
pub fn mon_per_component(g: &UniformHypergraph, opts: &MonOptions) -> Result<MonResult> {
    let keys = tie_keys(g, &opts.tie_break, opts.seed);
    let mut out =
        MonResult { n: g.n(), selected: Vec::new(), rank_trace: Vec::new(), verdict: MonVerdict::Complete, component_breakdown: Vec::new() };
    for comp in g.connected_components() {
        let sub = g.induced(&comp)?;
        let c = if sub.edge_count() == 0 {
            // a lone node is seen only by measuring it
            ComponentMon {
                nodes: comp.clone(),
                selected: comp.clone(),
                rank_trace: (1..=comp.len()).collect(),
                depth: opts.depth.unwrap_or(0),
                verdict: MonVerdict::Complete,
            }
        } else {
            greedy_on(&sub, &comp, &keys, opts)?
        };
        let base = out.rank();
        out.selected.extend(&c.selected);
        out.rank_trace.extend(c.rank_trace.iter().map(|r| base + r));
        if c.verdict == MonVerdict::Stalled {
            out.verdict = MonVerdict::Stalled;
        }
        out.component_breakdown.push(c);
    }
    Ok(out)
}

/// Greedy MON honoring `opts.per_component`.
pub fn mon(g: &UniformHypergraph, opts: &MonOptions) -> Result<MonResult> {
    if opts.per_component {
        mon_per_component(g, opts)
    } else {
        greedy_mon(g, opts)
    }
}

/// Default cap on node sets examined by [`brute_force_mon`].
pub const DEFAULT_SUBSET_BUDGET: u128 = 1_000_000;

/// Smallest node set of generic rank `n`, lexicographically first among
/// those of minimum size, trying sizes up to `max_size`.
pub fn brute_force_mon(g: &UniformHypergraph, max_size: usize, opts: &MonOptions, budget: u128) -> Result<MonResult> {
    let n = g.n();
    let max_size = max_size.min(n);
    let total: u128 = (1..=max_size).map(|s| binomial(n, s).unwrap_or(u128::MAX)).fold(0u128, u128::saturating_add);
    if total > budget {
        return Err(Error::Resource(format!("brute force needs {total} node sets, over the budget of {budget}")));
    }
    let depth = opts.depth.unwrap_or(n - 1);
    let sampler = NomSampler::for_hypergraph(
        g,
        depth,
        &crate::observability::RankConfig { trials: opts.trials, seed: opts.seed, depth: Some(depth), limits: opts.limits },
    )?;
    let all: Vec<usize> = (1..=n).collect();
    for size in 1..=max_size {
        for combo in crate::hypergraph::k_subsets(n, size) {
            if sampler.rank(&combo)? == n {
                let rank_trace = (1..=size).map(|t| sampler.rank(&combo[..t])).collect::<Result<Vec<_>>>()?;
                let c = ComponentMon { nodes: all, selected: combo, rank_trace, depth, verdict: MonVerdict::Complete };
                return Ok(single_component(c, n));
            }
        }
    }
    let c = ComponentMon { nodes: all, selected: Vec::new(), rank_trace: Vec::new(), depth, verdict: MonVerdict::Stalled };
    Ok(single_component(c, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{complete, hyperchain, hyperring, hyperstar};
    use crate::observability::{is_locally_weakly_observable, RankConfig};

    fn opts() -> MonOptions {
        MonOptions::default()
    }

    #[test]
    fn fig2_cardinalities() {
        let cases = [
            (hyperchain(4, 3), 1),
            (hyperchain(5, 3), 1),
            (hyperring(4, 3), 1),
            (hyperring(6, 3), 1),
            (hyperstar(5, 3), 2),
            (hyperstar(6, 3), 3),
            (complete(5, 3), 1),
        ];
        for (g, want) in cases {
            let g = g.unwrap();
            let r = greedy_mon(&g, &opts()).unwrap();
            assert_eq!(r.size(), want, "{g:?}");
            assert_eq!(r.verdict, MonVerdict::Complete);
        }
    }

    #[test]
    fn trace_is_strictly_increasing_and_verified() {
        let g = hyperstar(6, 3).unwrap();
        let r = greedy_mon(&g, &opts()).unwrap();
        assert!(r.rank_trace.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(r.rank(), 6);
        let cfg = RankConfig { seed: 99, depth: Some(5), ..Default::default() };
        assert!(is_locally_weakly_observable(&g, &r.selected, &cfg).unwrap().is_observable());
    }

    #[test]
    fn star_brute_force_needs_two() {
        let g = hyperstar(5, 3).unwrap();
        let b = brute_force_mon(&g, 5, &opts(), DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(b.size(), 2);
        assert_eq!(b.size(), greedy_mon(&g, &opts()).unwrap().size());
    }

    #[test]
    fn ring_brute_force_single() {
        let b = brute_force_mon(&hyperring(4, 3).unwrap(), 4, &opts(), DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(b.selected, vec![1]);
    }

    #[test]
    fn edgeless_needs_everything() {
        let g = UniformHypergraph::empty(3, 3).unwrap();
        let b = brute_force_mon(&g, 3, &opts(), DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(b.selected, vec![1, 2, 3]);
        assert_eq!(b.rank_trace, vec![1, 2, 3]);
        let r = mon(&g, &opts()).unwrap();
        assert_eq!(r.sorted_selection(), vec![1, 2, 3]);
        assert_eq!(r.component_breakdown.len(), 3);
        let whole = greedy_mon(&g, &opts()).unwrap();
        assert_eq!(whole.sorted_selection(), vec![1, 2, 3]);
    }

    #[test]
    fn brute_force_budget_and_stall() {
        let g = hyperstar(6, 3).unwrap();
        assert!(matches!(brute_force_mon(&g, 6, &opts(), 10), Err(Error::Resource(_))));
        let b = brute_force_mon(&g, 2, &opts(), DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(b.verdict, MonVerdict::Stalled);
        assert!(b.selected.is_empty());
    }

    #[test]
    fn disjoint_chains() {
        let edges = vec![vec![1, 2, 3], vec![2, 3, 4], vec![5, 6, 7], vec![6, 7, 8]];
        let g = UniformHypergraph::new(8, 3, edges).unwrap();
        let r = mon_per_component(&g, &opts()).unwrap();
        assert_eq!(r.size(), 2);
        assert_eq!(r.component_breakdown.len(), 2);
        assert_eq!(r.rank_trace, vec![4, 8]);
        assert_eq!(r.verdict, MonVerdict::Complete);
    }

    #[test]
    fn isolated_node_is_selected() {
        let g = UniformHypergraph::new(5, 3, vec![vec![1, 2, 3], vec![2, 3, 4]]).unwrap();
        let r = mon(&g, &opts()).unwrap();
        assert!(r.selected.contains(&5));
        assert_eq!(r.size(), 2);
    }

    #[test]
    fn connected_per_component_equals_whole() {
        for g in [hyperchain(5, 3).unwrap(), hyperstar(6, 3).unwrap(), hyperring(5, 4).unwrap()] {
            assert_eq!(mon_per_component(&g, &opts()).unwrap(), greedy_mon(&g, &opts()).unwrap());
        }
    }

    #[test]
    fn equal_degrees_fall_back_to_index() {
        // every single node gains the same rank on a complete hypergraph,
        // so the lowest index wins among equal degrees
        let r = greedy_mon(&complete(5, 3).unwrap(), &opts()).unwrap();
        assert_eq!(r.selected, vec![1]);
    }

    #[test]
    fn tie_break_orders() {
        let g = hyperring(6, 3).unwrap();
        let idx = greedy_mon(&g, &MonOptions { tie_break: TieBreak::LowestIndex, ..opts() }).unwrap();
        assert_eq!(idx.selected, vec![1]);
        let pri = greedy_mon(&g, &MonOptions { tie_break: TieBreak::Priority(vec![4, 2]), ..opts() }).unwrap();
        assert_eq!(pri.selected, vec![4]);
        let a = greedy_mon(&g, &MonOptions { tie_break: TieBreak::Random, seed: 3, ..opts() }).unwrap();
        let b = greedy_mon(&g, &MonOptions { tie_break: TieBreak::Random, seed: 3, ..opts() }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn depth_zero_selects_everything() {
        let g = hyperchain(5, 3).unwrap();
        let r = greedy_mon(&g, &MonOptions { depth: Some(0), ..opts() }).unwrap();
        // depth 0 sees only the measured coordinates
        assert_eq!(r.size(), 5);
        assert_eq!(r.verdict, MonVerdict::Complete);
        assert_eq!(r.rank_trace, vec![1, 2, 3, 4, 5]);
    }
}
