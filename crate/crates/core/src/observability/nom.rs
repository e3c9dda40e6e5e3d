use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::lie::{EvalLimits, RecursiveJp};
use super::DynamicsSpec;
use crate::error::{Error, Result};
use crate::hypergraph::UniformHypergraph;
use crate::linalg::{rank, Matrix};
use crate::scalar::{random_nonzero_point, Dual, Fp, Scalar, MODULUS};

/// Jacobians `∇J_p(x)` for `p = 0..=depth`, one forward-mode pass per
/// coordinate direction.
pub fn jacobians<T: Scalar>(
    dyn_: &DynamicsSpec<T>,
    depth: usize,
    x: &[T],
    limits: EvalLimits,
) -> Result<Vec<Matrix<T>>> {
    dyn_.check_point(x)?;
    let n = dyn_.n();
    let lifted = dyn_.lift(|v| Dual::constant(v.clone()));
    let mut out = vec![Matrix::zeros(n, n); depth + 1];
    for j in 0..n {
        let mut ev = RecursiveJp::new(&lifted, &Dual::seed(x, j), limits)?;
        for (p, jac) in out.iter_mut().enumerate() {
            let col: Vec<T> = ev.eval(p)?.into_iter().map(|d| d.eps).collect();
            jac.set_column(j, &col);
        }
    }
    Ok(out)
}

/// `∇J_p(x)`: column `j` is the derivative of `J_p` along `e_j`.
pub fn jacobian_jp<T: Scalar>(dyn_: &DynamicsSpec<T>, p: usize, x: &[T], limits: EvalLimits) -> Result<Matrix<T>> {
    dyn_.check_point(x)?;
    let n = dyn_.n();
    let lifted = dyn_.lift(|v| Dual::constant(v.clone()));
    let mut jac = Matrix::zeros(n, n);
    for j in 0..n {
        let col: Vec<T> = RecursiveJp::new(&lifted, &Dual::seed(x, j), limits)?
            .eval(p)?
            .into_iter()
            .map(|d| d.eps)
            .collect();
        jac.set_column(j, &col);
    }
    Ok(jac)
}

/// Output matrix measuring the given (1-based) nodes: one indicator row each.
pub fn node_outputs<T: Scalar>(n: usize, nodes: &[usize]) -> Result<Matrix<T>> {
    check_nodes(n, nodes)?;
    Ok(Matrix::from_fn(nodes.len(), n, |r, c| if nodes[r] == c + 1 { T::one() } else { T::zero() }))
}

fn check_nodes(n: usize, nodes: &[usize]) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::Domain("empty node set".into()));
    }
    if let Some(&bad) = nodes.iter().find(|&&i| i == 0 || i > n) {
        return Err(Error::Index(format!("node {bad} outside 1..={n}")));
    }
    Ok(())
}

/// The nonlinear observability matrix `[C ∇J_0; C ∇J_1; ...; C ∇J_r]` at `x`.
pub fn assemble_nom<T: Scalar>(
    dyn_: &DynamicsSpec<T>,
    c: &Matrix<T>,
    x: &[T],
    depth: usize,
    limits: EvalLimits,
) -> Result<Matrix<T>> {
    if c.cols() != dyn_.n() {
        return Err(Error::Dimension(format!("output matrix has {} columns for n = {}", c.cols(), dyn_.n())));
    }
    let blocks = jacobians(dyn_, depth, x, limits)?
        .iter()
        .map(|j| c.matmul(j))
        .collect::<Result<Vec<_>>>()?;
    Matrix::vstack(&blocks.iter().collect::<Vec<_>>())
}

/// Per-level Jacobians at one point, sliced into per-node blocks on demand.
#[derive(Clone, Debug)]
pub struct NomEvaluation<T> {
    point: Vec<T>,
    depth: usize,
    jacobians: Vec<Matrix<T>>,
}

impl<T: Scalar> NomEvaluation<T> {
    pub fn point(&self) -> &[T] {
        &self.point
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n(&self) -> usize {
        self.point.len()
    }

    /// `∇J_p(x*)` for `p = 0..=depth`.
    pub fn jacobians(&self) -> &[Matrix<T>] {
        &self.jacobians
    }

    /// The `(depth+1) × n` block of node `i` (1-based): row `p` is `∇J_{p,i}(x*)`.
    pub fn block(&self, i: usize) -> Result<Matrix<T>> {
        check_nodes(self.n(), &[i])?;
        Matrix::from_rows(self.n(), &self.jacobians.iter().map(|j| j.row(i - 1)).collect::<Vec<_>>())
    }

    /// Blocks of `nodes` stacked in the given order.
    pub fn stack(&self, nodes: &[usize]) -> Result<Matrix<T>> {
        check_nodes(self.n(), nodes)?;
        let rows: Vec<&[T]> = nodes.iter().flat_map(|&i| self.jacobians.iter().map(move |j| j.row(i - 1))).collect();
        Matrix::from_rows(self.n(), &rows)
    }
}

/// Computes every level's Jacobian once at `x`.
pub fn node_blocks<T: Scalar>(
    dyn_: &DynamicsSpec<T>,
    x: &[T],
    depth: usize,
    limits: EvalLimits,
) -> Result<NomEvaluation<T>> {
    Ok(NomEvaluation { point: x.to_vec(), depth, jacobians: jacobians(dyn_, depth, x, limits)? })
}

/// Settings for the probabilistic generic rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankConfig {
    pub trials: usize,
    pub seed: u64,
    /// Lie-derivative levels beyond `J_0`; `None` means `n`.
    pub depth: Option<usize>,
    pub limits: EvalLimits,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig { trials: 3, seed: 0, depth: None, limits: EvalLimits::default() }
    }
}

/// Evaluation point of trial `t`: its own ChaCha stream under `seed`.
pub fn trial_point(n: usize, seed: u64, trial: usize) -> Vec<Fp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    random_nonzero_point(n, &mut rng)
}

/// Node blocks at `trials` random points of `(F_P \ {0})^n`, shared by all
/// rank queries so that ranks of different node sets are comparable.
#[derive(Clone, Debug)]
pub struct NomSampler {
    n: usize,
    depth: usize,
    evaluations: Vec<NomEvaluation<Fp>>,
}

impl NomSampler {
    pub fn new(dyn_: &DynamicsSpec<Fp>, depth: usize, trials: usize, seed: u64, limits: EvalLimits) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Domain("at least one rank trial is required".into()));
        }
        let evaluations = (0..trials)
            .map(|t| node_blocks(dyn_, &trial_point(dyn_.n(), seed, t), depth, limits))
            .collect::<Result<Vec<_>>>()?;
        Ok(NomSampler { n: dyn_.n(), depth, evaluations })
    }

    pub fn for_hypergraph(g: &UniformHypergraph, depth: usize, cfg: &RankConfig) -> Result<Self> {
        let d = DynamicsSpec::from_hypergraph_capped(g, cfg.limits.size_cap)?;
        Self::new(&d, depth, cfg.trials, cfg.seed, cfg.limits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn evaluations(&self) -> &[NomEvaluation<Fp>] {
        &self.evaluations
    }

    /// Largest rank of `O_D` over the sampled points.
    pub fn rank(&self, nodes: &[usize]) -> Result<usize> {
        let mut best = 0;
        for ev in &self.evaluations {
            best = best.max(rank(&ev.stack(nodes)?));
        }
        Ok(best)
    }
}

/// Generic rank of `O_D`: the maximum over the sampler's trial points.
///
/// A rank deficit at a random point happens with probability at most
/// `deg / P` per trial, where `deg` bounds the degree of the maximal minors.
pub fn generic_rank(sampler: &NomSampler, nodes: &[usize]) -> Result<usize> {
    sampler.rank(nodes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observability {
    Observable,
    NotObservableAtDepth,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Observability,
    pub rank: usize,
    pub n: usize,
    pub depth: usize,
    pub trials: usize,
    pub modulus: u64,
}

impl Verdict {
    pub fn is_observable(&self) -> bool {
        self.status == Observability::Observable
    }
}

/// Rank test for measuring `nodes` of `g`, at depth `cfg.depth` or `n`.
pub fn is_locally_weakly_observable(g: &UniformHypergraph, nodes: &[usize], cfg: &RankConfig) -> Result<Verdict> {
    check_nodes(g.n(), nodes)?;
    let depth = cfg.depth.unwrap_or(g.n());
    let sampler = NomSampler::for_hypergraph(g, depth, cfg)?;
    let r = sampler.rank(nodes)?;
    let status = if r == g.n() { Observability::Observable } else { Observability::NotObservableAtDepth };
    Ok(Verdict { status, rank: r, n: g.n(), depth, trials: cfg.trials, modulus: MODULUS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{hyperchain, hyperstar, Topology};
    use crate::linalg::rank_bareiss;
    use crate::observability::eval_jp_recursive;
    use crate::scalar::{random_field_vector, Rational};

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_i64(x)).collect()
    }

    fn fig1b() -> DynamicsSpec<Rational> {
        DynamicsSpec::from_hypergraph(&UniformHypergraph::new(3, 3, vec![vec![1, 2, 3]]).unwrap()).unwrap()
    }

    #[test]
    fn fig1b_jacobian() {
        let d = fig1b();
        let x = q(&[1, 2, 3]);
        let lim = EvalLimits::default();
        assert_eq!(jacobian_jp(&d, 0, &x, lim).unwrap(), Matrix::identity(3));
        let want = Matrix::from_rows(3, &[q(&[0, 3, 2]), q(&[3, 0, 1]), q(&[2, 1, 0])]).unwrap();
        assert_eq!(jacobian_jp(&d, 1, &x, lim).unwrap(), want);
    }

    #[test]
    fn fig1b_nom_first_output() {
        let d = fig1b();
        let x = q(&[1, 2, 3]);
        let c = node_outputs::<Rational>(3, &[1]).unwrap();
        let nom = assemble_nom(&d, &c, &x, 2, EvalLimits::default()).unwrap();
        assert_eq!(nom.rows(), 3);
        assert_eq!(nom.row(0), q(&[1, 0, 0]).as_slice());
        assert_eq!(nom.row(1), q(&[0, 3, 2]).as_slice());
        // J_{2,1} = x3 x1 x3 + x2 x1 x2 = x1 (x2² + x3²)
        let (x1, x2, x3) = (1, 2, 3);
        assert_eq!(nom.row(2), q(&[x2 * x2 + x3 * x3, 2 * x1 * x2, 2 * x1 * x3]).as_slice());
    }

    #[test]
    fn k2_jacobians_are_matrix_powers() {
        let g = Topology::Ring.generate(5, 2).unwrap();
        let d = DynamicsSpec::<Fp>::from_hypergraph(&g).unwrap();
        let a = d.unfolding().to_dense();
        let jacs = jacobians(&d, 4, &random_field_vector(5, 3), EvalLimits::default()).unwrap();
        let mut pw = Matrix::identity(5);
        for j in &jacs {
            assert_eq!(j, &pw);
            pw = a.matmul(&pw).unwrap();
        }
    }

    #[test]
    fn kalman_block_is_point_independent() {
        let g = hyperchain(4, 2).unwrap();
        let d = DynamicsSpec::<Fp>::from_hypergraph(&g).unwrap();
        let c = node_outputs::<Fp>(4, &[2]).unwrap();
        let lim = EvalLimits::default();
        let n1 = assemble_nom(&d, &c, &random_field_vector(4, 1), 4, lim).unwrap();
        let n2 = assemble_nom(&d, &c, &random_field_vector(4, 2), 4, lim).unwrap();
        assert_eq!(n1, n2);
    }

    #[test]
    fn euler_identity_rational() {
        let g = hyperstar(4, 3).unwrap();
        let d = DynamicsSpec::<Rational>::from_hypergraph(&g).unwrap();
        let x = q(&[2, -1, 3, 5]);
        let jacs = jacobians(&d, 3, &x, EvalLimits::default()).unwrap();
        for (p, jac) in jacs.iter().enumerate() {
            let jp = eval_jp_recursive(&d, p, &x, EvalLimits::default()).unwrap();
            let deg = Rational::from_i64(d.lie_degree(p) as i64);
            let lhs = jac.mul_vec(&x).unwrap();
            assert_eq!(lhs, jp.into_iter().map(|v| v * deg.clone()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn blocks_stack_like_identity_output() {
        let g = hyperchain(4, 3).unwrap();
        let d = DynamicsSpec::<Fp>::from_hypergraph(&g).unwrap();
        let x = random_field_vector(4, 9);
        let ev = node_blocks(&d, &x, 3, EvalLimits::default()).unwrap();
        for i in 1..=4 {
            let b = ev.block(i).unwrap();
            assert_eq!(b.rows(), 4);
            assert_eq!(b.row(0), Matrix::<Fp>::identity(4).row(i - 1));
        }
        let all = ev.stack(&[1, 2, 3, 4]).unwrap();
        let nom = assemble_nom(&d, &Matrix::identity(4), &x, 3, EvalLimits::default()).unwrap();
        // nom is ordered by level, the stack by node
        for i in 0..4 {
            for p in 0..4 {
                assert_eq!(all.row(i * 4 + p), nom.row(p * 4 + i));
            }
        }
        assert!(ev.block(0).is_err());
        assert!(ev.stack(&[]).is_err());
    }

    #[test]
    fn verdict_examples() {
        let cfg = RankConfig::default();
        let chain = hyperchain(4, 3).unwrap();
        assert!(is_locally_weakly_observable(&chain, &[1], &cfg).unwrap().is_observable());
        let star = hyperstar(5, 3).unwrap();
        for i in 1..=5 {
            let v = is_locally_weakly_observable(&star, &[i], &cfg).unwrap();
            assert!(!v.is_observable());
            assert!(v.rank < 5);
        }
        for t in Topology::ALL {
            let g = t.generate(5, 3).unwrap();
            let v = is_locally_weakly_observable(&g, &[1, 2, 3, 4, 5], &cfg).unwrap();
            assert_eq!(v.rank, 5);
        }
    }

    #[test]
    fn edgeless_single_node_rank_one() {
        let g = UniformHypergraph::empty(4, 3).unwrap();
        let s = NomSampler::for_hypergraph(&g, 4, &RankConfig::default()).unwrap();
        assert_eq!(generic_rank(&s, &[1]).unwrap(), 1);
        assert_eq!(generic_rank(&s, &[1, 3]).unwrap(), 2);
    }

    #[test]
    fn kalman_rank_matches_rational_oracle() {
        let g = hyperchain(5, 2).unwrap();
        let d = DynamicsSpec::<Rational>::from_hypergraph(&g).unwrap();
        let a = d.unfolding().to_dense();
        let mut rows = Vec::new();
        let mut r = vec![Rational::from_i64(0); 5];
        r[2] = Rational::from_i64(1);
        for _ in 0..=5 {
            rows.push(r.clone());
            r = a.transpose().mul_vec(&r).unwrap();
        }
        let want = rank_bareiss(&Matrix::from_rows(5, &rows).unwrap());
        let s = NomSampler::for_hypergraph(&g, 5, &RankConfig::default()).unwrap();
        assert_eq!(generic_rank(&s, &[3]).unwrap(), want);
    }

    #[test]
    fn trial_points_are_reproducible_and_distinct() {
        assert_eq!(trial_point(5, 7, 0), trial_point(5, 7, 0));
        assert_ne!(trial_point(5, 7, 0), trial_point(5, 7, 1));
        assert_ne!(trial_point(5, 7, 0), trial_point(5, 8, 0));
        assert!(trial_point(50, 0, 2).iter().all(|v| v.value() != 0));
    }

    #[test]
    fn zero_trials_rejected() {
        let g = hyperchain(4, 3).unwrap();
        let cfg = RankConfig { trials: 0, ..Default::default() };
        assert!(NomSampler::for_hypergraph(&g, 2, &cfg).is_err());
    }
}
