use crate::error::{Error, Result};
use crate::hypergraph::UniformHypergraph;
use crate::scalar::Scalar;
use crate::tensor::{checked_pow, tensor_apply, SparseMatrix, DEFAULT_SIZE_CAP};

/// Homogeneous polynomial dynamics `ẋ = A x^[k-1]` given by the unfolding
/// `A` (`n × n^(k-1)`) of a supersymmetric tensor.
#[derive(Clone, Debug)]
pub struct DynamicsSpec<T> {
    n: usize,
    k: usize,
    a: SparseMatrix<T>,
    /// Per node, the other members of each incident hyperedge, together
    /// with the collapsed per-incidence weight. Present only when the
    /// dynamics come from a hypergraph.
    incidence: Option<(Vec<Vec<Vec<usize>>>, T)>,
}

impl<T: Scalar> DynamicsSpec<T> {
    pub fn from_hypergraph(g: &UniformHypergraph) -> Result<Self> {
        Self::from_hypergraph_capped(g, DEFAULT_SIZE_CAP)
    }

    pub fn from_hypergraph_capped(g: &UniformHypergraph, cap: usize) -> Result<Self> {
        let a = g.adjacency_unfolding_capped(cap)?;
        let mut inc = vec![Vec::new(); g.n()];
        for e in g.edges() {
            for &i in e {
                inc[i - 1].push(e.iter().filter(|&&v| v != i).map(|&v| v - 1).collect());
            }
        }
        // (k-1)! orderings of each incidence times 1/(k-1)! collapse to 1
        Ok(DynamicsSpec { n: g.n(), k: g.k(), a, incidence: Some((inc, T::one())) })
    }

    /// Dynamics from an arbitrary unfolding; the caller vouches for
    /// supersymmetry of the underlying tensor.
    pub fn from_unfolding(n: usize, k: usize, a: SparseMatrix<T>) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("uniformity must be at least 2, got {k}")));
        }
        if a.rows() != n || checked_pow(n, k - 1) != Some(a.cols()) {
            return Err(Error::Dimension(format!(
                "unfolding is {}x{}, expected {n}x{n}^{}",
                a.rows(),
                a.cols(),
                k - 1
            )));
        }
        Ok(DynamicsSpec { n, k, a, incidence: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn unfolding(&self) -> &SparseMatrix<T> {
        &self.a
    }

    /// Whether `A (v_1 ⊗ ... ⊗ v_{k-1})` is known to be symmetric in its
    /// arguments.
    pub fn is_symmetric(&self) -> bool {
        self.incidence.is_some()
    }

    /// Degree of `J_p` as a homogeneous polynomial: `pk - (2p - 1)`.
    pub fn lie_degree(&self, p: usize) -> usize {
        p * (self.k - 2) + 1
    }

    /// Same dynamics over another scalar domain.
    pub fn lift<U: Scalar>(&self, f: impl Fn(&T) -> U) -> DynamicsSpec<U> {
        DynamicsSpec {
            n: self.n,
            k: self.k,
            a: self.a.map(&f),
            incidence: self.incidence.as_ref().map(|(inc, w)| (inc.clone(), f(w))),
        }
    }

    /// `c · A`.
    pub fn scaled(&self, c: &T) -> DynamicsSpec<T> {
        DynamicsSpec {
            n: self.n,
            k: self.k,
            a: self.a.map(|v| v.clone() * c.clone()),
            incidence: self.incidence.as_ref().map(|(inc, w)| (inc.clone(), w.clone() * c.clone())),
        }
    }

    pub(crate) fn check_point(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!("point of length {} for n = {}", x.len(), self.n)));
        }
        Ok(())
    }

    /// The vector field `f(x) = A x^[k-1] = J_1(x)`.
    ///
    /// Hypergraph dynamics take one product per edge incidence; otherwise
    /// this is sparse row accumulation over the unfolding.
    pub fn eval_f(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_point(x)?;
        match &self.incidence {
            Some((inc, w)) => Ok(inc
                .iter()
                .map(|edges| {
                    let mut acc = T::zero();
                    for others in edges {
                        let term = others.iter().fold(w.clone(), |t, &j| t * x[j].clone());
                        acc = acc + term;
                    }
                    acc
                })
                .collect()),
            None => tensor_apply(&self.a, x, self.k),
        }
    }
}
