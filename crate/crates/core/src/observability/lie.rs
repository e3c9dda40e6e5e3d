//! The Lie-derivative vectors `J_p(x) = A B_2 ··· B_p x^[pk-(2p-1)]`.
//!
//! [`eval_jp_naive`] forms the full Kronecker power and applies each `B_q`
//! as an explicit Kronecker sum; it is exponential in `p` and serves as
//! the oracle. [`RecursiveJp`] pushes every `B_q` through the Kronecker
//! factors with the mixed-product rule, so the only Kronecker product it
//! ever forms has `k - 1` factors.

use std::collections::HashMap;

use super::DynamicsSpec;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{checked_pow, kron_all, kron_power, KroneckerSum, DEFAULT_SIZE_CAP};

/// Work limits for Lie-derivative evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalLimits {
    /// Largest Kronecker power the naive path may materialize.
    pub size_cap: usize,
    /// Largest number of recursion calls one evaluator may make.
    pub term_budget: u64,
}

impl Default for EvalLimits {
    fn default() -> Self {
        EvalLimits { size_cap: DEFAULT_SIZE_CAP, term_budget: 50_000_000 }
    }
}

/// `J_p(x)` by explicit Kronecker powers and Kronecker sums.
pub fn eval_jp_naive<T: Scalar>(dyn_: &DynamicsSpec<T>, p: usize, x: &[T], cap: usize) -> Result<Vec<T>> {
    dyn_.check_point(x)?;
    let k = dyn_.k();
    let a = dyn_.unfolding();
    if p == 0 {
        return Ok(x.to_vec());
    }
    let mut v = kron_power(x, dyn_.lie_degree(p), cap)?;
    // B_q maps n^{m_q} -> n^{m_{q-1}}, applied right to left
    for q in (2..=p).rev() {
        let b = KroneckerSum::with_width(a, k, dyn_.lie_degree(q - 1));
        v = b.apply(&v)?;
    }
    a.mul_vec(&v)
}

/// Counters collected while evaluating.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RecursionStats {
    /// Recursive calls entered.
    pub calls: u64,
    /// Calls answered from the memo table.
    pub memo_hits: u64,
    /// Products `A (v_1 ⊗ ... ⊗ v_{k-1})` actually computed.
    pub applications: u64,
    /// Longest vector allocated, Kronecker operands included.
    pub max_vector_len: usize,
}

type Id = u32;
const X: Id = 0;

/// Recursive `J_p` evaluator at a fixed point.
///
/// A call `(p, S)` holds a list `S` of `pk - (2p-1)` vectors standing for
/// their Kronecker product. For `p = 1` it returns `A (S_1 ⊗ ... ⊗ S_{k-1})`;
/// otherwise it sums, over every window of `k - 1` consecutive entries, the
/// call at level `p - 1` on `S` with that window replaced by `A` applied
/// to its Kronecker product.
///
/// Vectors are interned, so equal sub-expressions are computed once, and
/// with memoization on, each distinct `(p, S)` is expanded once. Both are
/// pure caching: results are identical to the plain recursion.
pub struct RecursiveJp<'a, T> {
    dyn_: &'a DynamicsSpec<T>,
    vectors: Vec<Vec<T>>,
    products: HashMap<Vec<Id>, Id>,
    memo: HashMap<(usize, Vec<Id>), Vec<T>>,
    memoize: bool,
    materialize: bool,
    limits: EvalLimits,
    stats: RecursionStats,
}

impl<'a, T: Scalar> RecursiveJp<'a, T> {
    pub fn new(dyn_: &'a DynamicsSpec<T>, x: &[T], limits: EvalLimits) -> Result<Self> {
        dyn_.check_point(x)?;
        Ok(RecursiveJp {
            dyn_,
            vectors: vec![x.to_vec()],
            products: HashMap::new(),
            memo: HashMap::new(),
            memoize: true,
            materialize: false,
            limits,
            stats: RecursionStats { max_vector_len: x.len(), ..Default::default() },
        })
    }

    /// Turns off the `(p, S)` memo table, giving the plain recursion.
    pub fn without_memo(mut self) -> Self {
        self.memoize = false;
        self
    }

    /// Forms each `v_1 ⊗ ... ⊗ v_{k-1}` as a dense vector of length
    /// `n^(k-1)` before multiplying by `A`. By default the product is
    /// applied digit by digit and nothing longer than `n` is allocated.
    pub fn materializing(mut self) -> Self {
        self.materialize = true;
        self
    }

    pub fn stats(&self) -> RecursionStats {
        self.stats
    }

    pub fn eval(&mut self, p: usize) -> Result<Vec<T>> {
        if p == 0 {
            return Ok(self.vectors[X as usize].clone());
        }
        let s = vec![X; self.dyn_.lie_degree(p)];
        self.run(p, s)
    }

    fn product(&mut self, window: &[Id]) -> Result<Id> {
        let mut key = window.to_vec();
        if self.dyn_.is_symmetric() {
            key.sort_unstable();
        }
        if let Some(&id) = self.products.get(&key) {
            return Ok(id);
        }
        let factors: Vec<&[T]> = key.iter().map(|&i| self.vectors[i as usize].as_slice()).collect();
        let v = if self.materialize {
            let operand = kron_all(&factors);
            self.stats.max_vector_len = self.stats.max_vector_len.max(operand.len());
            self.dyn_.unfolding().mul_vec(&operand)?
        } else {
            self.dyn_.unfolding().apply_kron(&factors)?
        };
        self.stats.applications += 1;
        let id = Id::try_from(self.vectors.len()).map_err(|_| Error::Resource("too many interned vectors".into()))?;
        self.vectors.push(v);
        self.products.insert(key, id);
        Ok(id)
    }

    fn run(&mut self, p: usize, s: Vec<Id>) -> Result<Vec<T>> {
        self.stats.calls += 1;
        if self.stats.calls > self.limits.term_budget {
            return Err(Error::Resource(format!(
                "recursive evaluation reached {} calls, over the budget of {}",
                self.stats.calls, self.limits.term_budget
            )));
        }
        let w = self.dyn_.k() - 1;
        debug_assert_eq!(s.len(), self.dyn_.lie_degree(p));
        if p == 1 {
            let id = self.product(&s)?;
            return Ok(self.vectors[id as usize].clone());
        }
        if self.memoize {
            if let Some(v) = self.memo.get(&(p, s.clone())) {
                self.stats.memo_hits += 1;
                return Ok(v.clone());
            }
        }
        let mut acc = vec![T::zero(); self.dyn_.n()];
        for i in 0..=s.len() - w {
            let id = self.product(&s[i..i + w])?;
            let mut next = Vec::with_capacity(s.len() - w + 1);
            next.extend_from_slice(&s[..i]);
            next.push(id);
            next.extend_from_slice(&s[i + w..]);
            let part = self.run(p - 1, next)?;
            for (a, b) in acc.iter_mut().zip(part) {
                *a = a.clone() + b;
            }
        }
        if self.memoize {
            self.memo.insert((p, s), acc.clone());
        }
        Ok(acc)
    }
}

/// `J_p(x)` by the recursive evaluator.
pub fn eval_jp_recursive<T: Scalar>(dyn_: &DynamicsSpec<T>, p: usize, x: &[T], limits: EvalLimits) -> Result<Vec<T>> {
    RecursiveJp::new(dyn_, x, limits)?.eval(p)
}

/// Number of leaves of the plain recursion for `J_p`: `Π_{q=2}^{p} (q-1)k - (2q-3)`.
pub fn plain_term_count(k: usize, p: usize) -> Option<u64> {
    (2..=p).try_fold(1u64, |acc, q| acc.checked_mul(((q - 1) * (k - 2) + 1) as u64))
}

/// Length `n^(k-1)` of the largest Kronecker operand the recursion forms.
pub fn operand_bound(n: usize, k: usize) -> usize {
    checked_pow(n, k - 1).unwrap_or(usize::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{complete, hyperchain, hyperstar, UniformHypergraph};
    use crate::scalar::{random_field_vector, Fp, Rational};

    fn fig1b<T: Scalar>() -> DynamicsSpec<T> {
        DynamicsSpec::from_hypergraph(&UniformHypergraph::new(3, 3, vec![vec![1, 2, 3]]).unwrap()).unwrap()
    }

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_i64(x)).collect()
    }

    #[test]
    fn fig1b_levels() {
        let d = fig1b::<Rational>();
        let x = q(&[1, 2, 3]);
        let lim = EvalLimits::default();
        assert_eq!(eval_jp_naive(&d, 0, &x, lim.size_cap).unwrap(), x);
        assert_eq!(eval_jp_naive(&d, 1, &x, lim.size_cap).unwrap(), q(&[6, 3, 2]));
        assert_eq!(d.eval_f(&x).unwrap(), q(&[6, 3, 2]));
        // J_2 = (x3 ẋ2 + x2 ẋ3, x3 ẋ1 + x1 ẋ3, x2 ẋ1 + x1 ẋ2)
        assert_eq!(eval_jp_naive(&d, 2, &x, lim.size_cap).unwrap(), q(&[13, 20, 15]));
        for p in 0..=4 {
            assert_eq!(
                eval_jp_recursive(&d, p, &x, lim).unwrap(),
                eval_jp_naive(&d, p, &x, lim.size_cap).unwrap()
            );
        }
    }

    #[test]
    fn zero_point_vanishes() {
        let d = DynamicsSpec::<Fp>::from_hypergraph(&hyperchain(5, 3).unwrap()).unwrap();
        let z = vec![Fp::ZERO; 5];
        for p in 1..=4 {
            assert!(eval_jp_recursive(&d, p, &z, EvalLimits::default()).unwrap().iter().all(|v| v.value() == 0));
        }
    }

    #[test]
    fn k2_is_matrix_power() {
        let g = hyperchain(4, 2).unwrap();
        let d = DynamicsSpec::<Fp>::from_hypergraph(&g).unwrap();
        let a = d.unfolding().to_dense();
        let x = random_field_vector(4, 1);
        let mut v = x.clone();
        for p in 0..=5 {
            assert_eq!(eval_jp_recursive(&d, p, &x, EvalLimits::default()).unwrap(), v);
            v = a.mul_vec(&v).unwrap();
        }
        assert_eq!(d.eval_f(&x).unwrap(), a.mul_vec(&x).unwrap());
    }

    #[test]
    fn memo_and_plain_recursion_agree() {
        for g in [hyperstar(5, 3).unwrap(), complete(5, 4).unwrap()] {
            let d = DynamicsSpec::<Fp>::from_hypergraph(&g).unwrap();
            let x = random_field_vector(5, 2);
            for p in 1..=4 {
                let mut plain = RecursiveJp::new(&d, &x, EvalLimits::default()).unwrap().without_memo().materializing();
                let mut memo = RecursiveJp::new(&d, &x, EvalLimits::default()).unwrap();
                assert_eq!(plain.eval(p).unwrap(), memo.eval(p).unwrap());
                assert_eq!(plain.stats().memo_hits, 0);
                // plain calls: one per node of the recursion tree
                let want: u64 = (1..=p).map(|l| plain_term_count(g.k(), p).unwrap() / plain_term_count(g.k(), l).unwrap()).sum();
                assert_eq!(plain.stats().calls, want);
                assert!(plain.stats().max_vector_len <= operand_bound(5, g.k()));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let d = DynamicsSpec::<Fp>::from_hypergraph(&complete(5, 4).unwrap()).unwrap();
        let x = random_field_vector(5, 3);
        let lim = EvalLimits { term_budget: 10, ..Default::default() };
        let err = RecursiveJp::new(&d, &x, lim).unwrap().without_memo().eval(4).unwrap_err();
        assert!(matches!(err, Error::Resource(ref m) if m.contains("11 calls")), "{err}");
    }

    #[test]
    fn naive_cap_is_enforced() {
        let d = fig1b::<Fp>();
        let x = random_field_vector(3, 4);
        assert!(matches!(eval_jp_naive(&d, 3, &x, 80), Err(Error::Resource(_))));
    }

    #[test]
    fn generic_unfolding_path_matches_incidence_path() {
        let g = hyperstar(5, 4).unwrap();
        let d = DynamicsSpec::<Fp>::from_hypergraph(&g).unwrap();
        let plain = DynamicsSpec::from_unfolding(5, 4, d.unfolding().clone()).unwrap();
        let x = random_field_vector(5, 6);
        assert_eq!(d.eval_f(&x).unwrap(), plain.eval_f(&x).unwrap());
        for p in 0..=3 {
            assert_eq!(
                eval_jp_recursive(&d, p, &x, EvalLimits::default()).unwrap(),
                eval_jp_recursive(&plain, p, &x, EvalLimits::default()).unwrap()
            );
        }
    }

    #[test]
    fn term_counts() {
        assert_eq!(plain_term_count(3, 1), Some(1));
        assert_eq!(plain_term_count(3, 4), Some(2 * 3 * 4));
        assert_eq!(plain_term_count(4, 4), Some(3 * 5 * 7));
    }
}
