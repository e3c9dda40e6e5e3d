#![allow(dead_code)]

use hyperobs::hypergraph::{k_subsets, UniformHypergraph};
use hyperobs::scalar::{Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every k-subset kept independently with probability `p`.
pub fn random_hypergraph(n: usize, k: usize, p: f64, rng: &mut ChaCha8Rng) -> UniformHypergraph {
    let edges = k_subsets(n, k).into_iter().filter(|_| rng.random_bool(p)).collect();
    UniformHypergraph::new(n, k, edges).unwrap()
}

/// Like `random_hypergraph` but with at least one edge when `n >= k`.
pub fn random_nonempty_hypergraph(n: usize, k: usize, p: f64, rng: &mut ChaCha8Rng) -> UniformHypergraph {
    loop {
        let g = random_hypergraph(n, k, p, rng);
        if g.edge_count() > 0 || n < k {
            return g;
        }
    }
}

/// Small nonzero rationals `a/b` with `|a| <= 5`, `1 <= b <= 4`.
pub fn random_rational_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    (0..n)
        .map(|_| {
            let mut a = 0i64;
            while a == 0 {
                a = rng.random_range(-5..=5);
            }
            Rational::from_ratio(a, rng.random_range(1u64..=4)).unwrap()
        })
        .collect()
}

pub fn random_float_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.5..2.0)).collect()
}
