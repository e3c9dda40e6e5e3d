//! Arithmetic substrates for the tensor and rank computations.
//!
//! Everything above this module is written against [`Scalar`], so the same
//! evaluator runs over the prime field [`Fp`] (exact probabilistic rank),
//! over arbitrary-precision [`Rational`]s (test oracles), over `f64` (the
//! time-series pipeline and finite-difference checks) and over [`Dual`]
//! numbers built from any of those (directional derivatives).

mod dual;
mod fp;
mod rational;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

pub use dual::Dual;
pub use fp::{random_field_vector, random_nonzero_point, Fp, MODULUS};
pub use rational::{factorial_inverse, Rational};

/// A commutative ring with the few embeddings the crate needs.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    /// `num / den`, or `None` when `den` is not invertible in the domain.
    fn from_ratio(num: i64, den: u64) -> Option<Self>;

    /// `self += a * b`
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        let acc = std::mem::replace(self, Self::zero());
        *self = acc + a.clone() * b.clone();
    }
}

/// A [`Scalar`] in which every nonzero element is invertible.
pub trait Field: Scalar {
    fn inv(&self) -> Option<Self>;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: u64) -> Option<Self> {
        (den != 0).then(|| num as f64 / den as f64)
    }
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Field for f64 {
    fn inv(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
}
