use std::ops::{Add, Mul, Neg, Sub};

use super::Scalar;

/// `re + eps·ε` with `ε² = 0`.
///
/// Evaluating a polynomial map at `x + ε·v` yields the value in `re` and
/// the directional derivative along `v` in `eps`, exactly, in any ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    pub fn constant(re: T) -> Self {
        Dual { re, eps: T::zero() }
    }

    /// Seeds `x + ε·e_j`.
    pub fn seed(x: &[T], j: usize) -> Vec<Self> {
        x.iter()
            .enumerate()
            .map(|(i, v)| Dual::new(v.clone(), if i == j { T::one() } else { T::zero() }))
            .collect()
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Dual::new(self.re + rhs.re, self.eps + rhs.eps)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Dual::new(self.re - rhs.re, self.eps - rhs.eps)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut eps = self.re.clone() * rhs.eps;
        eps.mul_add_assign(&self.eps, &rhs.re);
        Dual::new(self.re * rhs.re, eps)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn zero() -> Self {
        Dual::constant(T::zero())
    }
    fn one() -> Self {
        Dual::constant(T::one())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
    fn from_i64(v: i64) -> Self {
        Dual::constant(T::from_i64(v))
    }
    fn from_ratio(num: i64, den: u64) -> Option<Self> {
        T::from_ratio(num, den).map(Dual::constant)
    }
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.re.mul_add_assign(&a.re, &b.re);
        self.eps.mul_add_assign(&a.re, &b.eps);
        self.eps.mul_add_assign(&a.eps, &b.re);
    }
}
