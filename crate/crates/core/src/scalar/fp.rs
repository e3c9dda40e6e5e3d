use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Field, Scalar};
use crate::error::{Error, Result};

/// The Mersenne prime 2^61 - 1.
pub const MODULUS: u64 = (1 << 61) - 1;

/// Element of the prime field of order [`MODULUS`], kept fully reduced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Fp(u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    /// Reduces an arbitrary `u64` into the field.
    #[inline]
    pub const fn new(v: u64) -> Self {
        Fp(reduce64(v))
    }

    #[inline]
    pub const fn value(self) -> u64 {
        self.0
    }

    pub fn from_i128(v: i128) -> Self {
        let r = v.rem_euclid(MODULUS as i128);
        Fp(r as u64)
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn try_inv(self) -> Result<Self> {
        if self.0 == 0 {
            return Err(Error::Domain("no inverse of zero".into()));
        }
        let (mut r0, mut r1) = (MODULUS as i128, self.0 as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Fp::from_i128(t0))
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

#[inline]
const fn reduce64(v: u64) -> u64 {
    let r = (v & MODULUS) + (v >> 61);
    if r >= MODULUS {
        r - MODULUS
    } else {
        r
    }
}

#[inline]
fn reduce128(v: u128) -> u64 {
    // v < 2^122, so two folds are enough.
    let lo = (v as u64) & MODULUS;
    let hi = (v >> 61) as u64;
    reduce64(lo + reduce64(hi))
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, rhs: Fp) -> Fp {
        let s = self.0 + rhs.0;
        Fp(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, rhs: Fp) -> Fp {
        if self.0 >= rhs.0 {
            Fp(self.0 - rhs.0)
        } else {
            Fp(self.0 + MODULUS - rhs.0)
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, rhs: Fp) -> Fp {
        Fp(reduce128(self.0 as u128 * rhs.0 as u128))
    }
}

impl Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        if self.0 == 0 {
            self
        } else {
            Fp(MODULUS - self.0)
        }
    }
}

impl Scalar for Fp {
    fn zero() -> Self {
        Fp::ZERO
    }
    fn one() -> Self {
        Fp::ONE
    }
    #[inline]
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn from_i64(v: i64) -> Self {
        Fp::from_i128(v as i128)
    }
    fn from_ratio(num: i64, den: u64) -> Option<Self> {
        let d = Fp::new(den).try_inv().ok()?;
        Some(Fp::from_i64(num) * d)
    }
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self = *self + *a * *b;
    }
}

impl Field for Fp {
    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }
}

/// `n` independent uniform residues, reproducible from `seed`.
pub fn random_field_vector(n: usize, seed: u64) -> Vec<Fp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Fp(rng.random_range(0..MODULUS))).collect()
}

/// Uniform point of `(F_P \ {0})^n`; evaluation points avoid zero
/// coordinates so no coordinate monomial vanishes identically.
pub fn random_nonzero_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Fp> {
    (0..n).map(|_| Fp(rng.random_range(1..MODULUS))).collect()
}
