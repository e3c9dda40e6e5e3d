use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{Field, Fp, Scalar, MODULUS};
use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with a positive
/// denominator.
///
/// Values whose numerator and denominator fit in `i64` are kept inline and
/// combined with `i128` intermediates; anything larger is held as a
/// [`BigRational`]. The representation is canonical (a value is stored
/// inline whenever it fits), so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// `num / den` with `den > 0` and `gcd(|num|, den) = 1`.
    Small(i64, i64),
    Big(BigRational),
}

impl Rational {
    /// `num / den`; `None` when `den` is zero.
    pub fn new(num: BigInt, den: BigInt) -> Option<Self> {
        (!den.is_zero()).then(|| Self::from_big(BigRational::new(num, den)))
    }

    pub fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(r)),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    /// Always positive.
    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn recip(&self) -> Option<Self> {
        match &self.0 {
            Repr::Small(0, _) => None,
            Repr::Small(n, d) if *n != i64::MIN => Some(Rational(Repr::Small(d * n.signum(), n.abs()))),
            _ => {
                let b = self.to_big();
                (!b.is_zero()).then(|| Self::from_big(b.recip()))
            }
        }
    }

    /// `n / d` from `i128` parts with `d > 0`, reducing and demoting.
    fn from_i128(n: i128, d: i128) -> Self {
        debug_assert!(d > 0);
        let g = n.gcd(&d);
        let (n, d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
        }
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &rhs.0) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            // |a d + c b| < 2^127 and b d < 2^126
            if b == d {
                return Rational::from_i128(a + c, b);
            }
            return Rational::from_i128(a * d + c * b, b * d);
        }
        Rational::from_big(self.to_big() + rhs.to_big())
    }
}

impl Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &rhs.0) {
            if *a == 0 || *c == 0 {
                return Rational::zero();
            }
            // cross-cancel so the product is already in lowest terms
            let g1 = (*a as i128).gcd(&(*d as i128));
            let g2 = (*c as i128).gcd(&(*b as i128));
            let n = (*a as i128 / g1) * (*c as i128 / g2);
            let m = (*b as i128 / g2) * (*d as i128 / g1);
            return match (i64::try_from(n), i64::try_from(m)) {
                (Ok(n), Ok(m)) => Rational(Repr::Small(n, m)),
                _ => Rational(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(m)))),
            };
        }
        Rational::from_big(self.to_big() * rhs.to_big())
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) if *n != i64::MIN => Rational(Repr::Small(-n, *d)),
            _ => Rational::from_big(-self.to_big()),
        }
    }
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs)
    }
}

macro_rules! by_value {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            #[inline]
            fn $m(self, rhs: Rational) -> Rational {
                (&self).$m(&rhs)
            }
        }
    };
}
by_value!(Add, add);
by_value!(Sub, sub);
by_value!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }
    fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }
    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }
    fn from_i64(v: i64) -> Self {
        Rational(Repr::Small(v, 1))
    }
    fn from_ratio(num: i64, den: u64) -> Option<Self> {
        (den != 0).then(|| Rational::from_i128(num as i128, den as i128))
    }
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self = &*self + &(a * b);
    }
}

impl Field for Rational {
    fn inv(&self) -> Option<Self> {
        self.recip()
    }
}

impl Fp {
    /// Image of `r` under the reduction map Z_(P) -> F_P, defined when the
    /// denominator is not divisible by P.
    pub fn from_rational(r: &Rational) -> Option<Fp> {
        let p = BigInt::from(MODULUS);
        let reduce = |v: &BigInt| {
            let m = ((v % &p) + &p) % &p;
            Fp::new(m.to_u64().expect("residue fits in u64"))
        };
        let den = reduce(&r.denom()).try_inv().ok()?;
        Some(reduce(&r.numer()) * den)
    }
}

/// `1/(k-1)!` as an exact rational and as a field element.
///
/// Defined for `1 <= k <= 20`; `20!` is the last factorial below `2^63`.
pub fn factorial_inverse(k: u32) -> Result<(Rational, Fp)> {
    if k == 0 || k > 20 {
        return Err(Error::Domain(format!(
            "factorial_inverse needs 1 <= k <= 20, got {k}"
        )));
    }
    let fact: u64 = (1..k as u64).product();
    let q = Rational::from_ratio(1, fact).expect("nonzero factorial");
    debug_assert!(q.denom().is_positive());
    let f = Fp::from_ratio(1, fact).expect("factorials below 2^63 are units mod P");
    Ok((q, f))
}
