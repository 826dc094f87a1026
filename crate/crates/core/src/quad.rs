//! Arithmetic in the quadratic field `Q(sqrt 5)` and the Binet forms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{from_i64, Scalar};

/// `p + q*sqrt(5)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadSqrt5<T> {
    pub p: T,
    pub q: T,
}

impl<T: Scalar> QuadSqrt5<T> {
    pub fn new(p: T, q: T) -> Self {
        Self { p, q }
    }

    pub fn from_base(p: T) -> Self {
        Self { p, q: T::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_base(from_i64(v))
    }

    pub fn sqrt5() -> Self {
        Self::new(T::zero(), T::one())
    }

    /// `(1 + sqrt 5) / 2`
    pub fn phi() -> Self {
        let half = T::one() / from_i64(2);
        Self::new(half.clone(), half)
    }

    /// `(1 - sqrt 5) / 2`
    pub fn psi() -> Self {
        let half = T::one() / from_i64(2);
        Self::new(half.clone(), -half)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.p.clone(), -self.q.clone())
    }

    /// `p^2 - 5 q^2`
    pub fn norm(&self) -> T {
        self.p.clone() * self.p.clone() - from_i64::<T>(5) * self.q.clone() * self.q.clone()
    }

    pub fn is_base(&self) -> bool {
        self.q.is_zero()
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::new(self.p.clone() * k.clone(), self.q.clone() * k.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self::new(self.p.clone() / n.clone(), -self.q.clone() / n))
    }

    /// Integer power; negative exponents go through [`inv`](Self::inv).
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq.clone();
            }
            e >>= 1;
            if e > 0 {
                sq = sq.clone() * sq;
            }
        }
        Ok(acc)
    }

    /// `(phi^k - psi^k) / sqrt 5`
    pub fn binet_fib(k: i64) -> Self {
        let diff = Self::phi().pow(k).expect("phi is a unit") - Self::psi().pow(k).expect("psi is a unit");
        // divide by sqrt5: (a + b sqrt5)/sqrt5 = b + (a/5) sqrt5
        Self::new(diff.q, diff.p / from_i64(5))
    }

    /// `phi^k + psi^k`
    pub fn binet_lucas(k: i64) -> Self {
        Self::phi().pow(k).expect("phi is a unit") + Self::psi().pow(k).expect("psi is a unit")
    }
}

impl<T: Scalar> Zero for QuadSqrt5<T> {
    fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }
}

impl<T: Scalar> One for QuadSqrt5<T> {
    fn one() -> Self {
        Self::new(T::one(), T::zero())
    }
}

impl<T: Scalar> Add for QuadSqrt5<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.p + rhs.p, self.q + rhs.q)
    }
}

impl<T: Scalar> Sub for QuadSqrt5<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::new(self.p - rhs.p, self.q - rhs.q)
    }
}

impl<T: Scalar> Mul for QuadSqrt5<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let five: T = from_i64(5);
        Self::new(
            self.p.clone() * rhs.p.clone() + five * self.q.clone() * rhs.q.clone(),
            self.p * rhs.q + self.q * rhs.p,
        )
    }
}

impl<T: Scalar> Neg for QuadSqrt5<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.p, -self.q)
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for QuadSqrt5<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p.is_zero(), self.q.is_zero()) {
            (_, true) => write!(f, "{}", self.p),
            (true, false) => write!(f, "({})*sqrt5", self.q),
            (false, false) => write!(f, "{} + ({})*sqrt5", self.p, self.q),
        }
    }
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    use super::*;
    use crate::seq;

    type Q5 = QuadSqrt5<BigRational>;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn golden_roots() {
        assert_eq!(Q5::phi() * Q5::psi(), Q5::from_int(-1));
        assert_eq!(Q5::phi() + Q5::psi(), Q5::from_int(1));
        // tau = phi^2 = (3 + sqrt5)/2
        assert_eq!(Q5::phi().pow(2).unwrap(), Q5::new(rat(3, 2), rat(1, 2)));
        assert_eq!(Q5::psi().pow(2).unwrap(), Q5::new(rat(3, 2), rat(-1, 2)));
        assert_eq!(Q5::psi(), Q5::phi().conj());
        assert_eq!(Q5::phi().norm(), rat(-1, 1));
    }

    #[test]
    fn inverse_and_zero_norm() {
        let x = Q5::new(rat(2, 3), rat(-1, 7));
        assert_eq!(x.clone() * x.inv().unwrap(), Q5::one());
        assert_eq!(Q5::zero().inv(), Err(Error::ZeroNorm));
        assert_eq!(Q5::zero().pow(-1), Err(Error::ZeroNorm));
        assert_eq!(Q5::phi().pow(-1).unwrap(), -Q5::psi());
    }

    #[test]
    fn binet_examples() {
        assert_eq!(Q5::binet_fib(0), Q5::zero());
        assert_eq!(Q5::binet_fib(7), Q5::from_int(13));
        assert_eq!(Q5::binet_fib(-3), Q5::from_int(2));
    }

    #[test]
    fn binet_agrees_with_sequences() {
        for k in -200..=200 {
            let f = Q5::binet_fib(k);
            let l = Q5::binet_lucas(k);
            assert!(f.is_base() && l.is_base(), "k={k}");
            assert_eq!(f.p, BigRational::from_integer(seq::fib(k)), "F k={k}");
            assert_eq!(l.p, BigRational::from_integer(seq::lucas(k)), "L k={k}");
        }
    }

    #[test]
    fn generic_over_f64() {
        let phi = QuadSqrt5::<f64>::phi();
        let prod = phi.clone() * QuadSqrt5::<f64>::psi();
        assert!((prod.p + 1.0).abs() < 1e-12 && prod.q.abs() < 1e-12);
    }

    fn q5() -> impl Strategy<Value = Q5> {
        (-50i64..50, 1i64..9, -50i64..50, 1i64..9).prop_map(|(a, b, c, d)| Q5::new(rat(a, b), rat(c, d)))
    }

    proptest! {
        #[test]
        fn conj_is_ring_hom(x in q5(), y in q5()) {
            prop_assert_eq!((x.clone() * y.clone()).conj(), x.conj() * y.conj());
            prop_assert_eq!((x.clone() + y.clone()).conj(), x.conj() + y.conj());
        }

        #[test]
        fn norm_is_multiplicative(x in q5(), y in q5()) {
            prop_assert_eq!((x.clone() * y.clone()).norm(), x.norm() * y.norm());
        }

        #[test]
        fn pow_adds_exponents(a in -6i64..6, b in -6i64..6) {
            let x = Q5::new(rat(3, 2), BigRational::from_integer(BigInt::from(1)));
            prop_assert_eq!(x.pow(a).unwrap() * x.pow(b).unwrap(), x.pow(a + b).unwrap());
        }
    }
}
