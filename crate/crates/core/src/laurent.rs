//! Sparse multivariate Laurent polynomials.
//!
//! Exponent vectors are keyed by variable name and may be negative. The
//! prover uses these with `QF5` coefficients; any commutative ring
//! satisfying [`Coeff`] works.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

pub trait Coeff:
    Clone + PartialEq + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<C> Coeff for C where
    C: Clone + PartialEq + Zero + One + Add<Output = C> + Sub<Output = C> + Mul<Output = C> + Neg<Output = C>
{
}

/// Exponent vector; variables with exponent zero are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponents(BTreeMap<String, i64>);

impl Exponents {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(name: &str, exp: i64) -> Self {
        let mut m = BTreeMap::new();
        if exp != 0 {
            m.insert(name.to_string(), exp);
        }
        Self(m)
    }

    pub fn get(&self, name: &str) -> i64 {
        self.0.get(name).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        let mut m = self.0.clone();
        for (k, v) in &other.0 {
            let e = m.entry(k.clone()).or_insert(0);
            *e += sign * v;
            if *e == 0 {
                m.remove(k);
            }
        }
        Self(m)
    }

    /// Exponent-wise sum, i.e. the exponents of a product.
    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::one();
        }
        Self(self.0.iter().map(|(n, e)| (n.clone(), e * k)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Laurent<C> {
    terms: BTreeMap<Exponents, C>,
}

impl<C: Coeff> Laurent<C> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::term(Exponents::one(), c)
    }

    pub fn term(exps: Exponents, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { terms }
    }

    /// The monomial `name^exp` with unit coefficient.
    pub fn var(name: &str, exp: i64) -> Self {
        Self::term(Exponents::var(name, exp), C::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &Exponents) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|e| e.iter().map(|(n, _)| n.to_string()))
            .collect()
    }

    fn accumulate(&mut self, exps: Exponents, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exps) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(exps, sum);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.accumulate(e.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(C::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl<C: Coeff> Add for &Laurent<C> {
    type Output = Laurent<C>;

    fn add(self, rhs: Self) -> Laurent<C> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.accumulate(e.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &Laurent<C> {
    type Output = Laurent<C>;

    fn sub(self, rhs: Self) -> Laurent<C> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.accumulate(e.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Mul for &Laurent<C> {
    type Output = Laurent<C>;

    fn mul(self, rhs: Self) -> Laurent<C> {
        let mut out = Laurent::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.accumulate(ea.mul(eb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Neg for &Laurent<C> {
    type Output = Laurent<C>;

    fn neg(self) -> Laurent<C> {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<C: Coeff> $tr for Laurent<C> {
            type Output = Laurent<C>;

            fn $m(self, rhs: Self) -> Laurent<C> {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<C: Coeff + fmt::Display> fmt::Display for Laurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (n, k) in e.iter() {
                write!(f, "*{n}^{k}")?;
            }
        }
        Ok(())
    }
}
