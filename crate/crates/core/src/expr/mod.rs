//! Symbolic Fibonacci/Lucas expressions.
//!
//! A [`FibExpr`] is a sum of monomials `c * (-1)^s * prod X[i]^p` where `c`
//! is rational, `s` and every index `i` are affine in integer variables and
//! `X` is `F` or `L`. Expressions are kept in canonical form: monomials are
//! sorted by `(sign exponent, factors)`, like terms are merged, sign
//! exponents are reduced mod 2, and factors at constant indices are folded
//! into the coefficient.

mod affine;
mod identity;
mod parse;
mod prove;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use affine::{AffineIndex, Assignment};
pub use identity::{
    default_range, Constraint, Failure, GridRanges, Identity, Predicate, VerifyReport, DEFAULT_SPAN, PARAM_SPAN,
};
pub use parse::{parse, parse_affine, parse_expr, parse_identity, Parsed};
pub use prove::{expand_case, is_identically_zero, prove_binet, Parity, ProofOutcome, PARITY_VARIABLE_CAP};

use crate::error::Result;
use crate::seq::SeqKind;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub kind: SeqKind,
    pub index: AffineIndex,
    pub power: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: BigRational,
    /// Exponent of `-1`.
    pub sign: AffineIndex,
    pub factors: Vec<Factor>,
}

type Key = (AffineIndex, Vec<Factor>);

impl Monomial {
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = self.sign.variables();
        for f in &self.factors {
            out.extend(f.index.variables());
        }
        out
    }

    pub fn eval(&self, assignment: &Assignment) -> Result<BigRational> {
        let mut prod = BigInt::one();
        for f in &self.factors {
            let k = f.index.eval(assignment)?;
            prod *= f.kind.value(k).pow(f.power);
        }
        if self.sign.eval(assignment)?.rem_euclid(2) == 1 {
            prod = -prod;
        }
        Ok(self.coeff.clone() * BigRational::from_integer(prod))
    }

    fn map_indices(&self, f: impl Fn(&AffineIndex) -> AffineIndex) -> Monomial {
        Monomial {
            coeff: self.coeff.clone(),
            sign: f(&self.sign),
            factors: self
                .factors
                .iter()
                .map(|x| Factor {
                    kind: x.kind,
                    index: f(&x.index),
                    power: x.power,
                })
                .collect(),
        }
    }

    /// Canonical key plus the coefficient after folding constant factors.
    fn canonical(&self) -> (Key, BigRational) {
        let mut coeff = self.coeff.clone();
        let mut sign = self.sign.reduce_mod2();
        if sign.constant_part() == 1 {
            coeff = -coeff;
            sign = sign.offset(-1);
        }
        let mut merged: BTreeMap<(SeqKind, AffineIndex), u32> = BTreeMap::new();
        for f in &self.factors {
            if f.power == 0 {
                continue;
            }
            if f.index.is_constant() {
                let v = f.kind.value(f.index.constant_part()).pow(f.power);
                coeff *= BigRational::from_integer(v);
                continue;
            }
            *merged.entry((f.kind, f.index.clone())).or_insert(0) += f.power;
        }
        let factors = merged
            .into_iter()
            .map(|((kind, index), power)| Factor { kind, index, power })
            .collect();
        ((sign, factors), coeff)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FibExpr {
    monomials: Vec<Monomial>,
}

impl FibExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_monomials(vec![Monomial {
            coeff: c,
            sign: AffineIndex::default(),
            factors: vec![],
        }])
    }

    pub fn int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn seq(kind: SeqKind, index: AffineIndex) -> Self {
        Self::from_monomials(vec![Monomial {
            coeff: BigRational::one(),
            sign: AffineIndex::default(),
            factors: vec![Factor { kind, index, power: 1 }],
        }])
    }

    pub fn fib(index: AffineIndex) -> Self {
        Self::seq(SeqKind::F, index)
    }

    pub fn lucas(index: AffineIndex) -> Self {
        Self::seq(SeqKind::L, index)
    }

    /// `(-1)^exponent`
    pub fn sign(exponent: AffineIndex) -> Self {
        Self::from_monomials(vec![Monomial {
            coeff: BigRational::one(),
            sign: exponent,
            factors: vec![],
        }])
    }

    /// Builds the canonical form of an arbitrary list of monomials.
    pub fn from_monomials(monomials: impl IntoIterator<Item = Monomial>) -> Self {
        let mut acc: BTreeMap<Key, BigRational> = BTreeMap::new();
        for m in monomials {
            let (key, coeff) = m.canonical();
            if coeff.is_zero() {
                continue;
            }
            let slot = acc.entry(key).or_insert_with(BigRational::zero);
            *slot += coeff;
        }
        let monomials = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((sign, factors), coeff)| Monomial { coeff, sign, factors })
            .collect();
        Self { monomials }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.monomials.iter().flat_map(|m| m.variables()).collect()
    }

    /// Re-canonicalize. Expressions built through this API are already
    /// canonical, so this is idempotent.
    pub fn normalize(&self) -> Self {
        Self::from_monomials(self.monomials.iter().cloned())
    }

    pub fn eval(&self, assignment: &Assignment) -> Result<BigRational> {
        self.monomials
            .iter()
            .try_fold(BigRational::zero(), |acc, m| Ok(acc + m.eval(assignment)?))
    }

    pub fn substitute(&self, var: &str, replacement: &AffineIndex) -> Self {
        Self::from_monomials(
            self.monomials
                .iter()
                .map(|m| m.map_indices(|i| i.substitute(var, replacement))),
        )
    }

    /// Simultaneous variable renaming.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> Self {
        Self::from_monomials(self.monomials.iter().map(|m| m.map_indices(|i| i.rename(map))))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_monomials(self.monomials.iter().map(|m| Monomial {
            coeff: &m.coeff * c,
            ..m.clone()
        }))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::int(1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// If `other == q * (-1)^s * self` for a rational `q` and an affine
    /// sign exponent `s`, returns `(q, s)`.
    pub fn ratio_to(&self, other: &Self) -> Option<(BigRational, AffineIndex)> {
        let Some(first) = self.monomials.first() else {
            return other.is_zero().then(|| (BigRational::one(), AffineIndex::default()));
        };
        other
            .monomials
            .iter()
            .filter(|m| m.factors == first.factors)
            .find_map(|m| {
                let q = &m.coeff / &first.coeff;
                let s = m.sign.sub(&first.sign).reduce_mod2();
                let candidate = &self.scale(&q) * &Self::sign(s.clone());
                (candidate == *other).then_some((q, s))
            })
    }

    /// Coefficients in canonical monomial order.
    pub fn coefficients(&self) -> impl Iterator<Item = &BigRational> {
        self.monomials.iter().map(|m| &m.coeff)
    }

    /// Copy with the `i`-th monomial's coefficient replaced.
    pub fn with_coefficient(&self, i: usize, coeff: BigRational) -> Self {
        let mut monomials = self.monomials.clone();
        monomials[i].coeff = coeff;
        Self::from_monomials(monomials)
    }
}

impl Add for &FibExpr {
    type Output = FibExpr;

    fn add(self, rhs: Self) -> FibExpr {
        FibExpr::from_monomials(self.monomials.iter().chain(&rhs.monomials).cloned())
    }
}

impl Neg for &FibExpr {
    type Output = FibExpr;

    fn neg(self) -> FibExpr {
        FibExpr::from_monomials(self.monomials.iter().map(|m| Monomial {
            coeff: -m.coeff.clone(),
            ..m.clone()
        }))
    }
}

impl Sub for &FibExpr {
    type Output = FibExpr;

    fn sub(self, rhs: Self) -> FibExpr {
        self + &(-rhs)
    }
}

impl Mul for &FibExpr {
    type Output = FibExpr;

    fn mul(self, rhs: Self) -> FibExpr {
        let mut out = Vec::with_capacity(self.monomials.len() * rhs.monomials.len());
        for a in &self.monomials {
            for b in &rhs.monomials {
                out.push(Monomial {
                    coeff: &a.coeff * &b.coeff,
                    sign: a.sign.add(&b.sign),
                    factors: a.factors.iter().chain(&b.factors).cloned().collect(),
                });
            }
        }
        FibExpr::from_monomials(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FibExpr {
            type Output = FibExpr;

            fn $m(self, rhs: Self) -> FibExpr {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FibExpr {
    type Output = FibExpr;

    fn neg(self) -> FibExpr {
        -&self
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.kind.symbol(), self.index)?;
        if self.power != 1 {
            write!(f, "^{}", self.power)?;
        }
        Ok(())
    }
}

/// Writes the DSL form accepted by [`parse_expr`].
impl fmt::Display for FibExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            let neg = m.coeff.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = m.coeff.abs();
            let mut parts: Vec<String> = Vec::new();
            let bare = m.factors.is_empty() && m.sign.is_constant();
            if !mag.is_one() || bare {
                parts.push(mag.to_string());
            }
            if !m.sign.is_constant() || m.sign.constant_part() != 0 {
                parts.push(format!("(-1)^({})", m.sign));
            }
            parts.extend(m.factors.iter().map(|x| x.to_string()));
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}
