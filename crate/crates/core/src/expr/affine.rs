use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Integer-linear form `c + sum k_v * v` in named variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineIndex {
    coeffs: BTreeMap<String, i64>,
    constant: i64,
}

pub type Assignment = BTreeMap<String, i64>;

impl AffineIndex {
    pub fn constant(c: i64) -> Self {
        Self {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(name: &str) -> Self {
        Self::term(name, 1)
    }

    pub fn term(name: &str, k: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if k != 0 {
            coeffs.insert(name.to_string(), k);
        }
        Self { coeffs, constant: 0 }
    }

    pub fn constant_part(&self) -> i64 {
        self.constant
    }

    pub fn coeff(&self, name: &str) -> i64 {
        self.coeffs.get(name).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, i64)> {
        self.coeffs.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.coeffs.keys().cloned().collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_term(k, *v);
        }
        out.constant += other.constant;
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn offset(&self, c: i64) -> Self {
        let mut out = self.clone();
        out.constant += c;
        out
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::default();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(n, v)| (n.clone(), v * k)).collect(),
            constant: self.constant * k,
        }
    }

    fn add_term(&mut self, name: &str, k: i64) {
        let e = self.coeffs.entry(name.to_string()).or_insert(0);
        *e += k;
        if *e == 0 {
            self.coeffs.remove(name);
        }
    }

    /// Replace `var` by `replacement` everywhere.
    pub fn substitute(&self, var: &str, replacement: &AffineIndex) -> Self {
        let k = self.coeff(var);
        if k == 0 {
            return self.clone();
        }
        let mut rest = self.clone();
        rest.coeffs.remove(var);
        rest.add(&replacement.scale(k))
    }

    /// Rename variables according to `map`, leaving others untouched.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> Self {
        let mut out = Self::constant(self.constant);
        for (n, k) in &self.coeffs {
            out.add_term(map.get(n).unwrap_or(n), *k);
        }
        out
    }

    /// Reduce coefficients and constant modulo 2; used for `(-1)^index`.
    pub fn reduce_mod2(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, v)| v.rem_euclid(2) == 1)
                .map(|(n, _)| (n.clone(), 1))
                .collect(),
            constant: self.constant.rem_euclid(2),
        }
    }

    pub fn eval(&self, assignment: &Assignment) -> Result<i64> {
        self.coeffs.iter().try_fold(self.constant, |acc, (n, k)| {
            let v = assignment.get(n).ok_or_else(|| Error::MissingBinding(n.clone()))?;
            Ok(acc + k * v)
        })
    }
}

impl fmt::Display for AffineIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, k) in &self.coeffs {
            let mag = k.unsigned_abs();
            if *k < 0 {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            if mag != 1 {
                write!(f, "{mag}")?;
            }
            write!(f, "{n}")?;
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant > 0 {
            write!(f, "+{}", self.constant)
        } else if self.constant < 0 {
            write!(f, "{}", self.constant)
        } else {
            Ok(())
        }
    }
}
