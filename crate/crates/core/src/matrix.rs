//! Dense square matrices over an exact scalar.

use std::fmt;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{from_i64, Scalar};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    /// Builds a matrix from rows. Panics if the rows are not square.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Self {
            dim,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&v| from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| T::zero())
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, T::one())
    }

    pub fn scalar(dim: usize, c: T) -> Self {
        Self::from_fn(dim, |i, j| if i == j { c.clone() } else { T::zero() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.dim + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.dim.max(1))
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_fn(self.dim, |i, j| {
            self.get(i, j).clone() + other.get(i, j).clone()
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_fn(self.dim, |i, j| {
            self.get(i, j).clone() - other.get(i, j).clone()
        }))
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|v| v.clone() * c.clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        Ok(Self::from_fn(n, |i, j| {
            (0..n).fold(T::zero(), |acc, k| {
                acc + self.get(i, k).clone() * other.get(k, j).clone()
            })
        }))
    }

    /// Square-and-multiply power; negative exponents use the exact inverse.
    pub fn pow(&self, n: i64) -> Result<Self> {
        let mut base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::identity(self.dim);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn det(&self) -> T {
        let a = |i, j| self.get(i, j).clone();
        match self.dim {
            0 => T::one(),
            1 => a(0, 0),
            2 => a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0),
            3 => {
                a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                    + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
            }
            _ => self.det_elimination(),
        }
    }

    fn det_elimination(&self) -> T {
        let n = self.dim;
        let mut m = self.data.clone();
        let mut det = T::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
                return T::zero();
            };
            if piv != col {
                for j in 0..n {
                    m.swap(piv * n + j, col * n + j);
                }
                det = -det;
            }
            let p = m[col * n + col].clone();
            det = det * p.clone();
            for r in col + 1..n {
                let factor = m[r * n + col].clone() / p.clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = m[col * n + j].clone();
                    m[r * n + j] = m[r * n + j].clone() - factor.clone() * v;
                }
            }
        }
        det
    }

    /// The 2x2 adjugate `[[d, -b], [-c, a]]`.
    pub fn adjugate2(&self) -> Result<Self> {
        if self.dim != 2 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        let a = |i, j| self.get(i, j).clone();
        Ok(Self::from_rows(vec![vec![a(1, 1), -a(0, 1)], vec![-a(1, 0), a(0, 0)]]))
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let mut m = self.data.clone();
        let mut inv = Self::identity(n).data;
        for col in 0..n {
            let piv = (col..n).find(|&r| !m[r * n + col].is_zero()).ok_or(Error::Singular)?;
            if piv != col {
                for j in 0..n {
                    m.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let p = m[col * n + col].clone();
            for j in 0..n {
                m[col * n + j] = m[col * n + j].clone() / p.clone();
                inv[col * n + j] = inv[col * n + j].clone() / p.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = m[r * n + col].clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let (mv, iv) = (m[col * n + j].clone(), inv[col * n + j].clone());
                    m[r * n + j] = m[r * n + j].clone() - factor.clone() * mv;
                    inv[r * n + j] = inv[r * n + j].clone() - factor.clone() * iv;
                }
            }
        }
        Ok(Self { dim: n, data: inv })
    }

    /// Monic characteristic polynomial `det(X I - A)` for dimensions 2 and 3,
    /// read off the trace, the principal 2x2 minors and the determinant.
    pub fn char_poly(&self) -> Result<Polynomial<T>> {
        let a = |i, j| self.get(i, j).clone();
        match self.dim {
            2 => Ok(Polynomial::new(vec![self.det(), -self.trace(), T::one()])),
            3 => {
                let minor = |i, j| a(i, i) * a(j, j) - a(i, j) * a(j, i);
                let e2 = minor(0, 1) + minor(0, 2) + minor(1, 2);
                Ok(Polynomial::new(vec![-self.det(), e2, -self.trace(), T::one()]))
            }
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        Ok(self.mul(other)? == other.mul(self)?)
    }

    /// `p(A)` by Horner's rule.
    pub fn eval_poly(&self, p: &Polynomial<T>) -> Self {
        p.coeffs().iter().rev().fold(Self::zeros(self.dim), |acc, c| {
            acc.mul(self)
                .expect("same dimension")
                .add(&Self::scalar(self.dim, c.clone()))
                .expect("same dimension")
        })
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
