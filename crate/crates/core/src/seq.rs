//! Fibonacci and Lucas numbers at arbitrary integer indices.
//!
//! Nonnegative indices go through fast doubling; negative indices are
//! reduced with `F(-r) = (-1)^(r+1) F(r)` and `L(-r) = (-1)^r L(r)`.
//! The [`linear`] submodule keeps the plain recurrence around as an
//! independent oracle.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Which of the two sequences a symbol refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeqKind {
    F,
    L,
}

impl SeqKind {
    pub fn value(self, k: i64) -> BigInt {
        match self {
            SeqKind::F => fib(k),
            SeqKind::L => lucas(k),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            SeqKind::F => 'F',
            SeqKind::L => 'L',
        }
    }
}

const TABLE_SIZE: usize = 512;

fn table() -> &'static [(BigInt, BigInt)] {
    static TABLE: OnceLock<Vec<(BigInt, BigInt)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(TABLE_SIZE);
        let (mut f0, mut f1) = (BigInt::zero(), BigInt::one());
        for _ in 0..TABLE_SIZE {
            let l = &f1 + &f1 - &f0;
            out.push((f0.clone(), l));
            let next = &f0 + &f1;
            f0 = std::mem::replace(&mut f1, next);
        }
        out
    })
}

/// `(F(k), F(k+1))` by fast doubling.
fn doubling_pair(k: u64) -> (BigInt, BigInt) {
    if k == 0 {
        return (BigInt::zero(), BigInt::one());
    }
    let (a, b) = doubling_pair(k / 2);
    // F(2j) = F(j)(2F(j+1) - F(j)), F(2j+1) = F(j)^2 + F(j+1)^2
    let c = &a * (&b + &b - &a);
    let d = &a * &a + &b * &b;
    if k.is_multiple_of(2) {
        (c, d)
    } else {
        let e = &c + &d;
        (d, e)
    }
}

/// `F(k)` for `k >= 0` by fast doubling.
pub fn fib_fast(k: u64) -> BigInt {
    doubling_pair(k).0
}

fn fib_nonneg(k: u64) -> BigInt {
    match table().get(k as usize) {
        Some((f, _)) => f.clone(),
        None => fib_fast(k),
    }
}

fn lucas_nonneg(k: u64) -> BigInt {
    match table().get(k as usize) {
        Some((_, l)) => l.clone(),
        None => {
            let (f, g) = doubling_pair(k);
            // L(k) = F(k-1) + F(k+1) = 2F(k+1) - F(k)
            &g + &g - f
        }
    }
}

/// `F(k)` for any integer `k`.
pub fn fib(k: i64) -> BigInt {
    let v = fib_nonneg(k.unsigned_abs());
    if k < 0 && k % 2 == 0 {
        -v
    } else {
        v
    }
}

/// `L(k)` for any integer `k`.
pub fn lucas(k: i64) -> BigInt {
    let v = lucas_nonneg(k.unsigned_abs());
    if k < 0 && k % 2 != 0 {
        -v
    } else {
        v
    }
}

/// Straight recurrence from the seeds, stepping forward or backward one
/// index at a time. Slow, but shares no code with the fast path.
pub mod linear {
    use num_bigint::BigInt;

    fn walk(k: i64, seed0: i64, seed1: i64) -> BigInt {
        let (mut a, mut b) = (BigInt::from(seed0), BigInt::from(seed1));
        if k >= 0 {
            for _ in 0..k {
                let next = &a + &b;
                a = std::mem::replace(&mut b, next);
            }
            a
        } else {
            // X(j-1) = X(j+1) - X(j)
            for _ in 0..(-k) {
                let prev = &b - &a;
                b = std::mem::replace(&mut a, prev);
            }
            a
        }
    }

    pub fn fib(k: i64) -> BigInt {
        walk(k, 0, 1)
    }

    pub fn lucas(k: i64) -> BigInt {
        walk(k, 2, 1)
    }
}
