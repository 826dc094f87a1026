use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{FromPrimitive, Num};

/// Coefficient types the matrix, polynomial and quadratic-field code is
/// generic over. Exact results need a field such as `BigRational`; `f64`
/// satisfies the bound too and is handy for quick numeric checks.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> + FromPrimitive {}

impl<T> Scalar for T where T: Clone + Debug + PartialEq + Num + Neg<Output = T> + FromPrimitive {}

pub(crate) fn from_i64<T: Scalar>(v: i64) -> T {
    T::from_i64(v).expect("scalar type must represent small integers")
}
