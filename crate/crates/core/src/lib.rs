pub mod corpus;
pub mod error;
pub mod expr;
pub mod identities;
pub mod laurent;
pub mod matrix;
pub mod pairs;
pub mod poly;
pub mod quad;
pub mod scalar;
pub mod seq;

use num_rational::BigRational;

pub use error::{Error, Result};
pub use expr::{AffineIndex, FibExpr, Identity};
pub use laurent::Laurent;
pub use matrix::Matrix;
pub use poly::Polynomial;
pub use quad::QuadSqrt5;
pub use scalar::Scalar;
pub use seq::SeqKind;

pub type Rational = BigRational;
/// Elements `p + q*sqrt5` with rational `p`, `q`.
pub type QF5 = QuadSqrt5<Rational>;
pub type LaurentQF = Laurent<QF5>;
pub type QMatrix = Matrix<Rational>;
pub type QPolynomial = Polynomial<Rational>;
