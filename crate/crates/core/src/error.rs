use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element has zero norm; cannot invert a singular normalization")]
    ZeroNorm,

    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("polynomial is not monic")]
    NotMonic,

    #[error("characteristic polynomial is {found}, expected {expected}")]
    WrongCharPoly { expected: String, found: String },

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("no binding for variable `{0}`")]
    MissingBinding(String),

    #[error("{vars} variables exceeds the parity case-split cap of {cap}; unprovable here, use grid verification")]
    TooManyVariables { vars: usize, cap: usize },

    #[error("unknown pair `{0}`")]
    UnknownPair(String),

    #[error("invalid pair parameter: {0}")]
    InvalidParameter(String),

    #[error("pair `{0}` has no stored entry templates")]
    MissingTemplate(String),

    #[error("x^2 is not a scalar matrix for pair `{0}`")]
    NonScalarSquare(String),

    #[error("trace identities need 2x2 matrices; pair `{name}` has rank {rank}")]
    RankRestriction { name: String, rank: usize },

    #[error("determinant {0} is not +-1; symbolic powers of it are not representable")]
    NonUnitDeterminant(String),

    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(String),

    #[error("corpus line {line}: {msg}")]
    Corpus { line: usize, msg: String },
}
