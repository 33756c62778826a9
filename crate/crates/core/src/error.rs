use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero vector has no primitive form")]
    ZeroVector,
    #[error("empty input")]
    EmptyInput,
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("cone contains a line")]
    NotPointed,
    #[error("origin is not in the interior")]
    OriginNotInterior,
    #[error("polytope is not full-dimensional")]
    NotFullDimensional,
    #[error("face dimension {0} out of range")]
    FaceDimension(i64),
    #[error("degenerate cone {0:?}: rays do not determine a unique linear function")]
    DegenerateCone(Vec<usize>),
    #[error("point {0} is already a ray of the fan")]
    AlreadyRay(String),
    #[error("point {0} lies outside the support of the fan")]
    OutsideSupport(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("cone is not a cone of the source fan")]
    ConeNotInFan,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("map does not descend: {0}")]
    NoDescent(String),
    #[error("negative power of non-monomial image of {0}")]
    NonMonomialInverse(String),
    #[error("division by zero at variable {0}")]
    DivisionByZero(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("exponent overflow")]
    Overflow,
    #[error("no chart rewriting for exponent {0}")]
    NoChartSolution(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown fixture {0}")]
    UnknownFixture(String),
    #[error("fixture {name}: {reason}")]
    Schema { name: String, reason: String },
}
