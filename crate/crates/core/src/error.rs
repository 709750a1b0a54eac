use thiserror::Error;

use crate::field::FieldOp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("not prime: {0}")]
    NotPrime(u32),
    #[error("not a prime power: {0}")]
    NotPrimePower(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field too large: {p}^{n} exceeds the enumeration ceiling")]
    TooLarge { p: u32, n: u32 },
    #[error("zero inverse")]
    ZeroInverse,
    #[error("element index {index} out of range for field of order {q}")]
    IndexOutOfRange { index: u32, q: u32 },
    #[error("coefficient vector has wrong length or out-of-range entries")]
    BadCoefficients,
    #[error("wrong number of operands for {0:?}")]
    Arity(FieldOp),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("geometry too large: q^n = {0} exceeds the enumeration ceiling")]
    TooLarge(u64),
    #[error("integer overflow evaluating q-binomial")]
    Overflow,
    #[error("field order {field} does not match geometry q = {q}")]
    FieldMismatch { field: u32, q: u32 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("direction vectors are linearly dependent")]
    DependentBasis,
    #[error("zero direction")]
    ZeroDirection,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("not point-regular: point {point} lies in {found} blocks, expected {expected}")]
    NotPointRegular {
        point: usize,
        found: usize,
        expected: usize,
    },
    #[error("not block-uniform: block {block} has {found} points, expected {expected}")]
    NotBlockUniform {
        block: usize,
        found: usize,
        expected: usize,
    },
    #[error("not pair-balanced: points {a} and {b} share {found} blocks, expected {expected}")]
    NotPairBalanced {
        a: usize,
        b: usize,
        found: usize,
        expected: usize,
    },
    #[error("degenerate block: block {0} contains every point")]
    DegenerateBlock(usize),
    #[error("block {block} references point {point}, but there are only {num_points} points")]
    PointOutOfRange {
        block: usize,
        point: usize,
        num_points: usize,
    },
    #[error("block {block} repeats point {point}")]
    RepeatedPoint { block: usize, point: usize },
    #[error("design needs at least two points and one block")]
    Empty,
    #[error("design too large: {0} points exceeds the validation ceiling")]
    TooLarge(usize),
    #[error("header mismatch: header declares {field} = {declared}, design has {actual}")]
    HeaderMismatch {
        field: &'static str,
        declared: usize,
        actual: usize,
    },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("subset index {index} out of range (limit {limit})")]
    SubsetOutOfRange { index: usize, limit: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error("Fisher violation: {blocks} blocks < {points} points")]
    FisherViolation { points: usize, blocks: usize },
    #[error("matrix of order {0} exceeds the dense eigensolver ceiling")]
    TooLarge(usize),
    #[error("graph is not biregular: {0}")]
    NotBiregular(String),
    #[error("vertex index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("richness threshold t must be at least 2, got {0}")]
    ThresholdTooSmall(u64),
    #[error("subset size {size} exceeds available {limit}")]
    SizeOutOfRange { size: usize, limit: usize },
    #[error("invalid rational: {0}")]
    BadRational(String),
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error(
        "exhaustive enumeration would visit {count} subset pairs, more than the limit {limit}"
    )]
    TooManySubsets { count: u128, limit: u128 },
    #[error("richness bounds need epsilon and t")]
    MissingQuery,
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangleError {
    #[error("origin in F")]
    OriginInF,
    #[error("point set too small: {size} points, need at least {required}")]
    TooSmall { size: usize, required: String },
    #[error("point set must live in the plane over the given field")]
    NotPlanar,
    #[error("repeated point in point set")]
    RepeatedPoint,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("size must be at least 3 and at most q^2")]
    BadSize,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Bound(#[from] BoundError),
}
