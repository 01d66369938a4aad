use thiserror::Error;

use crate::cartan::Weight;

/// Errors raised while building modules and operators or while verifying
/// their structural identities.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported Cartan type `{0}`; supported types are A1, A2, B2")]
    UnsupportedType(String),

    #[error("rank mismatch: expected {expected} coordinates, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("weight {0} is not dominant")]
    NotDominant(Weight),

    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorIndex { index: usize, rank: usize },

    #[error("deformation parameter q = {0} must be a finite positive real")]
    InvalidQ(f64),

    #[error("relation `{relation}` violated: residual {residual:.3e} exceeds {tolerance:.1e}")]
    RelationResidual {
        relation: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("cyclic closure of V{weight} has dimension {got}, expected {expected}")]
    ClosureDimension {
        weight: Weight,
        expected: usize,
        got: usize,
    },

    #[error("no positive-definite invariant form: {0}")]
    NoInvariantForm(String),

    #[error("operator is not positive: eigenvalue {0:.6e}")]
    NonPositiveEigenvalue(f64),

    #[error("operator is not self-adjoint for the form: residual {0:.3e}")]
    NotSelfAdjoint(f64),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("R-matrix fails the intertwiner test in both product orders (best residual {0:.3e})")]
    ConventionMismatch(f64),

    #[error("scalar and spectral routes for (R21 R)^(-1/2) disagree by {0:.3e}")]
    PathDisagreement(f64),

    #[error("multiplicity bookkeeping failed: {0}")]
    DimensionSum(String),

    #[error(
        "numerical rank is ambiguous (relative singular value {0:.3e} lies in the gray zone); \
         raise precision or change q"
    )]
    RankAmbiguous(f64),

    #[error("invalid cactus generator s({p},{t}) for n = {n}")]
    CactusIndex { p: usize, t: usize, n: usize },

    #[error("invalid block triple ({p},{r},{t}) for n = {n}")]
    BlockIndex {
        p: usize,
        r: usize,
        t: usize,
        n: usize,
    },

    #[error("character peeling produced a negative multiplicity at {0}")]
    NegativePeel(Weight),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
