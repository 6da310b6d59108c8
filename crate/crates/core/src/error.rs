use thiserror::Error;

use crate::steklov::SteklovSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{field}` violates {constraint}")]
    RangeViolation {
        field: &'static str,
        constraint: String,
    },

    #[error("gamma = n describes the simplex; enable simplex mode explicitly")]
    SimplexModeRequired,

    #[error("point {point:?} is not strictly inside the domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("point {point:?} does not lie on face {face}")]
    FaceMismatch { face: String, point: Vec<f64> },

    #[error("integrand exponent {exponent} is not integrable at the tip (needs > -1)")]
    NonIntegrable { exponent: f64 },

    #[error("no triangle rule of order {0} (supported: 1..=5)")]
    UnsupportedOrder(usize),

    #[error("map parameter a = {a} exceeds a_max = {a_max}")]
    MapParameterTooLarge { a: f64, a_max: f64 },

    #[error("distortion integral diverges: tip exponent {exponent} <= -1")]
    DivergentIntegral { exponent: f64 },

    #[error("triangle {index} has quality {quality:e} below 1e-6")]
    DegenerateTriangle { index: usize, quality: f64 },

    #[error("boundary functional vanishes; Rayleigh quotient undefined")]
    ZeroTrace,

    #[error("descent stopped after {} iterations without meeting tolerances (residual {:e})", .best.iterations, .best.residual)]
    NotConverged { best: Box<SteklovSolution> },

    #[error("inverse iteration stalled after {iterations} steps (last change {change:e})")]
    IterationStall { iterations: usize, change: f64 },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mesh parse error on line {line}: {message}")]
    MeshFormat { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn range(field: &'static str, constraint: impl Into<String>) -> Self {
        Error::RangeViolation {
            field,
            constraint: constraint.into(),
        }
    }
}
