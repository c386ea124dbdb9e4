use thiserror::Error;

/// Failures raised by the geometry, chain, and optimization layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("matrix determinant {det} is not within tolerance of 1")]
    NotUnimodular { det: f64 },
    #[error("wedge of the generating pair is {wedge}, expected sqrt(3)/2")]
    WedgeMismatch { wedge: f64 },
    #[error("curve sample has no acceleration")]
    MissingAcceleration,
    #[error("curve {curve} is neither a line segment nor strictly curved")]
    RankUndefined { curve: usize },
    #[error("all even-index curves are line segments (rank 0)")]
    RankZero,
    #[error("scale {a} gives k = {k}, which must lie in (0, 1)")]
    ScaleTooSmall { a: f64, k: f64 },
    #[error("parameter {t} outside the link interval [{lo}, {hi}]")]
    ParameterOutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("invalid square representation: {0}")]
    InvalidSquareRep(String),
    #[error("state is not compatible with a rank-one link: {0}")]
    NotRankOneCompatible(String),
    #[error("velocity directions are linearly dependent")]
    DegenerateVelocity,
    #[error("link {index}: {source}")]
    Link {
        index: usize,
        #[source]
        source: Box<GeometryError>,
    },
    #[error("chain is not closed (frame residual {frame_residual:e}, tangent residual {tangent_residual:e})")]
    NotClosed { frame_residual: f64, tangent_residual: f64 },
    #[error("link length {length} violates n = 0 mod 3")]
    LinkLengthViolation { length: usize },
    #[error("tangent violates the star conditions")]
    StarViolation,
    #[error("s' must be positive on the whole grid (violated at index {index})")]
    SignCondition { index: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("infeasible input: {0}")]
    InfeasibleInput(String),
}

impl GeometryError {
    pub(crate) fn at_link(self, index: usize) -> Self {
        GeometryError::Link {
            index,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
