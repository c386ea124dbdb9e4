//! Hexameral domains built from chains of hyperbolic links.
//!
//! The boundary of a centrally symmetric convex domain whose boundary points
//! are all midpoints of equal-area balanced hexagons is described by a curve
//! `phi(t)` in SL2(R) acting on a six-point configuration. This crate builds
//! such boundaries from rank-one pieces (one hyperbolic arc, two line
//! segments, and their central images), computes their area and lattice
//! packing density, verifies the convexity and closure conditions, and runs
//! penalized searches over chain parameters.
//!
//! The geometry modules are generic over the scalar type ([`Real`]); the
//! `f64` aliases below are what the optimizer and file formats use.

// `!(x < tol)` rejects NaN along with large values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod domain;
pub mod error;
pub mod hyperlink;
pub mod io;
pub mod multicurve;
pub mod optimize;
pub mod scalar;
pub mod sl2;
pub mod variational;

pub use error::{GeometryError, Result};
pub use scalar::Real;

pub use chain::{ChainParams, ClosureReport, LinkSpec};
pub use domain::{BoundaryPolyline, HexameralDomain};
pub use hyperlink::{HyperbolicIndex, Link, LinkState, PlacedRep, SquareRep};
pub use multicurve::{CurveSample, MultiPoint, RankLabel};
pub use sl2::{FrameMatrix, PlaneVector, ProjectiveTangent, TangentElement};
pub use variational::FramePath;

/// Double-precision aliases.
pub mod f64s {
    pub type PlaneVector = crate::sl2::PlaneVector<f64>;
    pub type FrameMatrix = crate::sl2::FrameMatrix<f64>;
    pub type TangentElement = crate::sl2::TangentElement<f64>;
    pub type ProjectiveTangent = crate::sl2::ProjectiveTangent<f64>;
    pub type MultiPoint = crate::multicurve::MultiPoint<f64>;
    pub type CurveSample = crate::multicurve::CurveSample<f64>;
    pub type SquareRep = crate::hyperlink::SquareRep<f64>;
    pub type LinkState = crate::hyperlink::LinkState<f64>;
    pub type Link = crate::hyperlink::Link<f64>;
    pub type ChainParams = crate::chain::ChainParams<f64>;
    pub type ClosureReport = crate::chain::ClosureReport<f64>;
    pub type HexameralDomain = crate::domain::HexameralDomain<f64>;
    pub type BoundaryPolyline = crate::domain::BoundaryPolyline<f64>;
    pub type FramePath = crate::variational::FramePath<f64>;
}

/// Single-precision aliases.
pub mod f32s {
    pub type PlaneVector = crate::sl2::PlaneVector<f32>;
    pub type FrameMatrix = crate::sl2::FrameMatrix<f32>;
    pub type TangentElement = crate::sl2::TangentElement<f32>;
    pub type SquareRep = crate::hyperlink::SquareRep<f32>;
    pub type LinkState = crate::hyperlink::LinkState<f32>;
    pub type ChainParams = crate::chain::ChainParams<f32>;
    pub type HexameralDomain = crate::domain::HexameralDomain<f32>;
}
