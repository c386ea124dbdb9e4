//! Multi-points, sampled multi-curves, convexity, and rank.

use crate::error::{GeometryError, Result};
use crate::scalar::Real;
use crate::sl2::{wedge, FrameMatrix, PlaneVector};

/// Tolerance on the three multi-point relations.
pub const MULTIPOINT_TOL: f64 = 1e-9;
/// Relative threshold separating line segments from curved arcs.
pub const RANK_TOL: f64 = 1e-9;
/// Minimum number of interior samples required per curve.
pub const MIN_INTERIOR_SAMPLES: usize = 8;

/// `sqrt(3)/2`, the wedge of consecutive even-index points.
pub fn half_sqrt3<T: Real>() -> T {
    T::sqrt3() * T::lit(0.5)
}

/// The sixth root of unity `exp(i pi j / 3)`.
pub fn root_of_unity<T: Real>(j: usize) -> PlaneVector<T> {
    PlaneVector::polar(T::PI() * T::lit((j % 6) as f64) / T::lit(3.0))
}

/// Six points indexed mod 6 with `u_j + u_{j+2} + u_{j+4} = 0`,
/// `u_{j+3} = -u_j` and `u_j ^ u_{j+2} = sqrt(3)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiPoint<T> {
    points: [PlaneVector<T>; 6],
}

impl<T: Real> MultiPoint<T> {
    /// Validates the relations at [`MULTIPOINT_TOL`].
    pub fn new(points: [PlaneVector<T>; 6]) -> Result<Self> {
        let mp = Self { points };
        let tol = T::tol(MULTIPOINT_TOL);
        let r = mp.relation_residual();
        if !(r <= tol) {
            return Err(GeometryError::InvalidInput(format!(
                "multi-point relations violated by {r}"
            )));
        }
        Ok(mp)
    }

    /// Skips validation; for points that satisfy the relations by
    /// construction, where rounding grows with their magnitude.
    pub(crate) fn from_points_unchecked(points: [PlaneVector<T>; 6]) -> Self {
        Self { points }
    }

    /// Largest violation of the three defining relations.
    pub fn relation_residual(&self) -> T {
        let p = &self.points;
        let h = half_sqrt3::<T>();
        (0..6).fold(T::zero(), |m, j| {
            let sum = (p[j] + p[(j + 2) % 6] + p[(j + 4) % 6]).norm();
            let anti = (p[(j + 3) % 6] + p[j]).norm();
            let w = (wedge(p[j], p[(j + 2) % 6]) - h).abs();
            m.max(sum).max(anti).max(w)
        })
    }

    pub fn points(&self) -> &[PlaneVector<T>; 6] {
        &self.points
    }

    pub fn get(&self, j: usize) -> PlaneVector<T> {
        self.points[j % 6]
    }

    /// The image of the standard multi-point under `g`.
    pub fn from_frame(g: &FrameMatrix<T>) -> Self {
        Self {
            points: std::array::from_fn(|j| g.apply(root_of_unity(j))),
        }
    }

    pub fn transformed(&self, g: &FrameMatrix<T>) -> Self {
        Self {
            points: self.points.map(|p| g.apply(p)),
        }
    }
}

/// The sixth roots of unity.
pub fn standard_multipoint<T: Real>() -> MultiPoint<T> {
    MultiPoint::from_frame(&FrameMatrix::identity())
}

/// Completes `(u0, u2)` to a multi-point.
pub fn multipoint_from_pair<T: Real>(u0: PlaneVector<T>, u2: PlaneVector<T>) -> Result<MultiPoint<T>> {
    let w = wedge(u0, u2);
    if !((w - half_sqrt3::<T>()).abs() < T::tol(MULTIPOINT_TOL)) {
        return Err(GeometryError::WedgeMismatch {
            wedge: w.to_f64_lossy(),
        });
    }
    let u4 = -u0 - u2;
    Ok(MultiPoint {
        points: [u0, -u4, u2, -u0, u4, -u2],
    })
}

/// One sample of a parametrized plane curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample<T> {
    pub t: T,
    pub position: PlaneVector<T>,
    pub velocity: PlaneVector<T>,
    pub acceleration: Option<PlaneVector<T>>,
}

impl<T: Real> CurveSample<T> {
    pub fn new(t: T, position: PlaneVector<T>, velocity: PlaneVector<T>, acceleration: Option<PlaneVector<T>>) -> Self {
        Self {
            t,
            position,
            velocity,
            acceleration,
        }
    }

    /// Image under `g`; wedges of derivatives are unchanged since `det g = 1`.
    pub fn transformed(&self, g: &FrameMatrix<T>) -> Self {
        Self {
            t: self.t,
            position: g.apply(self.position),
            velocity: g.apply(self.velocity),
            acceleration: self.acceleration.map(|a| g.apply(a)),
        }
    }
}

/// `velocity ^ acceleration`; nonnegative along a convex counterclockwise arc.
pub fn convexity_value<T: Real>(s: &CurveSample<T>) -> Result<T> {
    let acc = s.acceleration.ok_or(GeometryError::MissingAcceleration)?;
    Ok(wedge(s.velocity, acc))
}

/// Number of even-index curves that are strictly curved; always 1, 2 or 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RankLabel(u8);

impl RankLabel {
    pub fn new(value: u8) -> Result<Self> {
        match value {
            1..=3 => Ok(Self(value)),
            0 => Err(GeometryError::RankZero),
            _ => Err(GeometryError::InvalidInput(format!("rank {value} > 3"))),
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CurveKind {
    Line,
    Curved,
}

fn classify_curve<T: Real>(samples: &[CurveSample<T>], curve: usize) -> Result<CurveKind> {
    if samples.len() < MIN_INTERIOR_SAMPLES + 2 {
        return Err(GeometryError::InvalidInput(format!(
            "curve {curve} has {} samples, need at least {}",
            samples.len(),
            MIN_INTERIOR_SAMPLES + 2
        )));
    }
    let tol = T::tol(RANK_TOL);
    let mut line = true;
    let mut curved = true;
    for (i, s) in samples.iter().enumerate() {
        let k = convexity_value(s)?;
        let scale = tol * s.velocity.norm_sq();
        if k.abs() > scale {
            line = false;
        }
        let interior = i > 0 && i + 1 < samples.len();
        if interior && !(k > scale) {
            curved = false;
        }
    }
    match (line, curved) {
        (true, _) => Ok(CurveKind::Line),
        (false, true) => Ok(CurveKind::Curved),
        (false, false) => Err(GeometryError::RankUndefined { curve }),
    }
}

/// Rank of a sampled multi-curve: the count of strictly curved curves
/// among `sigma_0, sigma_2, sigma_4`.
///
/// Odd-index curves are central images of the even ones and are not
/// inspected.
pub fn rank_classify<T: Real>(curves: &[Vec<CurveSample<T>>; 6]) -> Result<RankLabel> {
    let mut count = 0u8;
    for j in [0, 2, 4] {
        if classify_curve(&curves[j], j)? == CurveKind::Curved {
            count += 1;
        }
    }
    RankLabel::new(count)
}

/// Six arcs of the unit circle `sigma_j(t) = u*_j rotated by t` for
/// `t` in `[t0, t1]`, with `n` samples each.
pub fn circle_multicurve<T: Real>(t0: T, t1: T, n: usize) -> [Vec<CurveSample<T>>; 6] {
    std::array::from_fn(|j| {
        let phase = T::PI() * T::lit(j as f64) / T::lit(3.0);
        (0..n)
            .map(|i| {
                let t = t0 + (t1 - t0) * T::lit(i as f64) / T::lit((n - 1).max(1) as f64);
                let (s, c) = (t + phase).sin_cos();
                CurveSample::new(
                    t,
                    PlaneVector::new(c, s),
                    PlaneVector::new(-s, c),
                    Some(PlaneVector::new(-c, -s)),
                )
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_multipoint_values() {
        let m = standard_multipoint::<f64>();
        assert_eq!(m.get(0), PlaneVector::new(1.0, 0.0));
        assert!(m.get(3).distance(PlaneVector::new(-1.0, 0.0)) < 1e-15);
        assert!(m.relation_residual() < 1e-15);
        assert!(MultiPoint::new(*m.points()).is_ok());
    }

    #[test]
    fn from_pair_matches_standard() {
        let m = multipoint_from_pair(root_of_unity::<f64>(0), root_of_unity(2)).unwrap();
        let s = standard_multipoint::<f64>();
        for j in 0..6 {
            assert!(m.get(j).distance(s.get(j)) < 1e-15);
        }
    }

    #[test]
    fn from_pair_rejects_wrong_wedge() {
        let err = multipoint_from_pair(PlaneVector::new(1.0, 0.0), PlaneVector::new(0.0, 1.0)).unwrap_err();
        assert_eq!(err, GeometryError::WedgeMismatch { wedge: 1.0 });
    }

    #[test]
    fn convexity_examples() {
        let t = 0.4f64;
        let circle = CurveSample::new(
            t,
            PlaneVector::new(t.cos(), t.sin()),
            PlaneVector::new(-t.sin(), t.cos()),
            Some(PlaneVector::new(-t.cos(), -t.sin())),
        );
        assert!((convexity_value(&circle).unwrap() - 1.0).abs() < 1e-15);
        let line = CurveSample::new(
            0.0,
            PlaneVector::new(1.0, 2.0),
            PlaneVector::new(3.0, -1.0),
            Some(PlaneVector::zero()),
        );
        assert_eq!(convexity_value(&line).unwrap(), 0.0);
        let bare = CurveSample {
            acceleration: None,
            ..line
        };
        assert_eq!(convexity_value(&bare), Err(GeometryError::MissingAcceleration));
    }

    #[test]
    fn circle_has_rank_three() {
        let curves = circle_multicurve(0.0, std::f64::consts::FRAC_PI_3, 16);
        assert_eq!(rank_classify(&curves).unwrap().value(), 3);
    }

    #[test]
    fn stationary_points_are_rank_zero() {
        let curves: [Vec<CurveSample<f64>>; 6] = std::array::from_fn(|j| {
            (0..12)
                .map(|i| {
                    CurveSample::new(
                        i as f64,
                        root_of_unity(j),
                        PlaneVector::zero(),
                        Some(PlaneVector::zero()),
                    )
                })
                .collect()
        });
        assert_eq!(rank_classify(&curves), Err(GeometryError::RankZero));
    }

    #[test]
    fn mixed_curve_is_undefined() {
        let mut curves = circle_multicurve(0.0, 1.0, 12);
        // flip the curvature sign on half of curve 2
        for s in curves[2].iter_mut().skip(6) {
            s.acceleration = s.acceleration.map(|a| -a);
        }
        assert_eq!(rank_classify(&curves), Err(GeometryError::RankUndefined { curve: 2 }));
    }

    #[test]
    fn too_few_samples_rejected() {
        let curves = circle_multicurve(0.0, 1.0, 5);
        assert!(matches!(rank_classify(&curves), Err(GeometryError::InvalidInput(_))));
    }

    #[test]
    fn rank_label_rejects_zero() {
        assert_eq!(RankLabel::new(0), Err(GeometryError::RankZero));
        assert_eq!(RankLabel::new(2).unwrap().value(), 2);
    }
}
