//! Plane vectors, the special linear group SL2(R) and its Lie algebra.
//!
//! Everything here is plain value arithmetic on 2x2 matrices. The wedge
//! `u ^ v` is the determinant with columns `u` and `v`; SL2 preserves it.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{GeometryError, Result};
use crate::scalar::Real;

/// Accepted `|det - 1|` before a frame is rescaled back onto SL2.
pub const FRAME_PROJECTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlaneVector<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> PlaneVector<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// Unit vector at angle `theta`.
    pub fn polar(theta: T) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    pub fn wedge(self, other: Self) -> T {
        wedge(self, other)
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    /// Counterclockwise argument in `(-pi, pi]`.
    pub fn arg(self) -> T {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }
}

impl<T: Real> Add for PlaneVector<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> Sub for PlaneVector<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Neg for PlaneVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<T: Real> Mul<T> for PlaneVector<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

/// `u.x * v.y - u.y * v.x`
#[inline]
pub fn wedge<T: Real>(u: PlaneVector<T>, v: PlaneVector<T>) -> T {
    u.x * v.y - u.y * v.x
}

/// An element of SL2(R), stored as `[[alpha, beta], [gamma, delta]]`.
///
/// Construction rescales matrices whose determinant is within
/// [`FRAME_PROJECTION_TOL`] of one and rejects the rest, so chains of
/// products cannot drift off the group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameMatrix<T> {
    alpha: T,
    beta: T,
    gamma: T,
    delta: T,
}

impl<T: Real> FrameMatrix<T> {
    pub fn new(alpha: T, beta: T, gamma: T, delta: T) -> Result<Self> {
        Self::with_tolerance(alpha, beta, gamma, delta, T::tol(FRAME_PROJECTION_TOL))
    }

    pub fn with_tolerance(alpha: T, beta: T, gamma: T, delta: T, tol: T) -> Result<Self> {
        let det = alpha * delta - beta * gamma;
        if !det.is_finite() || (det - T::one()).abs() > tol {
            return Err(GeometryError::NotUnimodular {
                det: det.to_f64_lossy(),
            });
        }
        Ok(Self::project(alpha, beta, gamma, delta, det))
    }

    /// Rescales onto det = 1; the caller guarantees `det > 0`.
    fn project(alpha: T, beta: T, gamma: T, delta: T, det: T) -> Self {
        let s = det.sqrt().recip();
        Self {
            alpha: alpha * s,
            beta: beta * s,
            gamma: gamma * s,
            delta: delta * s,
        }
    }

    /// Matrix from entries known to have positive determinant close to one
    /// by construction (products, closed-form exponentials).
    pub(crate) fn renormalized(alpha: T, beta: T, gamma: T, delta: T) -> Self {
        let det = alpha * delta - beta * gamma;
        debug_assert!(det > T::zero(), "renormalized called with det = {det}");
        Self::project(alpha, beta, gamma, delta, det)
    }

    /// Matrix whose columns are `c0` and `c1`.
    pub fn from_columns(c0: PlaneVector<T>, c1: PlaneVector<T>) -> Result<Self> {
        Self::new(c0.x, c1.x, c0.y, c1.y)
    }

    pub fn identity() -> Self {
        Self {
            alpha: T::one(),
            beta: T::zero(),
            gamma: T::zero(),
            delta: T::one(),
        }
    }

    /// Counterclockwise rotation by `theta`.
    pub fn rotation(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            alpha: c,
            beta: -s,
            gamma: s,
            delta: c,
        }
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn beta(&self) -> T {
        self.beta
    }
    pub fn gamma(&self) -> T {
        self.gamma
    }
    pub fn delta(&self) -> T {
        self.delta
    }

    /// Entries in row-major order `[alpha, beta, gamma, delta]`.
    pub fn entries(&self) -> [T; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn det(&self) -> T {
        self.alpha * self.delta - self.beta * self.gamma
    }

    pub fn apply(&self, v: PlaneVector<T>) -> PlaneVector<T> {
        apply(self, v)
    }

    /// Inverse; exact for unimodular matrices.
    pub fn inverse(&self) -> Self {
        Self {
            alpha: self.delta,
            beta: -self.beta,
            gamma: -self.gamma,
            delta: self.alpha,
        }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        let (a, b, c, d) = mul2(self.entries(), rhs.entries());
        Self::renormalized(a, b, c, d)
    }

    pub fn column0(&self) -> PlaneVector<T> {
        PlaneVector::new(self.alpha, self.gamma)
    }

    pub fn column1(&self) -> PlaneVector<T> {
        PlaneVector::new(self.beta, self.delta)
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.entries()
            .iter()
            .zip(other.entries().iter())
            .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
    }

    pub fn cast<U: Real>(&self) -> FrameMatrix<U> {
        FrameMatrix {
            alpha: U::lit(self.alpha.to_f64_lossy()),
            beta: U::lit(self.beta.to_f64_lossy()),
            gamma: U::lit(self.gamma.to_f64_lossy()),
            delta: U::lit(self.delta.to_f64_lossy()),
        }
    }
}

impl<T: Real> Mul for FrameMatrix<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

fn mul2<T: Real>(l: [T; 4], r: [T; 4]) -> (T, T, T, T) {
    (
        l[0] * r[0] + l[1] * r[2],
        l[0] * r[1] + l[1] * r[3],
        l[2] * r[0] + l[3] * r[2],
        l[2] * r[1] + l[3] * r[3],
    )
}

/// Matrix-vector product `g v`.
pub fn apply<T: Real>(g: &FrameMatrix<T>, v: PlaneVector<T>) -> PlaneVector<T> {
    PlaneVector::new(g.alpha * v.x + g.beta * v.y, g.gamma * v.x + g.delta * v.y)
}

/// Traceless matrix `[[a, b], [c, -a]]` in sl2(R).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentElement<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> TangentElement<T> {
    pub fn new(a: T, b: T, c: T) -> Self {
        Self { a, b, c }
    }

    /// Generator of counterclockwise rotations, `(0, -1, 1)`.
    pub fn rotation_generator() -> Self {
        Self::new(T::zero(), -T::one(), T::one())
    }

    /// Traceless part of an arbitrary 2x2 matrix given row-major.
    pub fn from_matrix(m: [T; 4]) -> Self {
        let half = T::lit(0.5);
        Self::new((m[0] - m[3]) * half, m[1], m[2])
    }

    pub fn apply(&self, v: PlaneVector<T>) -> PlaneVector<T> {
        PlaneVector::new(self.a * v.x + self.b * v.y, self.c * v.x - self.a * v.y)
    }

    /// `-a^2 - bc`
    pub fn det(&self) -> T {
        -self.a * self.a - self.b * self.c
    }

    pub fn norm(&self) -> T {
        (self.a * self.a + self.b * self.b + self.c * self.c).sqrt()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.a * other.a + self.b * other.b + self.c * other.c
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s)
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }

    pub fn matrix(&self) -> [T; 4] {
        [self.a, self.b, self.c, -self.a]
    }

    pub fn components(&self) -> [T; 3] {
        [self.a, self.b, self.c]
    }
}

/// `g X g^-1`
pub fn adjoint<T: Real>(g: &FrameMatrix<T>, x: &TangentElement<T>) -> TangentElement<T> {
    let gx = mul2(g.entries(), x.matrix());
    let (p, q, r, _s) = mul2([gx.0, gx.1, gx.2, gx.3], g.inverse().entries());
    // The result is traceless up to rounding; keep a, b, c directly.
    TangentElement::new(p, q, r)
}

/// The star conditions `sqrt(3)|a| < c` and `3b + c < 0`.
pub fn star_check<T: Real>(x: &TangentElement<T>) -> bool {
    T::sqrt3() * x.a.abs() < x.c && T::lit(3.0) * x.b + x.c < T::zero()
}

/// Closed-form `exp(tX)`. Uses `X^2 = (a^2 + bc) I`.
pub fn exp_tangent<T: Real>(x: &TangentElement<T>, t: T) -> FrameMatrix<T> {
    let q = x.a * x.a + x.b * x.c;
    let qt2 = q * t * t;
    // exp(tX) = f0 I + f1 X, with f0 = C(q t^2), f1 = t S(q t^2)
    let (f0, f1) = if qt2.abs() < T::lit(1e-6) {
        let half = T::lit(0.5);
        let sixth = T::lit(1.0 / 6.0);
        let c = T::one() + qt2 * half * (T::one() + qt2 / T::lit(12.0));
        let s = T::one() + qt2 * sixth * (T::one() + qt2 / T::lit(20.0));
        (c, t * s)
    } else if q > T::zero() {
        let w = q.sqrt();
        ((w * t).cosh(), (w * t).sinh() / w)
    } else {
        let w = (-q).sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    };
    FrameMatrix::renormalized(f0 + f1 * x.a, f1 * x.b, f1 * x.c, f0 - f1 * x.a)
}

/// A velocity up to positive rescaling, stored with unit Euclidean norm on
/// `(a, b, c)`.
///
/// Only positive scalars are identified: `[X]` and `[-X]` are different
/// states because the boundary carries a counterclockwise orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveTangent<T> {
    rep: TangentElement<T>,
}

impl<T: Real> ProjectiveTangent<T> {
    pub fn new(x: TangentElement<T>) -> Result<Self> {
        let n = x.norm();
        if !(n.is_finite() && n > T::min_positive_value().sqrt()) {
            return Err(GeometryError::DegenerateVelocity);
        }
        Ok(Self {
            rep: x.scale(n.recip()),
        })
    }

    /// Normalizes `x`, flipping its sign if needed so that the motion at
    /// `p` is counterclockwise (`p ^ Xp > 0`).
    pub fn oriented_at(x: TangentElement<T>, p: PlaneVector<T>) -> Result<Self> {
        let w = wedge(p, x.apply(p));
        let x = if w < T::zero() { x.scale(-T::one()) } else { x };
        Self::new(x)
    }

    pub fn rep(&self) -> TangentElement<T> {
        self.rep
    }

    /// `1 - <r1, r2>` on unit representatives; zero exactly on equal
    /// oriented classes, 2 on opposite ones.
    pub fn distance(&self, other: &Self) -> T {
        (T::one() - self.rep.dot(&other.rep)).max(T::zero())
    }

    /// Class of `g X g^-1`.
    pub fn transformed(&self, g: &FrameMatrix<T>) -> Self {
        Self::new(adjoint(g, &self.rep)).expect("adjoint of a unit tangent is nonzero")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn wedge_examples() {
        let e1 = PlaneVector::new(1.0, 0.0);
        let e2 = PlaneVector::new(0.0, 1.0);
        assert_eq!(wedge(e1, e2), 1.0);
        let u2 = PlaneVector::polar(2.0 * PI / 3.0);
        assert!(close(wedge(e1, u2), 3f64.sqrt() / 2.0, 1e-15));
        let u = PlaneVector::new(0.3, -7.1);
        assert_eq!(wedge(u, u), 0.0);
    }

    #[test]
    fn apply_examples() {
        let v = PlaneVector::new(3.0, 4.0);
        assert_eq!(apply(&FrameMatrix::identity(), v), v);
        let r = FrameMatrix::rotation(PI / 3.0);
        let u1 = r.apply(PlaneVector::new(1.0, 0.0));
        assert!(u1.distance(PlaneVector::polar(PI / 3.0)) < 1e-15);
    }

    #[test]
    fn adjoint_rotation_quarter_turn() {
        let g = FrameMatrix::rotation(PI / 2.0);
        let x = TangentElement::new(1.0, 0.0, 0.0);
        let y = adjoint(&g, &x);
        assert!(close(y.a, -1.0, 1e-15));
        assert!(close(y.b, 0.0, 1e-15));
        assert!(close(y.c, 0.0, 1e-15));
        let id = adjoint(&FrameMatrix::identity(), &x);
        assert_eq!(id, x);
    }

    #[test]
    fn star_examples() {
        assert!(star_check(&TangentElement::new(0.0, -1.0, 1.0)));
        assert!(!star_check(&TangentElement::new(0.0, 1.0, 1.0)));
        assert!(!star_check(&TangentElement::new(1.0, -2.0, 1.0)));
    }

    #[test]
    fn exp_examples() {
        let x = TangentElement::rotation_generator();
        assert_eq!(exp_tangent(&x, 0.0).entries(), FrameMatrix::<f64>::identity().entries());
        let r = exp_tangent(&x, PI / 3.0);
        assert!(r.max_abs_diff(&FrameMatrix::rotation(PI / 3.0)) < 1e-15);
        for x in [
            TangentElement::new(0.7, 0.2, -1.3),
            TangentElement::new(1.0, 1.0, 0.5),
            TangentElement::new(1.0, -1.0, 1.0), // nilpotent
        ] {
            let p = exp_tangent(&x, 0.9) * exp_tangent(&x, -0.9);
            assert!(p.max_abs_diff(&FrameMatrix::identity()) < 1e-12, "{x:?}");
        }
    }

    #[test]
    fn exp_matches_series_for_hyperbolic_generator() {
        let x = TangentElement::new(1.0, 0.0, 0.0);
        let g = exp_tangent(&x, 0.5);
        assert!(close(g.alpha(), 0.5f64.exp(), 1e-15));
        assert!(close(g.delta(), (-0.5f64).exp(), 1e-15));
    }

    #[test]
    fn frame_projection_and_rejection() {
        let g = FrameMatrix::new(2.0, 0.0, 0.0, 0.5 * (1.0 + 1e-10)).unwrap();
        assert!(close(g.det(), 1.0, 1e-15));
        let err = FrameMatrix::new(2.0, 0.0, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, GeometryError::NotUnimodular { .. }));
        assert!(FrameMatrix::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn projective_orientation_rule() {
        let x = TangentElement::new(0.0, 2.0, -2.0);
        let p = PlaneVector::new(1.0, 0.0);
        let t = ProjectiveTangent::oriented_at(x, p).unwrap();
        assert!(wedge(p, t.rep().apply(p)) > 0.0);
        let plus = ProjectiveTangent::new(x).unwrap();
        let minus = ProjectiveTangent::new(x.scale(-1.0)).unwrap();
        assert!(close(plus.distance(&minus), 2.0, 1e-15));
        assert!(ProjectiveTangent::new(TangentElement::new(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let r = exp_tangent(
            &TangentElement::<f32>::rotation_generator(),
            std::f32::consts::FRAC_PI_3,
        );
        assert!(r.max_abs_diff(&FrameMatrix::rotation(std::f32::consts::FRAC_PI_3)) < 1e-6);
        assert!(star_check(&TangentElement::<f32>::new(0.0, -1.0, 1.0)));
    }
}
