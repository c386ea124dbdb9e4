//! Rank-one links in square representation.
//!
//! In square coordinates a link with hyperbolic index `j` has
//! `sigma_{j+2}(t) = a(1, t)`, `sigma_{j+4}(t) = a(s, 1)` with
//! `1 - t s = k = sqrt(3) / (2 a^2)`, and the hyperbolic arc
//! `sigma_j(t) = a(-1 - s, -1 - t)` on `(x + a)(y + a) = a^2 (1 - k)`.
//! A placement `g` in SL2 carries the square picture to the world.

use std::fmt;

use crate::error::{GeometryError, Result};
use crate::multicurve::{root_of_unity, CurveSample, MultiPoint};
use crate::scalar::Real;
use crate::sl2::{adjoint, star_check, wedge, FrameMatrix, PlaneVector, ProjectiveTangent, TangentElement};

/// Slack allowed when a sample parameter sits on the link boundary.
pub const PARAMETER_SLACK: f64 = 1e-12;
/// Relative size below which two velocity directions count as parallel.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Index of the curve carrying the hyperbolic arc, one of 0, 2, 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HyperbolicIndex(u8);

impl HyperbolicIndex {
    pub const ZERO: Self = Self(0);
    pub const TWO: Self = Self(2);
    pub const FOUR: Self = Self(4);
    pub const ALL: [Self; 3] = [Self::ZERO, Self::TWO, Self::FOUR];

    pub fn new(j: i64) -> Result<Self> {
        match j {
            0 | 2 | 4 => Ok(Self(j as u8)),
            _ => Err(GeometryError::InvalidInput(format!(
                "hyperbolic index must be 0, 2 or 4, got {j}"
            ))),
        }
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }

    /// `j + 2 (mod 6)`.
    pub fn next(self) -> Self {
        Self((self.0 + 2) % 6)
    }

    /// `j + 4 (mod 6)`.
    pub fn prev(self) -> Self {
        Self((self.0 + 4) % 6)
    }
}

impl fmt::Display for HyperbolicIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `k = sqrt(3) / (2 a^2)`, which must lie in `(0, 1)`.
pub fn k_of<T: Real>(a: T) -> Result<T> {
    let k = T::sqrt3() / (T::lit(2.0) * a * a);
    if !(a > T::zero() && k.is_finite() && k < T::one() - T::tol(1e-12)) {
        return Err(GeometryError::ScaleTooSmall {
            a: a.to_f64_lossy(),
            k: k.to_f64_lossy(),
        });
    }
    Ok(k)
}

/// Canonical data `(a, t0, tau, j)` of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareRep<T> {
    a: T,
    t0: T,
    tau: T,
    j: HyperbolicIndex,
    k: T,
}

impl<T: Real> SquareRep<T> {
    /// Requires `a^2 > sqrt(3)/2`, `-1 < t0 < k - 1` and `0 <= tau <= 1`.
    pub fn new(a: T, t0: T, tau: T, j: HyperbolicIndex) -> Result<Self> {
        let k = k_of(a)?;
        if !(t0 > -T::one() && t0 < k - T::one()) {
            return Err(GeometryError::InvalidSquareRep(format!(
                "t0 = {t0} outside (-1, k - 1) with k = {k}"
            )));
        }
        if !(tau >= T::zero() && tau <= T::one()) {
            return Err(GeometryError::InvalidSquareRep(format!("tau = {tau} outside [0, 1]")));
        }
        Ok(Self { a, t0, tau, j, k })
    }

    /// The link of the smoothed octagon: `a = 12^(1/4) / sqrt(4 - sqrt 2)`,
    /// `t0 = -1/sqrt 2`, `t1 = -1/2`, so `tau = 2 - sqrt 2`.
    pub fn octagon(j: HyperbolicIndex) -> Self {
        let two = T::lit(2.0);
        let a = T::lit(12.0).powf(T::lit(0.25)) / (T::lit(4.0) - two.sqrt()).sqrt();
        let t0 = -two.sqrt().recip();
        let tau = two - two.sqrt();
        Self::new(a, t0, tau, j).expect("octagon parameters are valid")
    }

    pub fn a(&self) -> T {
        self.a
    }
    pub fn t0(&self) -> T {
        self.t0
    }
    pub fn tau(&self) -> T {
        self.tau
    }
    pub fn j(&self) -> HyperbolicIndex {
        self.j
    }
    pub fn k(&self) -> T {
        self.k
    }

    pub fn t_end(&self) -> T {
        t_end(self)
    }

    pub fn with_tau(&self, tau: T) -> Result<Self> {
        Self::new(self.a, self.t0, tau, self.j)
    }

    pub fn is_degenerate(&self) -> bool {
        self.tau == T::zero()
    }

    /// `s = (1 - k) / t`, the parameter of the `j + 4` curve.
    pub fn s_at(&self, t: T) -> T {
        (T::one() - self.k) / t
    }

    fn check_range(&self, t: T) -> Result<()> {
        let (lo, hi) = (self.t0, self.t_end());
        let slack = T::tol(PARAMETER_SLACK) * (T::one() + lo.abs());
        if t.is_finite() && t >= lo - slack && t <= hi + slack {
            Ok(())
        } else {
            Err(GeometryError::ParameterOutOfRange {
                t: t.to_f64_lossy(),
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            })
        }
    }
}

/// `t1 = t0 + tau (k - 1 - t0)`.
pub fn t_end<T: Real>(rep: &SquareRep<T>) -> T {
    rep.t0 + rep.tau * (rep.k - T::one() - rep.t0)
}

/// Parameter of a single link equivalent to two consecutive links on the
/// same hyperbolic index: `1 - (1 - tau1)(1 - tau2)`.
pub fn merge_tau<T: Real>(tau1: T, tau2: T) -> T {
    T::one() - (T::one() - tau1) * (T::one() - tau2)
}

/// Positions, velocities and accelerations of all six curves at one
/// parameter value, in square coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalSample<T> {
    pub t: T,
    pub positions: MultiPoint<T>,
    pub velocities: [PlaneVector<T>; 6],
    pub accelerations: [PlaneVector<T>; 6],
}

impl<T: Real> CanonicalSample<T> {
    pub fn curve_sample(&self, m: usize) -> CurveSample<T> {
        CurveSample::new(
            self.t,
            self.positions.get(m),
            self.velocities[m % 6],
            Some(self.accelerations[m % 6]),
        )
    }

    pub fn transformed(&self, g: &FrameMatrix<T>) -> Self {
        Self {
            t: self.t,
            positions: self.positions.transformed(g),
            velocities: self.velocities.map(|v| g.apply(v)),
            accelerations: self.accelerations.map(|v| g.apply(v)),
        }
    }
}

/// Evaluates the six curves at `t`, which must lie in `[t0, t_end]`.
pub fn canonical_multipoint<T: Real>(rep: &SquareRep<T>, t: T) -> Result<CanonicalSample<T>> {
    rep.check_range(t)?;
    Ok(canonical_unchecked(rep, t))
}

fn canonical_unchecked<T: Real>(rep: &SquareRep<T>, t: T) -> CanonicalSample<T> {
    let a = rep.a;
    let one_minus_k = T::one() - rep.k;
    let s = one_minus_k / t;
    let ds = -one_minus_k / (t * t);
    let dds = T::lit(2.0) * one_minus_k / (t * t * t);
    let j = rep.j.value();
    let (i2, i4) = ((j + 2) % 6, (j + 4) % 6);

    let mut pos = [PlaneVector::zero(); 6];
    let mut vel = [PlaneVector::zero(); 6];
    let mut acc = [PlaneVector::zero(); 6];
    pos[i2] = PlaneVector::new(a, a * t);
    vel[i2] = PlaneVector::new(T::zero(), a);
    pos[i4] = PlaneVector::new(a * s, a);
    vel[i4] = PlaneVector::new(a * ds, T::zero());
    acc[i4] = PlaneVector::new(a * dds, T::zero());
    pos[j] = -pos[i2] - pos[i4];
    vel[j] = -vel[i2] - vel[i4];
    acc[j] = -acc[i2] - acc[i4];
    for m in [0, 2, 4] {
        let o = (m + 3) % 6;
        pos[o] = -pos[m];
        vel[o] = -vel[m];
        acc[o] = -acc[m];
    }
    CanonicalSample {
        t,
        positions: MultiPoint::from_points_unchecked(pos),
        velocities: vel,
        accelerations: acc,
    }
}

/// Closed-form area `I = I_j + I_{j+2} + I_{j+4}` swept from the origin:
/// `a^2 ((1-k)(1/t0 - 1/t1) + (t1 - t0) - (1-k) ln(t0/t1))`.
pub fn link_area<T: Real>(rep: &SquareRep<T>) -> T {
    if rep.is_degenerate() {
        return T::zero();
    }
    let (t0, t1) = (rep.t0, rep.t_end());
    let one_minus_k = T::one() - rep.k;
    rep.a * rep.a * (one_minus_k * (t0.recip() - t1.recip()) + (t1 - t0) - one_minus_k * (t0 / t1).ln())
}

/// Boundary state of a link: the frame `phi` with `phi u*_m = sigma_m` and
/// the oriented velocity class `[phi' phi^-1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState<T> {
    pub frame: FrameMatrix<T>,
    pub tangent: ProjectiveTangent<T>,
}

impl<T: Real> LinkState<T> {
    pub fn new(frame: FrameMatrix<T>, tangent: ProjectiveTangent<T>) -> Self {
        Self { frame, tangent }
    }

    pub fn multipoint(&self) -> MultiPoint<T> {
        MultiPoint::from_frame(&self.frame)
    }

    /// The tangent in circle representation, `phi^-1 X phi`.
    pub fn pulled_back_tangent(&self) -> TangentElement<T> {
        adjoint(&self.frame.inverse(), &self.tangent.rep())
    }

    pub fn satisfies_star(&self) -> bool {
        star_check(&self.pulled_back_tangent())
    }

    /// Left action of `g`.
    pub fn transformed(&self, g: &FrameMatrix<T>) -> Self {
        Self {
            frame: g.compose(&self.frame),
            tangent: self.tangent.transformed(g),
        }
    }

    /// The same state expressed relative to `base`: frame `base^-1 phi`.
    pub fn relative_to(&self, base: &FrameMatrix<T>) -> Self {
        self.transformed(&base.inverse())
    }
}

/// `[c0 c1] B^-1` where `B = [u*_0 u*_2]`.
fn times_b_inv<T: Real>(c0: PlaneVector<T>, c1: PlaneVector<T>) -> [T; 4] {
    // B^-1 = [[1, 1/sqrt3], [0, 2/sqrt3]]
    let r = T::sqrt3().recip();
    let (b01, b11) = (r, r + r);
    [c0.x, c0.x * b01 + c1.x * b11, c0.y, c0.y * b01 + c1.y * b11]
}

fn state_of_sample<T: Real>(sample: &CanonicalSample<T>) -> LinkState<T> {
    let p = sample.positions;
    let m = times_b_inv(p.get(0), p.get(2));
    // det is sqrt(3)/2 times the wedge of sigma_0, sigma_2, one up to rounding
    let frame = FrameMatrix::renormalized(m[0], m[1], m[2], m[3]);
    let dm = times_b_inv(sample.velocities[0], sample.velocities[2]);
    let inv = frame.inverse().entries();
    let x = [
        dm[0] * inv[0] + dm[1] * inv[2],
        dm[0] * inv[1] + dm[1] * inv[3],
        dm[2] * inv[0] + dm[3] * inv[2],
        dm[2] * inv[1] + dm[3] * inv[3],
    ];
    let tangent = ProjectiveTangent::new(TangentElement::from_matrix(x)).expect("link velocity is nonzero");
    LinkState { frame, tangent }
}

/// Frame and velocity class at parameter `t`, in square coordinates.
pub fn frame_at<T: Real>(rep: &SquareRep<T>, t: T) -> Result<LinkState<T>> {
    Ok(state_of_sample(&canonical_multipoint(rep, t)?))
}

/// A square representation together with the SL2 element placing it in
/// the world.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedRep<T> {
    pub rep: SquareRep<T>,
    pub placement: FrameMatrix<T>,
}

impl<T: Real> PlacedRep<T> {
    pub fn sample(&self, t: T) -> Result<CanonicalSample<T>> {
        Ok(canonical_multipoint(&self.rep, t)?.transformed(&self.placement))
    }

    pub fn state_at(&self, t: T) -> Result<LinkState<T>> {
        Ok(frame_at(&self.rep, t)?.transformed(&self.placement))
    }

    /// Parameter grid of `n >= 2` evenly spaced points over the link.
    pub fn grid(&self, n: usize) -> Vec<T> {
        let (t0, t1) = (self.rep.t0(), self.rep.t_end());
        let last = (n.max(2) - 1) as f64;
        (0..n.max(2))
            .map(|i| {
                if i as f64 == last {
                    t1
                } else {
                    t0 + (t1 - t0) * T::lit(i as f64 / last)
                }
            })
            .collect()
    }
}

/// One propagated link. `geometry` is absent only for a degenerate link
/// whose state admits no square representation on its index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link<T> {
    pub j: HyperbolicIndex,
    pub tau: T,
    pub state_in: LinkState<T>,
    pub state_out: LinkState<T>,
    pub geometry: Option<PlacedRep<T>>,
}

impl<T: Real> Link<T> {
    pub fn area(&self) -> T {
        self.geometry.map(|g| link_area(&g.rep)).unwrap_or_else(T::zero)
    }
}

/// Square representation (with `tau = 0`) and placement of the link on
/// index `j` that starts at `state`.
///
/// The placement maps the velocity of `sigma_{j+2}` to the positive y-axis
/// and that of `sigma_{j+4}` to the negative x-axis; `a` and `t0` are then
/// read off `sigma_{j+2} = a(1, t0)`.
pub fn recover<T: Real>(state: &LinkState<T>, j: HyperbolicIndex) -> Result<PlacedRep<T>> {
    let pulled = state.pulled_back_tangent();
    if pulled.det() <= T::zero() {
        return Err(if pulled.det().abs() <= T::tol(DEGENERACY_TOL) {
            GeometryError::DegenerateVelocity
        } else {
            GeometryError::NotRankOneCompatible("det X <= 0".into())
        });
    }
    if !star_check(&pulled) {
        return Err(GeometryError::NotRankOneCompatible("star conditions violated".into()));
    }
    let x = state.tangent.rep();
    let p2 = state.frame.apply(root_of_unity(j.value() + 2));
    let p4 = state.frame.apply(root_of_unity(j.value() + 4));
    let (d2, d4) = (x.apply(p2), x.apply(p4));
    let w24 = wedge(d2, d4);
    if w24.abs() <= T::tol(DEGENERACY_TOL) * d2.norm() * d4.norm() {
        return Err(GeometryError::DegenerateVelocity);
    }
    if w24 < T::zero() {
        return Err(GeometryError::NotRankOneCompatible(
            "linear curves turn the wrong way".into(),
        ));
    }
    let (e2, e4) = (wedge(d2, p2), wedge(d4, p4));
    if !(e2 < T::zero() && e4 < T::zero()) {
        return Err(GeometryError::NotRankOneCompatible(
            "linear curves do not move counterclockwise".into(),
        ));
    }
    let a = (e2 * e4 / w24).sqrt();
    k_of(a).map_err(|e| GeometryError::NotRankOneCompatible(e.to_string()))?;
    // second row of the world-to-square map is (a / e4) perp(d4)
    let t0 = wedge(d4, p2) / e4;
    let rep = SquareRep::new(a, t0, T::zero(), j).map_err(|e| GeometryError::NotRankOneCompatible(e.to_string()))?;
    let start = frame_at(&rep, t0)?;
    let placement = state.frame.compose(&start.frame.inverse());
    Ok(PlacedRep { rep, placement })
}

/// Runs one link of parameter `tau` on index `j` from `state_in`.
///
/// `tau = 0` returns `state_in` unchanged.
pub fn propagate<T: Real>(state_in: &LinkState<T>, tau: T, j: HyperbolicIndex) -> Result<Link<T>> {
    if !(tau >= T::zero() && tau < T::one()) {
        return Err(GeometryError::InvalidInput(format!("tau = {tau} outside [0, 1)")));
    }
    if tau == T::zero() {
        return Ok(Link {
            j,
            tau,
            state_in: *state_in,
            state_out: *state_in,
            geometry: recover(state_in, j).ok(),
        });
    }
    let placed = recover(state_in, j)?;
    let rep = placed.rep.with_tau(tau)?;
    let placed = PlacedRep { rep, ..placed };
    let state_out = placed.state_at(rep.t_end())?;
    Ok(Link {
        j,
        tau,
        state_in: *state_in,
        state_out,
        geometry: Some(placed),
    })
}

/// Canonical curves of a link sampled at `n` points each, transformed by
/// the placement.
pub fn sample_link_curves<T: Real>(placed: &PlacedRep<T>, n: usize) -> Result<[Vec<CurveSample<T>>; 6]> {
    let samples = placed
        .grid(n)
        .into_iter()
        .map(|t| placed.sample(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(std::array::from_fn(|m| {
        samples.iter().map(|s| s.curve_sample(m)).collect()
    }))
}
