//! Numerical checks of the variational identities: the area functional on
//! SL2 paths, the conserved quantities of its Euler-Lagrange equations, the
//! second variation at the circle, the curvature formula at a point where
//! two curvatures vanish, and the rank-two first variation.

use crate::chain::AssembledChain;
use crate::error::{GeometryError, Result};
use crate::hyperlink::PlacedRep;
use crate::multicurve::root_of_unity;
use crate::scalar::Real;
use crate::sl2::{star_check, wedge, FrameMatrix, TangentElement};

pub const MIN_GRID: usize = 16;

/// A sampled curve in SL2, stored relative to its first frame so that the
/// path starts at the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePath<T> {
    grid: Vec<T>,
    frames: Vec<FrameMatrix<T>>,
}

impl<T: Real> FramePath<T> {
    /// Rebases `frames` on the first one; the grid must be strictly
    /// increasing with at least [`MIN_GRID`] points.
    pub fn new(grid: Vec<T>, frames: Vec<FrameMatrix<T>>) -> Result<Self> {
        if grid.len() != frames.len() {
            return Err(GeometryError::InvalidInput("grid and frames differ in length".into()));
        }
        check_grid(&grid)?;
        let base = frames[0].inverse();
        let frames = frames.iter().map(|f| base.compose(f)).collect();
        Ok(Self { grid, frames })
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn frames(&self) -> &[FrameMatrix<T>] {
        &self.frames
    }
}

fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.len() < MIN_GRID {
        return Err(GeometryError::InvalidInput(format!(
            "grid has {} points, need at least {MIN_GRID}",
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GeometryError::InvalidInput("grid is not increasing".into()));
    }
    Ok(())
}

/// `phi(t) = rotation(t)` on `n` evenly spaced points of `[t0, t1]`.
pub fn rotation_path<T: Real>(t0: T, t1: T, n: usize) -> Result<FramePath<T>> {
    let grid = uniform_grid(t0, t1, n);
    let frames = grid.iter().map(|&t| FrameMatrix::rotation(t)).collect();
    FramePath::new(grid, frames)
}

/// Frames of one placed link on `n` evenly spaced parameters.
pub fn link_path<T: Real>(placed: &PlacedRep<T>, n: usize) -> Result<FramePath<T>> {
    let grid = placed.grid(n);
    let frames = grid
        .iter()
        .map(|&t| Ok(placed.state_at(t)?.frame))
        .collect::<Result<Vec<_>>>()?;
    FramePath::new(grid, frames)
}

/// Frames along a whole chain, `per_link` points per nondegenerate link.
/// Each link is given a unit-length slot on the path parameter.
pub fn chain_path<T: Real>(assembled: &AssembledChain<T>, per_link: usize) -> Result<FramePath<T>> {
    let mut grid = vec![T::zero()];
    let mut frames = vec![assembled.initial.frame];
    let mut offset = T::zero();
    for link in &assembled.links {
        let Some(placed) = link.geometry else { continue };
        if placed.rep.is_degenerate() {
            continue;
        }
        let local = placed.grid(per_link);
        let n = local.len() - 1;
        for (i, &t) in local.iter().enumerate().skip(1) {
            grid.push(offset + T::lit(i as f64 / n as f64));
            frames.push(placed.state_at(t)?.frame);
        }
        offset = offset + T::one();
    }
    FramePath::new(grid, frames)
}

pub fn uniform_grid<T: Real>(t0: T, t1: T, n: usize) -> Vec<T> {
    let last = (n.max(2) - 1) as f64;
    (0..n.max(2))
        .map(|i| t0 + (t1 - t0) * T::lit(i as f64 / last))
        .collect()
}

/// Area of the six sectors swept by `sigma_j = phi u*_j`:
/// `(3/2) * integral (alpha dgamma - gamma dalpha) + (beta ddelta - delta dbeta)`,
/// with the trapezoid rule applied to each one-form.
pub fn area_functional<T: Real>(path: &FramePath<T>) -> T {
    let f = &path.frames;
    let mut s = T::zero();
    for w in f.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        s = s + (p.alpha() * q.gamma() - p.gamma() * q.alpha()) + (p.beta() * q.delta() - p.delta() * q.beta());
    }
    T::lit(1.5) * s
}

/// Largest violation of `delta^2 + gamma^2 = 1`, `alpha^2 + beta^2 = 1`,
/// `gamma alpha + delta beta = 0` along the path.
pub fn euler_lagrange_residual<T: Real>(path: &FramePath<T>) -> T {
    path.frames.iter().fold(T::zero(), |m, g| {
        let (a, b, c, d) = (g.alpha(), g.beta(), g.gamma(), g.delta());
        m.max((d * d + c * c - T::one()).abs())
            .max((a * a + b * b - T::one()).abs())
            .max((c * a + d * b).abs())
    })
}

/// Function values together with derivative values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    pub values: Vec<T>,
    pub derivatives: Vec<T>,
}

impl<T: Real> SampledFunction<T> {
    pub fn from_fn(grid: &[T], f: impl Fn(T) -> T, df: impl Fn(T) -> T) -> Self {
        Self {
            values: grid.iter().map(|&t| f(t)).collect(),
            derivatives: grid.iter().map(|&t| df(t)).collect(),
        }
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.values.len() != n || self.derivatives.len() != n {
            return Err(GeometryError::InvalidInput("sample length differs from grid".into()));
        }
        Ok(())
    }
}

fn trapezoid<T: Real>(grid: &[T], values: impl Fn(usize) -> T) -> T {
    let half = T::lit(0.5);
    (1..grid.len()).fold(T::zero(), |s, i| {
        s + (grid[i] - grid[i - 1]) * (values(i - 1) + values(i)) * half
    })
}

/// `integral 4 u w'` at the unit circle.
pub fn second_variation_circle<T: Real>(u: &[T], w: &SampledFunction<T>, grid: &[T]) -> Result<T> {
    check_grid(grid)?;
    w.check_len(grid.len())?;
    if u.len() != grid.len() {
        return Err(GeometryError::InvalidInput("u length differs from grid".into()));
    }
    let four = T::lit(4.0);
    Ok(trapezoid(grid, |i| four * u[i] * w.derivatives[i]))
}

/// The curvature of `sigma_4` at a point where those of `sigma_0` and
/// `sigma_2` vanish, computed two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureLemma<T> {
    /// `3 sqrt3 (a^2 + bc)^2 / (3a + sqrt3 c)`
    pub closed_form: T,
    /// `X u*_4 ^ (X' + X^2) u*_4` with `X'` solved from the two vanishing
    /// conditions.
    pub direct: T,
    pub x_prime: TangentElement<T>,
}

impl<T: Real> CurvatureLemma<T> {
    pub fn relative_gap(&self) -> T {
        (self.closed_form - self.direct).abs() / self.closed_form.abs().max(T::min_positive_value())
    }
}

fn basis<T: Real>() -> [TangentElement<T>; 3] {
    let (o, z) = (T::one(), T::zero());
    [
        TangentElement::new(o, z, z),
        TangentElement::new(z, o, z),
        TangentElement::new(z, z, o),
    ]
}

fn curvature_at<T: Real>(x: &TangentElement<T>, x_prime: &TangentElement<T>, j: usize) -> T {
    let u = root_of_unity::<T>(j);
    let xu = x.apply(u);
    let q = x.a * x.a + x.b * x.c; // X^2 = q I
    wedge(xu, x_prime.apply(u) + u * q)
}

fn det3<T: Real>(m: &[[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Solves for `X'` (orthogonal to `X`, which spans the common kernel) so
/// that the curvature constraint vanishes for `j = 0, 2`, then evaluates it
/// for `j = 4` and compares with the closed form.
pub fn curvature_lemma_value<T: Real>(x: &TangentElement<T>) -> Result<CurvatureLemma<T>> {
    if !star_check(x) {
        return Err(GeometryError::StarViolation);
    }
    let zero = TangentElement::new(T::zero(), T::zero(), T::zero());
    let e = basis::<T>();
    let mut m = [[T::zero(); 3]; 3];
    let mut rhs = [T::zero(); 3];
    for (row, j) in [0usize, 2].into_iter().enumerate() {
        let offset = curvature_at(x, &zero, j);
        for col in 0..3 {
            m[row][col] = curvature_at(x, &e[col], j) - offset;
        }
        rhs[row] = -offset;
    }
    m[2] = x.components();
    let d = det3(&m);
    if d.abs() <= T::tol(1e-14) {
        return Err(GeometryError::DegenerateVelocity);
    }
    let mut sol = [T::zero(); 3];
    for (col, s) in sol.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        *s = det3(&mc) / d;
    }
    let x_prime = TangentElement::new(sol[0], sol[1], sol[2]);
    let sqrt3 = T::sqrt3();
    let q = x.a * x.a + x.b * x.c;
    let closed_form = T::lit(3.0) * sqrt3 * q * q / (T::lit(3.0) * x.a + sqrt3 * x.c);
    Ok(CurvatureLemma {
        closed_form,
        direct: curvature_at(x, &x_prime, 4),
        x_prime,
    })
}

/// Result of the rank-two first-variation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rank2Variation<T> {
    /// `integral (1/4)(sqrt3 s' - (1 + s^2) x')`
    pub integral: T,
    /// `max |x'(s^2 - 1) - s' z|` over the grid.
    pub constraint_residual: T,
    /// Derivative of the integral along the interior bump
    /// `x -> x + eps sin^2(pi (t - t0) / (t1 - t0))`.
    pub x_variation: T,
}

/// Evaluates the rank-two area integral and its constraint. When `z` is not
/// given it is derived from the constraint itself, so the residual is zero.
pub fn rank2_first_variation<T: Real>(
    s: &SampledFunction<T>,
    x: &SampledFunction<T>,
    z: Option<&[T]>,
    grid: &[T],
) -> Result<Rank2Variation<T>> {
    check_grid(grid)?;
    s.check_len(grid.len())?;
    x.check_len(grid.len())?;
    if let Some(index) = s.derivatives.iter().position(|&d| !(d > T::zero())) {
        return Err(GeometryError::SignCondition { index });
    }
    let quarter = T::lit(0.25);
    let sqrt3 = T::sqrt3();
    let integral = trapezoid(grid, |i| {
        let sv = s.values[i];
        quarter * (sqrt3 * s.derivatives[i] - (T::one() + sv * sv) * x.derivatives[i])
    });
    let constraint_residual = match z {
        Some(z) => {
            if z.len() != grid.len() {
                return Err(GeometryError::InvalidInput("z length differs from grid".into()));
            }
            (0..grid.len()).fold(T::zero(), |m, i| {
                let sv = s.values[i];
                m.max((x.derivatives[i] * (sv * sv - T::one()) - s.derivatives[i] * z[i]).abs())
            })
        }
        None => T::zero(),
    };
    let (t0, t1) = (grid[0], grid[grid.len() - 1]);
    let w = T::PI() / (t1 - t0);
    // d/deps of -(1/4) int (1 + s^2)(x' + eps eta') = -(1/4) int (1 + s^2) eta'
    let x_variation = trapezoid(grid, |i| {
        let sv = s.values[i];
        let eta_prime = w * (T::lit(2.0) * w * (grid[i] - t0)).sin();
        -quarter * (T::one() + sv * sv) * eta_prime
    });
    Ok(Rank2Variation {
        integral,
        constraint_residual,
        x_variation,
    })
}
