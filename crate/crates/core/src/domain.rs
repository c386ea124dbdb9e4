//! Closed chains as hexameral domains.

use crate::chain::{assemble, chain_area, closure_report, normalize_links, AssembledChain, ChainParams, CLOSURE_TOL};
use crate::error::{GeometryError, Result};
use crate::hyperlink::{frame_at, HyperbolicIndex, LinkState, SquareRep};
use crate::multicurve::root_of_unity;
use crate::scalar::Real;
use crate::sl2::{wedge, PlaneVector};

/// Area of the balanced hexagon under the normalization `u_j ^ u_{j+2} = sqrt(3)/2`.
pub fn hexagon_area<T: Real>() -> T {
    T::lit(12.0).sqrt()
}

/// A closed, normalized hyperbolic chain with its area and packing density.
#[derive(Debug, Clone, PartialEq)]
pub struct HexameralDomain<T> {
    chain: ChainParams<T>,
    area: T,
    density: T,
}

impl<T: Real> HexameralDomain<T> {
    /// Accepts `chain` if it closes within `tol`. The area is twice the
    /// chain area since each link sweeps three of the six sectors.
    pub fn from_chain(chain: &ChainParams<T>, tol: T) -> Result<Self> {
        let chain = normalize_links(chain);
        let report = closure_report(&chain)?;
        if !report.is_closed(tol) {
            return Err(GeometryError::NotClosed {
                frame_residual: report.frame_residual.to_f64_lossy(),
                tangent_residual: report.tangent_residual.to_f64_lossy(),
            });
        }
        let area = T::lit(2.0) * chain_area(&chain)?;
        Ok(Self {
            chain,
            area,
            density: area / hexagon_area::<T>(),
        })
    }

    pub fn chain(&self) -> &ChainParams<T> {
        &self.chain
    }

    pub fn area(&self) -> T {
        self.area
    }

    pub fn density(&self) -> T {
        self.density
    }

    pub fn assembled(&self) -> AssembledChain<T> {
        assemble(&self.chain).expect("domain chain assembled at construction")
    }

    /// States at `per_link` evenly spaced parameters of every nondegenerate
    /// link (shared endpoints appear once).
    pub fn sample_states(&self, per_link: usize) -> Result<Vec<LinkState<T>>> {
        let assembled = self.assembled();
        let mut out = vec![assembled.initial];
        for link in &assembled.links {
            let Some(placed) = link.geometry else { continue };
            if placed.rep.is_degenerate() {
                continue;
            }
            for t in placed.grid(per_link).into_iter().skip(1) {
                out.push(placed.state_at(t)?);
            }
        }
        Ok(out)
    }
}

/// `area / sqrt(12)`.
pub fn density<T: Real>(d: &HexameralDomain<T>) -> T {
    d.density
}

/// Initial state of the octagon chain in circle representation.
pub fn octagon_initial_state<T: Real>() -> LinkState<T> {
    let rep = SquareRep::octagon(HyperbolicIndex::ZERO);
    let start = frame_at(&rep, rep.t0()).expect("t0 is in range");
    start.relative_to(&start.frame)
}

/// The octagon link parameter `2 - sqrt 2`.
pub fn octagon_tau<T: Real>() -> T {
    T::lit(2.0) - T::lit(2.0).sqrt()
}

/// The four links `(tau, 0), (tau, 2), (tau, 4), (tau, 0)` of the smoothed
/// octagon, starting at the identity frame.
pub fn octagon_chain<T: Real>() -> ChainParams<T> {
    let tau = octagon_tau::<T>();
    ChainParams::from_pairs(octagon_initial_state(), &[(tau, 0), (tau, 2), (tau, 4), (tau, 0)]).expect("valid indices")
}

pub fn smoothed_octagon<T: Real>() -> HexameralDomain<T> {
    HexameralDomain::from_chain(&octagon_chain(), T::tol(CLOSURE_TOL)).expect("the octagon chain closes")
}

/// `(8 - sqrt 32 - ln 2) / (sqrt 8 - 1)`.
pub fn octagon_density_exact<T: Real>() -> T {
    let two = T::lit(2.0);
    (T::lit(8.0) - T::lit(32.0).sqrt() - two.ln()) / (T::lit(8.0).sqrt() - T::one())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPolyline<T> {
    pub points: Vec<PlaneVector<T>>,
    pub closed: bool,
}

impl<T: Real> BoundaryPolyline<T> {
    /// Shoelace area (positive for counterclockwise order).
    pub fn area(&self) -> T {
        let n = self.points.len();
        let mut s = T::zero();
        for i in 0..n {
            s = s + wedge(self.points[i], self.points[(i + 1) % n]);
        }
        s * T::lit(0.5)
    }

    /// Largest distance from `-p` to the nearest polyline point, over all `p`.
    pub fn central_symmetry_error(&self) -> T {
        self.points.iter().fold(T::zero(), |m, &p| {
            let nearest = self.points.iter().fold(T::infinity(), |d, &q| d.min((q + p).norm()));
            m.max(nearest)
        })
    }

    /// Smallest turning wedge between consecutive edges, scaled by the edge
    /// lengths; nonnegative for a convex counterclockwise polygon.
    pub fn min_turn(&self) -> T {
        let n = self.points.len();
        let mut m = T::infinity();
        for i in 0..n {
            let e0 = self.points[(i + 1) % n] - self.points[i];
            let e1 = self.points[(i + 2) % n] - self.points[(i + 1) % n];
            let l = e0.norm() * e1.norm();
            if l > T::zero() {
                m = m.min(wedge(e0, e1) / l);
            }
        }
        m
    }

    pub fn is_convex(&self, tol: T) -> bool {
        self.min_turn() >= -tol
    }
}

/// Regular `samples`-gon inscribed in the unit circle with its density.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleReference<T> {
    pub polyline: BoundaryPolyline<T>,
    pub density: T,
}

/// The unit circle, the rank-three hexameral domain, density `pi / sqrt 12`.
pub fn circle_reference<T: Real>(samples: usize) -> Result<CircleReference<T>> {
    if samples < 6 {
        return Err(GeometryError::InvalidInput(format!(
            "circle reference needs at least 6 samples, got {samples}"
        )));
    }
    let points = (0..samples)
        .map(|i| PlaneVector::polar(T::TAU() * T::lit(i as f64) / T::lit(samples as f64)))
        .collect();
    Ok(CircleReference {
        polyline: BoundaryPolyline { points, closed: true },
        density: T::PI() / hexagon_area::<T>(),
    })
}

/// Samples the six curves over the fundamental interval and concatenates
/// them in boundary order `sigma_0, sigma_1, ..., sigma_5`.
pub fn boundary_polyline<T: Real>(d: &HexameralDomain<T>, per_link: usize) -> Result<BoundaryPolyline<T>> {
    if per_link < 2 {
        return Err(GeometryError::InvalidInput(format!("per_link = {per_link} < 2")));
    }
    let assembled = d.assembled();
    let mut samples = Vec::new();
    for link in &assembled.links {
        let Some(placed) = link.geometry else { continue };
        if placed.rep.is_degenerate() {
            continue;
        }
        let grid = placed.grid(per_link);
        let skip = usize::from(!samples.is_empty());
        for t in grid.into_iter().skip(skip) {
            samples.push(placed.sample(t)?);
        }
    }
    let mut points = Vec::with_capacity(6 * samples.len());
    for m in 0..6 {
        // the last sample of sigma_m is the first of sigma_{m+1}
        for s in &samples[..samples.len().saturating_sub(1)] {
            points.push(s.positions.get(m));
        }
    }
    Ok(BoundaryPolyline { points, closed: true })
}

/// Vertices of the balanced hexagon at `state`: vertex `j` is where the
/// tangent lines at `sigma_j` and `sigma_{j+1}` meet.
pub fn balanced_hexagon<T: Real>(state: &LinkState<T>) -> Result<[PlaneVector<T>; 6]> {
    let x = state.tangent.rep();
    let p: [PlaneVector<T>; 6] = std::array::from_fn(|j| state.frame.apply(root_of_unity(j)));
    let mut out = [PlaneVector::zero(); 6];
    for j in 0..6 {
        let (a, b) = (p[j], p[(j + 1) % 6]);
        let (da, db) = (x.apply(a), x.apply(b));
        // a + s da = b + r db
        let det = wedge(da, db);
        if det.abs() <= T::tol(1e-14) * da.norm() * db.norm() {
            return Err(GeometryError::DegenerateVelocity);
        }
        let s = wedge(b - a, db) / det;
        out[j] = a + da * s;
    }
    Ok(out)
}
