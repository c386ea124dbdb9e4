//! Hyperbolic chains: an initial state followed by a list of links.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::hyperlink::{link_area, merge_tau, propagate, HyperbolicIndex, Link, LinkState};
use crate::multicurve::root_of_unity;
use crate::scalar::Real;
use crate::sl2::FrameMatrix;

/// Closure tolerance used to decide whether a chain is closed.
pub const CLOSURE_TOL: f64 = 1e-6;
/// Closure tolerance for verification.
pub const STRICT_CLOSURE_TOL: f64 = 1e-9;
/// Slack on the angle condition.
pub const ANGLE_TOL: f64 = 1e-9;
/// Minimum number of angle samples per link.
pub const ANGLE_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec<T> {
    pub tau: T,
    pub j: HyperbolicIndex,
}

impl<T: Real> LinkSpec<T> {
    pub fn new(tau: T, j: HyperbolicIndex) -> Self {
        Self { tau, j }
    }

    pub fn is_degenerate(&self) -> bool {
        self.tau == T::zero()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams<T> {
    pub initial: LinkState<T>,
    pub links: Vec<LinkSpec<T>>,
}

impl<T: Real> ChainParams<T> {
    pub fn new(initial: LinkState<T>, links: Vec<LinkSpec<T>>) -> Self {
        Self { initial, links }
    }

    /// Builds the link list from `(tau, j)` pairs.
    pub fn from_pairs(initial: LinkState<T>, pairs: &[(T, usize)]) -> Result<Self> {
        let links = pairs
            .iter()
            .map(|&(tau, j)| Ok(LinkSpec::new(tau, HyperbolicIndex::new(j as i64)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { initial, links })
    }

    /// The same chain moved by `g` in SL2.
    pub fn transformed(&self, g: &FrameMatrix<T>) -> Self {
        Self {
            initial: self.initial.transformed(g),
            links: self.links.clone(),
        }
    }

    pub fn taus(&self) -> Vec<T> {
        self.links.iter().map(|l| l.tau).collect()
    }
}

/// The propagated links of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledChain<T> {
    pub initial: LinkState<T>,
    pub links: Vec<Link<T>>,
}

impl<T: Real> AssembledChain<T> {
    /// Initial state followed by the state at the end of each link.
    pub fn states(&self) -> Vec<LinkState<T>> {
        std::iter::once(self.initial)
            .chain(self.links.iter().map(|l| l.state_out))
            .collect()
    }

    pub fn final_state(&self) -> LinkState<T> {
        self.links.last().map(|l| l.state_out).unwrap_or(self.initial)
    }

    pub fn area(&self) -> T {
        self.links.iter().fold(T::zero(), |acc, l| acc + l.area())
    }
}

/// Propagates every link in order; errors carry the failing link index.
pub fn assemble<T: Real>(chain: &ChainParams<T>) -> Result<AssembledChain<T>> {
    let mut state = chain.initial;
    let mut links = Vec::with_capacity(chain.links.len());
    for (i, spec) in chain.links.iter().enumerate() {
        let link = propagate(&state, spec.tau, spec.j).map_err(|e| e.at_link(i))?;
        state = link.state_out;
        links.push(link);
    }
    Ok(AssembledChain {
        initial: chain.initial,
        links,
    })
}

/// Sum of the closed-form link areas.
pub fn chain_area<T: Real>(chain: &ChainParams<T>) -> Result<T> {
    let assembled = assemble(chain)?;
    Ok(assembled
        .links
        .iter()
        .filter_map(|l| l.geometry)
        .fold(T::zero(), |acc, g| acc + link_area(&g.rep)))
}

/// Closure and angle diagnostics.
///
/// Both residuals are measured relative to the initial frame, which makes
/// them invariant under moving the whole chain by SL2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport<T> {
    /// `max |phi0^-1 phi1 - rho|` over entries.
    pub frame_residual: T,
    /// Projective distance between the initial and final velocity classes.
    pub tangent_residual: T,
    pub angle_ok: bool,
    /// Smallest slack of the sampled angle condition; negative when violated.
    pub angle_margin: T,
}

impl<T: Real> ClosureReport<T> {
    pub fn is_closed(&self, tol: T) -> bool {
        self.frame_residual < tol && self.tangent_residual < tol
    }

    pub fn passes(&self, tol: T) -> bool {
        self.is_closed(tol) && self.angle_ok
    }
}

/// Rotation by `pi/3`, taking `u*_j` to `u*_{j+1}`.
pub fn sixth_turn<T: Real>() -> FrameMatrix<T> {
    FrameMatrix::rotation(T::FRAC_PI_3())
}

/// Sampled arguments of `phi0^-1 sigma_0(t)` along the chain, in order.
pub fn angle_profile<T: Real>(assembled: &AssembledChain<T>, per_link: usize) -> Result<Vec<T>> {
    let base = assembled.initial.frame.inverse();
    let mut out = vec![base.compose(&assembled.initial.frame).apply(root_of_unity(0)).arg()];
    for link in &assembled.links {
        let Some(placed) = link.geometry else { continue };
        if placed.rep.is_degenerate() {
            continue;
        }
        for t in placed.grid(per_link.max(2)).into_iter().skip(1) {
            let s = placed.sample(t)?;
            out.push(base.apply(s.positions.get(0)).arg());
        }
    }
    Ok(out)
}

fn angle_margin<T: Real>(args: &[T]) -> T {
    let lo = args.iter().fold(T::infinity(), |m, &a| m.min(a));
    let hi = args.iter().fold(T::neg_infinity(), |m, &a| m.max(a));
    let step = args.windows(2).fold(T::infinity(), |m, w| m.min(w[1] - w[0]));
    lo.min(T::FRAC_PI_3() - hi).min(step)
}

pub fn closure_report_assembled<T: Real>(assembled: &AssembledChain<T>) -> Result<ClosureReport<T>> {
    let base = assembled.initial.frame.inverse();
    let last = assembled.final_state();
    let rel = base.compose(&last.frame);
    let frame_residual = rel.max_abs_diff(&sixth_turn());
    let t0 = assembled.initial.tangent.transformed(&base);
    let t1 = last.tangent.transformed(&base);
    let tangent_residual = t0.distance(&t1);
    let args = angle_profile(assembled, ANGLE_SAMPLES)?;
    let margin = angle_margin(&args);
    Ok(ClosureReport {
        frame_residual,
        tangent_residual,
        angle_ok: margin >= -T::tol(ANGLE_TOL),
        angle_margin: margin,
    })
}

pub fn closure_report<T: Real>(chain: &ChainParams<T>) -> Result<ClosureReport<T>> {
    closure_report_assembled(&assemble(chain)?)
}

/// Removes degenerate links, merges consecutive links on the same index,
/// and pads with degenerate links so each index advances by 2.
pub fn normalize_links<T: Real>(chain: &ChainParams<T>) -> ChainParams<T> {
    let mut merged: Vec<LinkSpec<T>> = Vec::with_capacity(chain.links.len());
    for spec in chain.links.iter().filter(|l| !l.is_degenerate()) {
        match merged.last_mut() {
            Some(last) if last.j == spec.j => last.tau = merge_tau(last.tau, spec.tau),
            _ => merged.push(*spec),
        }
    }
    let mut links = Vec::with_capacity(merged.len() * 2);
    for spec in merged {
        if let Some(prev) = links.last().map(|l: &LinkSpec<T>| l.j) {
            if spec.j == prev.prev() {
                links.push(LinkSpec::new(T::zero(), prev.next()));
            }
        }
        links.push(spec);
    }
    ChainParams {
        initial: chain.initial,
        links,
    }
}

/// Number of links in the shortest normalized representation of a closed
/// chain.
///
/// Relabeling the multi-point by `rho^2` shifts every index by the same
/// amount, so the count does not depend on the first index. When the last
/// link continues into the first one of the next period (its index is the
/// first index plus 2), the start lies inside a link and the two pieces
/// count once.
pub fn link_length<T: Real>(chain: &ChainParams<T>, tol: T) -> Result<usize> {
    let report = closure_report(chain)?;
    if !report.is_closed(tol) {
        return Err(GeometryError::NotClosed {
            frame_residual: report.frame_residual.to_f64_lossy(),
            tangent_residual: report.tangent_residual.to_f64_lossy(),
        });
    }
    let normal = normalize_links(chain);
    let mut length = normal.links.len();
    if let (Some(first), Some(last)) = (normal.links.first(), normal.links.last()) {
        if length > 1 && last.j == first.j.next() {
            length -= 1;
        }
    }
    if length == 0 || !(length - 1).is_multiple_of(3) {
        return Err(GeometryError::LinkLengthViolation { length });
    }
    Ok(length)
}
