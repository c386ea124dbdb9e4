//! Replacing a six-link segment by a five-link chain between the same
//! boundary states.
//!
//! The initial state is shared, so only the five link parameters move,
//! against five independent equations (three for the frame, two for the
//! tangent class). For a fixed index pattern the solutions are isolated;
//! the search runs every normalized pattern and keeps the feasible
//! solution of least area.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{angle_profile, assemble, chain_area, ChainParams, LinkSpec, ANGLE_SAMPLES, ANGLE_TOL};
use crate::error::{GeometryError, Result};
use crate::hyperlink::{HyperbolicIndex, LinkState};
use crate::optimize::closure::{newton_project, state_mismatch};
use crate::optimize::nelder_mead::minimize;
use crate::optimize::{excess_sq, SearchSpec, FAILURE_PENALTY, TAU_MAX};

/// Unknowns and independent equations per index pattern.
pub const REDUCTION_VARIABLES: usize = 5;
pub const REDUCTION_EQUATIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub six_link_area: f64,
    pub five_link_area: Option<f64>,
    /// `five_link_area < six_link_area - 1e-9`
    pub decreased: bool,
    pub pattern: Option<[usize; 5]>,
    pub taus: Option<Vec<f64>>,
    /// Largest frame entry mismatch at the terminal state of the best
    /// candidate.
    pub frame_residual: Option<f64>,
    pub tangent_residual: Option<f64>,
    pub patterns_tried: usize,
    pub feasible_candidates: usize,
    pub variables: usize,
    pub equations: usize,
}

/// The normalized five-link index sequences `j_i = j_0 + 2i`, one per
/// starting index. Other sequences normalize to more than five links.
pub fn reduction_patterns() -> Vec<[HyperbolicIndex; 5]> {
    HyperbolicIndex::ALL
        .iter()
        .map(|&j0| {
            let mut j = j0;
            std::array::from_fn(|i| {
                if i > 0 {
                    j = j.next();
                }
                j
            })
        })
        .collect()
}

fn segment(initial: LinkState<f64>, pattern: &[HyperbolicIndex; 5], taus: &[f64]) -> ChainParams<f64> {
    let links = pattern
        .iter()
        .zip(taus)
        .map(|(&j, &tau)| LinkSpec::new(tau, j))
        .collect();
    ChainParams::new(initial, links)
}

fn angle_margin(chain: &ChainParams<f64>) -> Option<f64> {
    let args = angle_profile(&assemble(chain).ok()?, ANGLE_SAMPLES).ok()?;
    let lo = args.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = args.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let step = args.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    Some(lo.min(std::f64::consts::FRAC_PI_3 - hi).min(step))
}

struct Target {
    initial: LinkState<f64>,
    terminal: LinkState<f64>,
}

impl Target {
    fn mismatch(&self, pattern: &[HyperbolicIndex; 5], taus: &[f64]) -> Option<[f64; 7]> {
        let end = assemble(&segment(self.initial, pattern, taus)).ok()?.final_state();
        Some(state_mismatch(&self.initial.frame, &self.terminal, &end))
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    area: f64,
    taus: Vec<f64>,
    residual: [f64; 7],
}

fn solve_from(target: &Target, pattern: &[HyperbolicIndex; 5], seed: &[f64], spec: &SearchSpec) -> Option<Candidate> {
    let w = spec.penalty_weights;
    let tol = spec.feasibility_tol;
    let f = |taus: &[f64]| {
        let chain = segment(target.initial, pattern, taus);
        let (Ok(area), Some(r)) = (chain_area(&chain), target.mismatch(pattern, taus)) else {
            return FAILURE_PENALTY;
        };
        let closure: f64 = r.iter().map(|v| excess_sq(v.abs(), tol)).sum();
        let angle = angle_margin(&chain).map_or(1.0, |m| excess_sq(-m, ANGLE_TOL));
        area + w.closure * closure + w.angle * angle
    };
    let m = minimize(f, seed, &spec.bounds, spec.initial_step, spec.max_evals, 1e-15, 1e-12);
    let r = |taus: &[f64]| target.mismatch(pattern, taus).map(|m| m.to_vec());
    let taus = newton_project(r, &m.x, &spec.bounds, tol.min(1e-12), 50)?;
    let residual = target.mismatch(pattern, &taus)?;
    let chain = segment(target.initial, pattern, &taus);
    if residual.iter().any(|v| v.abs() > tol) || angle_margin(&chain)? < -ANGLE_TOL {
        return None;
    }
    Some(Candidate {
        area: chain_area(&chain).ok()?,
        taus,
        residual,
    })
}

/// Searches for a five-link chain with the initial and terminal states of
/// `six_link` and reports its least area next to the six-link area.
///
/// Seeds for each pattern are the six-link parameters with one link
/// dropped (when the remaining indices match the pattern) and
/// `spec.restarts` seeded random points. The segment must assemble and
/// satisfy the angle condition.
pub fn link_reduction_experiment(six_link: &ChainParams<f64>, spec: &SearchSpec) -> Result<ReductionReport> {
    spec.validate()?;
    if spec.variable_count != REDUCTION_VARIABLES {
        return Err(GeometryError::InfeasibleInput(format!(
            "link reduction has {REDUCTION_VARIABLES} variables, spec has {}",
            spec.variable_count
        )));
    }
    if six_link.links.len() != 6 {
        return Err(GeometryError::InfeasibleInput(format!(
            "expected 6 links, got {}",
            six_link.links.len()
        )));
    }
    let assembled = assemble(six_link).map_err(|e| GeometryError::InfeasibleInput(e.to_string()))?;
    match angle_margin(six_link) {
        Some(m) if m >= -ANGLE_TOL => {}
        _ => {
            return Err(GeometryError::InfeasibleInput(
                "segment violates the angle condition".into(),
            ))
        }
    }
    let six_link_area = assembled.area();
    let target = Target {
        initial: six_link.initial,
        terminal: assembled.final_state(),
    };
    let patterns = reduction_patterns();
    let six_taus = six_link.taus();
    let scale = six_taus.iter().copied().fold(0.0f64, f64::max).max(0.05) * 1.5;

    let mut jobs: Vec<(usize, Vec<f64>)> = Vec::new();
    for (pi, pattern) in patterns.iter().enumerate() {
        for drop in 0..6 {
            let rest: Vec<&LinkSpec<f64>> = six_link
                .links
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != drop)
                .map(|(_, l)| l)
                .collect();
            if rest.iter().zip(pattern).all(|(l, j)| l.j == *j) {
                jobs.push((pi, rest.iter().map(|l| l.tau).collect()));
            }
        }
        for r in 0..spec.restarts {
            let mut s = spec.clone();
            s.seed = spec.seed.wrapping_add(pi as u64);
            s.start = None;
            s.bounds = vec![(0.0, scale.min(TAU_MAX)); 5];
            jobs.push((pi, s.start_point(r)));
        }
    }
    let results: Vec<Option<Candidate>> = jobs
        .par_iter()
        .map(|(pi, seed)| solve_from(&target, &patterns[*pi], seed, spec))
        .collect();

    let mut best: Option<(usize, Candidate)> = None;
    let mut feasible = 0;
    for ((pi, _), c) in jobs.iter().zip(results) {
        let Some(c) = c else { continue };
        feasible += 1;
        if best.as_ref().is_none_or(|(_, b)| c.area < b.area) {
            best = Some((*pi, c));
        }
    }
    let five_link_area = best.as_ref().map(|(_, c)| c.area);
    let tangent_residual = best.as_ref().map(|(pi, c)| {
        let chain = segment(target.initial, &patterns[*pi], &c.taus);
        let end = assemble(&chain).expect("candidate assembled").final_state();
        let base = target.initial.frame.inverse();
        end.tangent
            .transformed(&base)
            .distance(&target.terminal.tangent.transformed(&base))
    });
    Ok(ReductionReport {
        six_link_area,
        five_link_area,
        decreased: five_link_area.is_some_and(|a| a < six_link_area - 1e-9),
        pattern: best.as_ref().map(|(pi, _)| patterns[*pi].map(|j| j.value())),
        taus: best.as_ref().map(|(_, c)| c.taus.clone()),
        frame_residual: best
            .as_ref()
            .map(|(_, c)| c.residual[..4].iter().fold(0.0f64, |m, v| m.max(v.abs()))),
        tangent_residual,
        patterns_tried: patterns.len(),
        feasible_candidates: feasible,
        variables: REDUCTION_VARIABLES,
        equations: REDUCTION_EQUATIONS,
    })
}

/// Default spec for [`link_reduction_experiment`].
pub fn default_reduction_spec(seed: u64) -> SearchSpec {
    SearchSpec {
        variable_count: REDUCTION_VARIABLES,
        bounds: vec![(0.0, TAU_MAX); REDUCTION_VARIABLES],
        penalty_weights: crate::optimize::PenaltyWeights::default(),
        restarts: 2,
        max_evals: 1500,
        seed,
        start: None,
        perturbation: 0.0,
        initial_step: 0.02,
        feasibility_tol: 1e-9,
        record_trace: false,
    }
}
