//! Penalized derivative-free searches over chain parameters.
//!
//! Both searches minimize `objective + penalty` with a bounded Nelder-Mead
//! simplex from several seeded starting points, then project the result
//! onto the equality constraints with Gauss-Newton before judging
//! feasibility. Restarts run in parallel and are merged in index order, so
//! results depend only on the spec.

pub mod closure;
pub mod five_link;
pub mod nelder_mead;
pub mod reduction;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::ClosureReport;
use crate::error::{GeometryError, Result};

pub use five_link::{five_link_decode, five_link_objective, five_link_search, octagon_embedding, FIVE_LINK_PATTERN};
pub use reduction::{link_reduction_experiment, ReductionReport};

/// Penalty added when a trial point cannot be assembled at all.
pub const FAILURE_PENALTY: f64 = 1e3;
/// Upper end of every link parameter range.
pub const TAU_MAX: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub closure: f64,
    pub angle: f64,
    pub feasibility: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        Self {
            closure: 1e4,
            angle: 1e4,
            feasibility: 1e4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub variable_count: usize,
    pub bounds: Vec<(f64, f64)>,
    pub penalty_weights: PenaltyWeights,
    pub restarts: usize,
    /// Simplex evaluations per restart.
    pub max_evals: usize,
    pub seed: u64,
    /// Common starting point; restarts sample the box uniformly without it.
    #[serde(default)]
    pub start: Option<Vec<f64>>,
    /// Length of the random displacement applied to `start` per restart.
    #[serde(default)]
    pub perturbation: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Residual bound for calling a projected point feasible.
    pub feasibility_tol: f64,
    #[serde(default)]
    pub record_trace: bool,
}

impl SearchSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GeometryError::InfeasibleInput(m));
        if self.bounds.is_empty() || self.bounds.len() != self.variable_count {
            return bad(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                self.variable_count
            ));
        }
        if let Some(i) = self
            .bounds
            .iter()
            .position(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi))
        {
            return bad(format!("bound {i} is empty or not finite"));
        }
        let w = self.penalty_weights;
        if !(w.closure > 0.0 && w.angle > 0.0 && w.feasibility > 0.0) {
            return bad("penalty weights must be positive".into());
        }
        if self.restarts == 0 {
            return bad("at least one restart is required".into());
        }
        if let Some(start) = &self.start {
            if start.len() != self.variable_count || !start.iter().all(|v| v.is_finite()) {
                return bad("start point has the wrong length or is not finite".into());
            }
        }
        if !(self.perturbation >= 0.0 && self.initial_step > 0.0 && self.feasibility_tol > 0.0) {
            return bad("perturbation, step and tolerance must be nonnegative/positive".into());
        }
        Ok(())
    }

    /// Starting point of restart `index`, clamped into the bounds.
    pub fn start_point(&self, index: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let mut x = match &self.start {
            Some(s) => {
                let dir: Vec<f64> = (0..s.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                s.iter()
                    .zip(&dir)
                    .map(|(v, d)| v + self.perturbation * d / norm)
                    .collect()
            }
            None => self
                .bounds
                .iter()
                .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
                .collect::<Vec<f64>>(),
        };
        for (v, &(lo, hi)) in x.iter_mut().zip(&self.bounds) {
            *v = v.clamp(lo, hi);
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_params: Vec<f64>,
    pub best_density: f64,
    /// Absent when the incumbent does not assemble.
    pub closure: Option<ClosureReport<f64>>,
    pub feasible: bool,
    /// Simplex evaluations over all restarts; projection steps are not
    /// counted.
    pub eval_count: usize,
    pub restart: usize,
    /// `(eval_count, best feasible density)` after each restart that
    /// improved the incumbent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<(usize, f64)>>,
}

/// `max(0, x - tol)^2`
pub(crate) fn excess_sq(x: f64, tol: f64) -> f64 {
    let e = (x - tol).max(0.0);
    e * e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SearchSpec {
        SearchSpec {
            variable_count: 2,
            bounds: vec![(0.0, 1.0), (-1.0, 1.0)],
            penalty_weights: PenaltyWeights::default(),
            restarts: 3,
            max_evals: 10,
            seed: 5,
            start: None,
            perturbation: 0.0,
            initial_step: 0.1,
            feasibility_tol: 1e-9,
            record_trace: false,
        }
    }

    #[test]
    fn validation() {
        assert!(spec().validate().is_ok());
        let mut s = spec();
        s.bounds.pop();
        assert!(s.validate().is_err());
        let mut s = spec();
        s.penalty_weights.angle = 0.0;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.bounds[0] = (1.0, 0.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn start_points_are_seeded_and_bounded() {
        let s = spec();
        assert_eq!(s.start_point(1), s.start_point(1));
        assert_ne!(s.start_point(0), s.start_point(1));
        for i in 0..20 {
            let x = s.start_point(i);
            assert!((0.0..=1.0).contains(&x[0]) && (-1.0..=1.0).contains(&x[1]));
        }
        let mut s = spec();
        s.start = Some(vec![0.5, 0.0]);
        s.perturbation = 1e-3;
        let x = s.start_point(2);
        let d = ((x[0] - 0.5).powi(2) + x[1].powi(2)).sqrt();
        assert!((d - 1e-3).abs() < 1e-15);
    }
}
