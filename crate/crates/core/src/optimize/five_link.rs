//! Five-link closed chains: seven parameters, the two free tangent
//! components at the identity frame and five link parameters.
//!
//! A closed chain with five nondegenerate links normalizes to seven links
//! on the indices `0, 2, 4, 0, 2, 4, 0` with two zeros; the five nonzero
//! ones sit on [`FIVE_LINK_PATTERN`]. The octagon is the member with
//! `tau_3 = 0`.

use rayon::prelude::*;

use crate::chain::{assemble, chain_area, closure_report_assembled, ChainParams, ClosureReport, ANGLE_TOL};
use crate::domain::{hexagon_area, octagon_initial_state, octagon_tau};
use crate::hyperlink::HyperbolicIndex;
use crate::optimize::closure::{chain_from_vector, closure_mismatch, newton_project};
use crate::optimize::nelder_mead::minimize;
use crate::optimize::{excess_sq, PenaltyWeights, SearchResult, SearchSpec, FAILURE_PENALTY, TAU_MAX};

pub const FIVE_LINK_PATTERN: [HyperbolicIndex; 5] = [
    HyperbolicIndex::ZERO,
    HyperbolicIndex::TWO,
    HyperbolicIndex::FOUR,
    HyperbolicIndex::TWO,
    HyperbolicIndex::ZERO,
];

/// `(p0, p1)` bounds keep `(p0, p1, 1)` inside the star cone.
pub fn five_link_bounds() -> Vec<(f64, f64)> {
    let mut b = vec![(-0.57, 0.57), (-3.0, -0.34)];
    b.extend([(0.0, TAU_MAX); 5]);
    b
}

/// Identity frame, tangent class of `(p0, p1, 1)`, links on
/// [`FIVE_LINK_PATTERN`].
pub fn five_link_decode(params: &[f64]) -> ChainParams<f64> {
    assert_eq!(params.len(), 7, "five-link parameters have length 7");
    chain_from_vector(params, &FIVE_LINK_PATTERN)
}

/// Parameters of the octagon: its initial tangent, `tau_3 = 0` and the
/// octagon parameter elsewhere.
pub fn octagon_embedding() -> Vec<f64> {
    let x = octagon_initial_state::<f64>().tangent.rep();
    let tau = octagon_tau::<f64>();
    vec![x.a / x.c, x.b / x.c, tau, tau, tau, 0.0, tau]
}

/// Density, penalty and closure diagnostics of one parameter vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub density: f64,
    pub penalty: f64,
    pub closure: Option<ClosureReport<f64>>,
}

impl Evaluation {
    pub fn value(&self) -> f64 {
        self.density + self.penalty
    }

    pub fn feasible(&self) -> bool {
        self.penalty == 0.0 && self.closure.is_some()
    }
}

fn star_violation(p0: f64, p1: f64) -> f64 {
    let s3 = 3f64.sqrt();
    excess_sq(s3 * p0.abs(), 1.0) + excess_sq(3.0 * p1 + 1.0, 0.0)
}

/// Penalized density. The penalty is zero exactly when both closure
/// residuals are at most `tol`, the angle condition holds and the tangent
/// satisfies the star conditions.
pub fn evaluate(params: &[f64], weights: &PenaltyWeights, tol: f64) -> Evaluation {
    let feasibility = weights.feasibility * star_violation(params[0], params[1]);
    let chain = five_link_decode(params);
    let failed = Evaluation {
        density: 0.0,
        penalty: FAILURE_PENALTY + feasibility,
        closure: None,
    };
    let Ok(assembled) = assemble(&chain) else { return failed };
    let Ok(report) = closure_report_assembled(&assembled) else {
        return failed;
    };
    let density = 2.0 * assembled.area() / hexagon_area::<f64>();
    let closure = weights.closure * (excess_sq(report.frame_residual, tol) + excess_sq(report.tangent_residual, tol));
    let angle = weights.angle * excess_sq(-report.angle_margin, ANGLE_TOL);
    Evaluation {
        density,
        penalty: closure + angle + feasibility,
        closure: Some(report),
    }
}

/// `(density, penalty)` with default weights and feasibility tolerance
/// `1e-9`. Never fails: unassemblable inputs get [`FAILURE_PENALTY`].
pub fn five_link_objective(params: &[f64]) -> (f64, f64) {
    let e = evaluate(params, &PenaltyWeights::default(), 1e-9);
    (e.density, e.penalty)
}

/// Closure-projects `x`, keeping it inside `bounds`.
pub fn project_closed(x: &[f64], bounds: &[(f64, f64)]) -> Option<Vec<f64>> {
    let r = |v: &[f64]| closure_mismatch(&five_link_decode(v)).map(|m| m.to_vec());
    newton_project(r, x, bounds, 1e-13, 50)
}

#[derive(Debug, Clone)]
struct RestartOutcome {
    params: Vec<f64>,
    eval: Evaluation,
    evals: usize,
}

fn better(a: &Evaluation, b: &Evaluation) -> bool {
    match (a.feasible(), b.feasible()) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.density < b.density,
        (false, false) => a.value() < b.value(),
    }
}

fn run_restart(spec: &SearchSpec, index: usize) -> RestartOutcome {
    let tol = spec.feasibility_tol;
    let weights = spec.penalty_weights;
    let x0 = spec.start_point(index);
    let mut best = RestartOutcome {
        eval: evaluate(&x0, &weights, tol),
        params: x0.clone(),
        evals: 0,
    };
    if spec.max_evals == 0 {
        return best;
    }
    let mut x = x0;
    let mut step = spec.initial_step;
    let mut w = weights;
    // two rounds: the second restarts from the projected point with stiffer
    // penalties and a smaller simplex
    for _ in 0..2 {
        let f = |v: &[f64]| evaluate(v, &w, tol).value();
        let m = minimize(f, &x, &spec.bounds, step, spec.max_evals / 2, 1e-15, 1e-12);
        best.evals += m.evals;
        for candidate in [Some(m.x.clone()), project_closed(&m.x, &spec.bounds)]
            .into_iter()
            .flatten()
        {
            let e = evaluate(&candidate, &weights, tol);
            if better(&e, &best.eval) {
                best.eval = e;
                best.params = candidate;
            }
        }
        x = best.params.clone();
        step *= 0.1;
        w.closure *= 100.0;
        w.angle *= 100.0;
    }
    best
}

/// Multi-start penalized search over the five-link space.
///
/// Every restart runs the simplex, then projects its best point onto
/// closure; the incumbent is the feasible point of lowest density (ties go
/// to the lower restart index), or the lowest penalized value when no
/// restart is feasible.
pub fn five_link_search(spec: &SearchSpec) -> crate::Result<SearchResult> {
    spec.validate()?;
    if spec.variable_count != 7 {
        return Err(crate::GeometryError::InfeasibleInput(format!(
            "five-link search has 7 variables, spec has {}",
            spec.variable_count
        )));
    }
    let outcomes: Vec<RestartOutcome> = (0..spec.restarts)
        .into_par_iter()
        .map(|i| run_restart(spec, i))
        .collect();
    let mut best: Option<(usize, &RestartOutcome)> = None;
    let mut evals = 0usize;
    let mut trace = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        evals += o.evals;
        if best.is_none_or(|(_, b)| better(&o.eval, &b.eval)) {
            best = Some((i, o));
            if o.eval.feasible() {
                trace.push((evals, o.eval.density));
            }
        }
    }
    let (restart, best) = best.expect("at least one restart");
    Ok(SearchResult {
        best_params: best.params.clone(),
        best_density: best.eval.density,
        closure: best.eval.closure,
        feasible: best.eval.feasible(),
        eval_count: evals,
        restart,
        trace: spec.record_trace.then_some(trace),
    })
}

/// Default spec: the full box, uniform restarts.
pub fn default_spec(seed: u64, restarts: usize) -> SearchSpec {
    SearchSpec {
        variable_count: 7,
        bounds: five_link_bounds(),
        penalty_weights: PenaltyWeights::default(),
        restarts,
        max_evals: 4000,
        seed,
        start: None,
        perturbation: 0.0,
        initial_step: 0.05,
        feasibility_tol: 1e-9,
        record_trace: false,
    }
}

/// Area of the chain decoded from `params` (twice the chain area), or
/// `None` when it does not assemble.
pub fn decoded_area(params: &[f64]) -> Option<f64> {
    chain_area(&five_link_decode(params)).ok().map(|a| 2.0 * a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::octagon_density_exact;

    #[test]
    fn octagon_embedding_is_feasible() {
        let (d, p) = five_link_objective(&octagon_embedding());
        assert!((d - octagon_density_exact::<f64>()).abs() < 1e-12, "{d}");
        assert!(p < 1e-9, "{p}");
        assert_eq!(p, 0.0);
    }

    #[test]
    fn all_zero_is_heavily_penalized() {
        let mut x = octagon_embedding();
        x[2..].fill(0.0);
        let (_, p) = five_link_objective(&x);
        assert!(p > 1e2, "{p}");
    }

    #[test]
    fn infeasible_params_are_finite() {
        let x = [0.1, -0.9, 0.3, 0.7, 0.2, 0.5, 0.9];
        let (d, p) = five_link_objective(&x);
        assert!(d.is_finite() && p.is_finite() && p > 0.0);
        assert_eq!(five_link_objective(&x), five_link_objective(&x));
    }

    #[test]
    fn zero_budget_returns_start() {
        let mut spec = default_spec(0, 1);
        spec.start = Some(octagon_embedding());
        spec.max_evals = 0;
        let r = five_link_search(&spec).unwrap();
        assert_eq!(r.best_params, octagon_embedding());
        assert!(r.feasible);
        assert_eq!(r.eval_count, 0);
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let mut spec = default_spec(0, 1);
        spec.variable_count = 6;
        spec.bounds.pop();
        assert!(five_link_search(&spec).is_err());
    }
}
