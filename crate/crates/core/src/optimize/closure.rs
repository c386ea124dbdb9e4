//! Newton projection onto state-matching constraints, and random closed
//! chains built with it.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{assemble, sixth_turn, ChainParams, LinkSpec};
use crate::hyperlink::{HyperbolicIndex, LinkState};
use crate::sl2::{FrameMatrix, ProjectiveTangent, TangentElement};

/// Frame entries of `base^-1 actual - base^-1 target` followed by the
/// difference of the unit tangent representatives pulled back by `base`.
pub fn state_mismatch(base: &FrameMatrix<f64>, target: &LinkState<f64>, actual: &LinkState<f64>) -> [f64; 7] {
    let inv = base.inverse();
    let fa = inv.compose(&actual.frame).entries();
    let ft = inv.compose(&target.frame).entries();
    let ta = actual.tangent.transformed(&inv).rep().components();
    let tt = target.tangent.transformed(&inv).rep().components();
    [
        fa[0] - ft[0],
        fa[1] - ft[1],
        fa[2] - ft[2],
        fa[3] - ft[3],
        ta[0] - tt[0],
        ta[1] - tt[1],
        ta[2] - tt[2],
    ]
}

/// Mismatch between the end of `chain` and its closed target
/// `(phi0 rho, X0)`.
pub fn closure_mismatch(chain: &ChainParams<f64>) -> Option<[f64; 7]> {
    let end = assemble(chain).ok()?.final_state();
    let target = LinkState::new(chain.initial.frame.compose(&sixth_turn()), chain.initial.tangent);
    Some(state_mismatch(&chain.initial.frame, &target, &end))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Gauss-Newton with minimum-norm steps for `r(x) = 0` inside `bounds`.
///
/// The Jacobian is taken by central differences (one-sided at a bound).
/// Singular values below `min(10 |r|, 1e-2)` relative to the largest are
/// dropped: mismatch components that depend on the others only to first
/// order (det = 1, unit tangent) contribute singular values of that size.
/// Variables sitting on a bound whose step would push them outward are
/// frozen for that step; trial points are clamped into the box. Returns the
/// final point when `max |r| <= tol`.
pub fn newton_project<F>(r: F, x0: &[f64], bounds: &[(f64, f64)], tol: f64, max_iter: usize) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = x0.len();
    let mut x: Vec<f64> = x0.iter().zip(bounds).map(|(v, &(lo, hi))| v.clamp(lo, hi)).collect();
    let mut rx = r(&x)?;
    let mut norm = max_abs(&rx);
    for _ in 0..max_iter {
        if norm <= tol {
            return Some(x);
        }
        let m = rx.len();
        let mut jac = DMatrix::<f64>::zeros(m, n);
        for i in 0..n {
            let h = 1e-7 * (1.0 + x[i].abs());
            let (lo, hi) = bounds[i];
            let (a, b) = ((x[i] - h).max(lo), (x[i] + h).min(hi));
            let mut xa = x.clone();
            let mut xb = x.clone();
            xa[i] = a;
            xb[i] = b;
            if b <= a {
                continue;
            }
            if let (Some(ra), Some(rb)) = (r(&xa), r(&xb)) {
                for k in 0..m {
                    let d = (rb[k] - ra[k]) / (b - a);
                    jac[(k, i)] = if d.is_finite() { d } else { 0.0 };
                }
            }
        }
        if !rx.iter().all(|v| v.is_finite()) {
            return None;
        }
        let rhs = DVector::from_column_slice(&rx);
        let mut free = vec![true; n];
        let mut step = DVector::zeros(n);
        for _ in 0..=n {
            let mut j = jac.clone();
            for i in (0..n).filter(|&i| !free[i]) {
                j.column_mut(i).fill(0.0);
            }
            let svd = j.svd(true, true);
            let cutoff = svd.singular_values.max() * (10.0 * norm).clamp(1e-9, 1e-2);
            step = svd.solve(&rhs, cutoff).ok()?;
            let mut changed = false;
            for i in 0..n {
                let (lo, hi) = bounds[i];
                let outward = (x[i] <= lo && step[i] > 0.0) || (x[i] >= hi && step[i] < 0.0);
                if free[i] && outward {
                    free[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = (0..n)
                .map(|i| {
                    let v = if free[i] { x[i] - t * step[i] } else { x[i] };
                    v.clamp(bounds[i].0, bounds[i].1)
                })
                .collect();
            if let Some(rt) = r(&trial) {
                let nt = max_abs(&rt);
                if nt < norm {
                    x = trial;
                    rx = rt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (norm <= tol).then_some(x)
}

/// Unit tangent with components proportional to `(p0, p1, 1)`.
pub fn tangent_from_pair(p0: f64, p1: f64) -> ProjectiveTangent<f64> {
    ProjectiveTangent::new(TangentElement::new(p0, p1, 1.0)).expect("c = 1 is nonzero")
}

/// Chain with identity frame, tangent `(p0, p1, 1)` and the given links.
pub fn chain_from_vector(x: &[f64], pattern: &[HyperbolicIndex]) -> ChainParams<f64> {
    let initial = LinkState::new(FrameMatrix::identity(), tangent_from_pair(x[0], x[1]));
    let links = pattern
        .iter()
        .zip(&x[2..])
        .map(|(&j, &tau)| LinkSpec::new(tau, j))
        .collect();
    ChainParams::new(initial, links)
}

fn octagon_vector(links: usize) -> Vec<f64> {
    let x = crate::domain::octagon_initial_state::<f64>().tangent.rep();
    let tau = crate::domain::octagon_tau::<f64>();
    let mut v = vec![x.a / x.c, x.b / x.c];
    // four octagon links then zero links, all but the last
    v.extend((0..links).map(|i| if i < 3 || i + 1 == links { tau } else { 0.0 }));
    v
}

fn tangent_bounds() -> [(f64, f64); 2] {
    [(-0.5, 0.5), (-3.0, -0.34)]
}

/// Closed chains on the repeating index pattern `0, 2, 4, 0, ...` with
/// `links` links, 4 or 7.
///
/// Four-link chains project randomly perturbed octagon parameters (of size
/// up to `spread`) back onto closure. Seven-link chains start from the
/// octagon padded by three zero links and raise those three parameters in
/// steps to random targets in `[0.02, spread]`, re-solving the others at
/// each step. Draws that fail to converge are skipped, so fewer than
/// `count` chains may be returned.
pub fn random_closed_chains(links: usize, count: usize, spread: f64, seed: u64) -> Vec<ChainParams<f64>> {
    assert!(
        links == 4 || links == 7,
        "closed chains on this pattern have 4 or 7 links"
    );
    let pattern: Vec<HyperbolicIndex> = (0..links).map(|i| HyperbolicIndex::ALL[i % 3]).collect();
    let residual = |v: &[f64]| closure_mismatch(&chain_from_vector(v, &pattern)).map(|r| r.to_vec());
    let mut bounds = tangent_bounds().to_vec();
    bounds.extend(std::iter::repeat_n((0.0, 1.0 - 1e-6), links));
    let start = octagon_vector(links);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count * 20 {
        if out.len() == count {
            break;
        }
        let solution = if links == 4 {
            let x: Vec<f64> = start.iter().map(|v| v + spread * rng.gen_range(-0.1..0.1)).collect();
            newton_project(residual, &x, &bounds, 1e-13, 60)
        } else {
            let targets: Vec<f64> = (0..3).map(|_| rng.gen_range(0.02..spread.max(0.03))).collect();
            let mut x = Some(start.clone());
            for step in 1..=5 {
                let Some(cur) = x else { break };
                let mut b = bounds.clone();
                let mut trial = cur.clone();
                for (k, &target) in targets.iter().enumerate() {
                    let v = target * step as f64 / 5.0;
                    b[5 + k] = (v, v);
                    trial[5 + k] = v;
                }
                x = newton_project(residual, &trial, &b, 1e-13, 60);
            }
            x
        };
        if let Some(sol) = solution {
            let chain = chain_from_vector(&sol, &pattern);
            if chain.links.iter().all(|l| l.tau > 1e-4) {
                out.push(chain);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{closure_report, link_length, CLOSURE_TOL};

    #[test]
    fn newton_solves_a_circle_constraint() {
        let r = |x: &[f64]| Some(vec![x[0] * x[0] + x[1] * x[1] - 1.0]);
        let sol = newton_project(r, &[2.0, 1.0], &[(-5.0, 5.0); 2], 1e-14, 50).unwrap();
        assert!((sol[0].hypot(sol[1]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn octagon_mismatch_vanishes() {
        let c = crate::domain::octagon_chain::<f64>();
        assert!(max_abs(&closure_mismatch(&c).unwrap()) < 1e-12);
    }

    #[test]
    fn random_four_and_seven_link_chains_close() {
        for links in [4, 7] {
            let chains = random_closed_chains(links, 3, 0.3, 7);
            assert!(!chains.is_empty(), "no {links}-link chains");
            for c in &chains {
                let r = closure_report(c).unwrap();
                assert!(r.is_closed(1e-9), "{r:?}");
                let n = link_length(c, CLOSURE_TOL).unwrap();
                assert_eq!((n - 1) % 3, 0);
            }
        }
    }
}
