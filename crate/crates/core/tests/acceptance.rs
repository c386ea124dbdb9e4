//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the table is always printed. The
//! process fails when a criterion outside `EXPECTED_FAILURES` fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use hexameral::chain::{assemble, closure_report, link_length, ChainParams, CLOSURE_TOL};
use hexameral::domain::{octagon_chain, octagon_initial_state, smoothed_octagon};
use hexameral::hyperlink::{frame_at, link_area, propagate, sample_link_curves, HyperbolicIndex, SquareRep};
use hexameral::multicurve::{circle_multicurve, rank_classify, CurveSample, RankLabel};
use hexameral::optimize::closure::random_closed_chains;
use hexameral::optimize::five_link::default_spec;
use hexameral::optimize::reduction::default_reduction_spec;
use hexameral::optimize::{five_link_search, link_reduction_experiment, octagon_embedding};
use hexameral::sl2::{FrameMatrix, PlaneVector, TangentElement};
use hexameral::variational::{
    area_functional, chain_path, curvature_lemma_value, euler_lagrange_residual, link_path, rotation_path,
    second_variation_circle, uniform_grid, SampledFunction,
};
use hexameral::{GeometryError, HexameralDomain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that fail for reasons recorded in the decisions ledger.
const EXPECTED_FAILURES: &[usize] = &[14];

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, Duration) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed())
}

fn octagon_density_oracle() -> f64 {
    (8.0 - 32f64.sqrt() - 2f64.ln()) / (8f64.sqrt() - 1.0)
}

fn c1() -> Outcome {
    let (d, elapsed) = timed(|| smoothed_octagon::<f64>().density());
    let err = (d - octagon_density_oracle()).abs();
    outcome(
        err <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("density {d:.15} |err| {err:.1e} in {elapsed:.2?}"),
    )
}

fn c2() -> Outcome {
    let s2 = 2f64.sqrt();
    let expected = 3f64.sqrt() * (8.0 - 8.0 * s2 + s2 * 2f64.ln()) / (4.0 * (-4.0 + s2));
    let got = link_area(&SquareRep::<f64>::octagon(HyperbolicIndex::ZERO));
    let err = (got - expected).abs();
    outcome(err <= 1e-12, format!("link_area {got:.15} |err| {err:.1e}"))
}

/// Square-coordinate curves `sigma_{j+2} = (a, a t)`, `sigma_{j+4} = (a s, a)`
/// with `s = (1 - k)/t`, `sigma_j = -sigma_{j+2} - sigma_{j+4}`; the fan
/// area from the origin over `[t0, t1]` summed over the three curves.
fn shoelace_link_area(a: f64, k: f64, t0: f64, t1: f64, n: usize) -> f64 {
    let curves = |t: f64| {
        let p2 = (a, a * t);
        let p4 = (a * (1.0 - k) / t, a);
        [(-p2.0 - p4.0, -p2.1 - p4.1), p2, p4]
    };
    let mut total = 0.0;
    let mut prev = curves(t0);
    for i in 1..n {
        let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
        let cur = curves(t);
        for m in 0..3 {
            total += 0.5 * (prev[m].0 * cur[m].1 - prev[m].1 * cur[m].0);
        }
        prev = cur;
    }
    total
}

fn c3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ((worst, count), elapsed) = timed(|| {
        let mut worst = 0.0f64;
        let mut count = 0;
        while count < 100 {
            let k: f64 = rng.gen_range(0.05..0.95);
            let a = (3f64.sqrt() / (2.0 * k)).sqrt();
            let t0 = rng.gen_range(-0.98..(k - 1.0 - 0.02));
            let tau = rng.gen_range(0.0..1.0);
            let j = HyperbolicIndex::ALL[count % 3];
            let Ok(rep) = SquareRep::new(a, t0, tau, j) else {
                continue;
            };
            let quad = shoelace_link_area(a, k, t0, rep.t_end(), 10_000);
            worst = worst.max((link_area(&rep) - quad).abs());
            count += 1;
        }
        (worst, count)
    });
    outcome(
        worst <= 1e-8 && elapsed < Duration::from_secs(10),
        format!("{count} reps, max |closed - shoelace| {worst:.1e} in {elapsed:.2?}"),
    )
}

fn c4() -> Outcome {
    let chain = octagon_chain::<f64>();
    let r = closure_report(&chain).expect("octagon assembles");
    let closed = r.frame_residual < 1e-9 && r.tangent_residual < 1e-9;
    let mut min_perturbed = f64::INFINITY;
    for i in 0..chain.links.len() {
        let mut c = chain.clone();
        c.links[i].tau += 1e-2;
        let p = closure_report(&c).map(|r| r.frame_residual).unwrap_or(f64::INFINITY);
        min_perturbed = min_perturbed.min(p);
    }
    outcome(
        closed && min_perturbed > 1e-3,
        format!(
            "frame {:.1e} tangent {:.1e}; min perturbed frame residual {min_perturbed:.2e}",
            r.frame_residual, r.tangent_residual
        ),
    )
}

fn c5() -> Outcome {
    let mut chains = random_closed_chains(4, 10, 0.3, 11);
    chains.extend(random_closed_chains(7, 10, 0.3, 12));
    let mut checked = 0;
    let mut ok = true;
    let mut lengths = std::collections::BTreeSet::new();
    for c in &chains {
        let Ok(r) = closure_report(c) else { continue };
        if !r.is_closed(1e-9) {
            continue;
        }
        checked += 1;
        match link_length(c, CLOSURE_TOL) {
            Ok(n) => {
                ok &= (n - 1) % 3 == 0;
                lengths.insert(n);
            }
            Err(_) => ok = false,
        }
    }
    let oct = link_length(&octagon_chain::<f64>(), CLOSURE_TOL).ok();
    outcome(
        ok && checked >= 10 && oct == Some(4),
        format!("{checked} closed chains, lengths {lengths:?}; octagon {oct:?}"),
    )
}

fn ranks_of(chain: &ChainParams<f64>, samples: usize) -> Vec<Result<u8, GeometryError>> {
    assemble(chain)
        .expect("chain assembles")
        .links
        .iter()
        .filter_map(|l| l.geometry.filter(|g| !g.rep.is_degenerate()))
        .map(|g| rank_classify(&sample_link_curves(&g, samples)?).map(|r| r.value()))
        .collect()
}

fn c6() -> Outcome {
    let oct = ranks_of(&octagon_chain(), 32);
    let oct_ok = oct.len() == 4 && oct.iter().all(|r| r == &Ok(1));
    let circle = rank_classify(&circle_multicurve(0.0, PI / 3.0, 32)).map(|r| r.value());
    let line = |m: usize| -> Vec<CurveSample<f64>> {
        let v = PlaneVector::new(1.0, m as f64);
        (0..16)
            .map(|i| {
                let t = i as f64 / 15.0;
                CurveSample::new(t, v * t, v, Some(PlaneVector::zero()))
            })
            .collect()
    };
    let lines: [Vec<CurveSample<f64>>; 6] = std::array::from_fn(line);
    let zero_rejected = matches!(rank_classify(&lines), Err(GeometryError::RankZero))
        && matches!(RankLabel::new(0), Err(GeometryError::RankZero));
    outcome(
        oct_ok && circle == Ok(3) && zero_rejected,
        format!("octagon {oct:?}, circle {circle:?}, rank 0 rejected {zero_rejected}"),
    )
}

fn c7() -> Outcome {
    let d = smoothed_octagon::<f64>();
    let states = d.sample_states(251).expect("octagon samples");
    let mut ok = true;
    let mut min_det = f64::INFINITY;
    for s in &states {
        let [a, b, c] = s.pulled_back_tangent().components();
        ok &= 3f64.sqrt() * a.abs() < c && 3.0 * b + c < 0.0;
        ok &= s.satisfies_star();
        min_det = min_det.min(-a * a - b * c);
    }
    outcome(
        ok && min_det > 0.0 && states.len() >= 1000,
        format!("{} samples, min -a^2-bc {min_det:.4}", states.len()),
    )
}

fn c8() -> Outcome {
    let circle = PI / 12f64.sqrt();
    let reference = hexameral::domain::circle_reference::<f64>(600).expect("circle").density;
    let gap = circle - smoothed_octagon::<f64>().density();
    outcome(
        gap > 4e-3 && (reference - circle).abs() < 1e-15,
        format!("circle {circle:.12} gap {gap:.6}"),
    )
}

fn c9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let mut min_value = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..10_000 {
        let c: f64 = rng.gen_range(0.2..3.0);
        let a = rng.gen_range(-0.999..0.999) * c / 3f64.sqrt();
        let b = -c / 3.0 - rng.gen_range(1e-3..3.0);
        match curvature_lemma_value(&TangentElement::new(a, b, c)) {
            Ok(l) => {
                worst = worst.max(l.relative_gap());
                min_value = min_value.min(l.closed_form);
            }
            Err(_) => failures += 1,
        }
    }
    outcome(
        failures == 0 && worst <= 1e-9 && min_value > 0.0,
        format!("max relative gap {worst:.1e}, min value {min_value:.2e}, errors {failures}"),
    )
}

fn c10() -> Outcome {
    let grid = uniform_grid(0.0, 2.0 * PI, 1024);
    let w = SampledFunction::from_fn(&grid, f64::sin, f64::cos);
    let u: Vec<f64> = grid.iter().map(|t| t.cos()).collect();
    let neg: Vec<f64> = u.iter().map(|v| -v).collect();
    let plus = second_variation_circle(&u, &w, &grid).expect("grid is valid");
    let minus = second_variation_circle(&neg, &w, &grid).expect("grid is valid");
    let err = (plus - 4.0 * PI).abs().max((minus + 4.0 * PI).abs());
    outcome(err <= 1e-6, format!("+{plus:.10} / {minus:.10}, |err| {err:.1e}"))
}

fn c11() -> Outcome {
    let mut rotation = 0.0f64;
    for (t0, t1) in [(0.0, PI / 3.0), (-1.0, 2.0), (0.3, 0.4)] {
        rotation = rotation.max(euler_lagrange_residual(&rotation_path(t0, t1, 256).expect("path")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut hyperbolic = f64::INFINITY;
    let mut paths = 0;
    let oct = assemble(&octagon_chain::<f64>()).expect("octagon");
    let mut placed: Vec<_> = oct.links.iter().filter_map(|l| l.geometry).collect();
    while placed.len() < 24 {
        let k: f64 = rng.gen_range(0.1..0.9);
        let a = (3f64.sqrt() / (2.0 * k)).sqrt();
        let t0 = rng.gen_range(-0.95..(k - 1.0 - 0.05));
        let Ok(rep) = SquareRep::new(a, t0, 0.0, HyperbolicIndex::ZERO) else {
            continue;
        };
        let start = frame_at(&rep, t0).expect("t0 in range");
        if let Ok(link) = propagate(
            &start,
            rng.gen_range(0.05..0.95),
            HyperbolicIndex::ALL[placed.len() % 3],
        ) {
            placed.extend(link.geometry);
        }
    }
    for g in &placed {
        hyperbolic = hyperbolic.min(euler_lagrange_residual(&link_path(g, 256).expect("link path")));
        paths += 1;
    }
    outcome(
        rotation < 1e-10 && hyperbolic > 1e-2,
        format!("rotation max {rotation:.1e}; {paths} link paths min {hyperbolic:.3e}"),
    )
}

fn c12() -> Outcome {
    let d = smoothed_octagon::<f64>();
    let target = d.area();
    let assembled = d.assembled();
    let err = |n: usize| (area_functional(&chain_path(&assembled, n).expect("path")) - target).abs();
    let (e64, e128, e256) = (err(64), err(128), err(256));
    let order = (e128 / e256).log2();
    outcome(
        e256 <= 1e-6 && e128 / e256 >= 2.0 && order >= 1.9,
        format!("err 64/128/256 {e64:.1e}/{e128:.1e}/{e256:.1e}, observed order {order:.2}"),
    )
}

fn c13() -> Outcome {
    let mut spec = default_spec(42, 20);
    spec.start = Some(octagon_embedding());
    spec.perturbation = 1e-3;
    spec.initial_step = 1e-2;
    let (result, elapsed) = timed(|| five_link_search(&spec));
    let Ok(r) = result else {
        return outcome(false, "search rejected its spec".into());
    };
    let floor = 0.9024141 - 1e-9;
    let ok = !r.feasible || r.best_density >= floor;
    outcome(
        ok && elapsed < Duration::from_secs(300),
        format!(
            "best feasible {} (feasible {}), floor {floor}, {} evals in {elapsed:.2?}",
            r.best_density, r.feasible, r.eval_count
        ),
    )
}

fn c14() -> Outcome {
    let segment = ChainParams::from_pairs(
        octagon_initial_state(),
        &[(0.2, 0), (0.2, 2), (0.2, 4), (0.0, 2), (0.2, 0), (0.15, 2)],
    )
    .expect("valid indices");
    let r = match link_reduction_experiment(&segment, &default_reduction_spec(0)) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("experiment failed: {e}")),
    };
    let Some(five) = r.five_link_area else {
        return outcome(
            false,
            format!("no five-link chain found; six-link area {}", r.six_link_area),
        );
    };
    let six = r.six_link_area;
    outcome(
        (five - six).abs() <= 1e-8,
        format!(
            "six-link {six:.10}, five-link {five:.10} (diff {:.2e}) on pattern {:?}",
            five - six,
            r.pattern.unwrap_or_default()
        ),
    )
}

fn random_sl2(rng: &mut ChaCha8Rng) -> FrameMatrix<f64> {
    let a = rng.gen_range(-0.7f64..0.7).exp();
    let (b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    FrameMatrix::new(a, b, c, (1.0 + b * c) / a).expect("det is one")
}

struct Invariants {
    density: f64,
    areas: Vec<f64>,
    ranks: Vec<Result<u8, GeometryError>>,
    residuals: (f64, f64),
}

fn invariants(chain: &ChainParams<f64>) -> Invariants {
    let d = HexameralDomain::from_chain(chain, 1e-9).expect("closed");
    let r = closure_report(chain).expect("assembles");
    Invariants {
        density: d.density(),
        areas: assemble(chain)
            .expect("assembles")
            .links
            .iter()
            .map(|l| l.area())
            .collect(),
        ranks: ranks_of(chain, 16),
        residuals: (r.frame_residual, r.tangent_residual),
    }
}

fn c15() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut bases = vec![octagon_chain::<f64>()];
    bases.extend(random_closed_chains(7, 1, 0.3, 15));
    let mut worst = 0.0f64;
    let mut ranks_ok = true;
    for base in &bases {
        let reference = invariants(base);
        for _ in 0..100 {
            let moved = invariants(&base.transformed(&random_sl2(&mut rng)));
            worst = worst.max((moved.density - reference.density).abs());
            for (x, y) in moved.areas.iter().zip(&reference.areas) {
                worst = worst.max((x - y).abs());
            }
            worst = worst.max((moved.residuals.0 - reference.residuals.0).abs());
            worst = worst.max((moved.residuals.1 - reference.residuals.1).abs());
            ranks_ok &= moved.ranks == reference.ranks && moved.areas.len() == reference.areas.len();
        }
    }
    outcome(
        worst <= 1e-9 && ranks_ok,
        format!(
            "{} chains x 100 transforms, max change {worst:.1e}, ranks equal {ranks_ok}",
            bases.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 15] = [
        ("octagon density", c1),
        ("octagon link area", c2),
        ("closed form vs shoelace quadrature", c3),
        ("closure and perturbation", c4),
        ("link-length congruence", c5),
        ("rank classification", c6),
        ("star conditions along the octagon", c7),
        ("circle comparison", c8),
        ("curvature lemma", c9),
        ("second variation witnesses", c10),
        ("Euler-Lagrange residuals", c11),
        ("area functional consistency", c12),
        ("five-link local optimality probe", c13),
        ("link reduction, padded five-link input", c14),
        ("SL2 invariance", c15),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && EXPECTED_FAILURES.contains(&n) {
            " [expected]"
        } else {
            ""
        };
        println!("{status} {n:>2} {name}: {}{note}", o.detail);
        if !o.pass && !EXPECTED_FAILURES.contains(&n) {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
