//! Box-constrained Nelder-Mead with dimension-adaptive coefficients.

/// Outcome of one simplex run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Coefficients {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coefficients {
    fn adaptive(n: usize) -> Self {
        let n = n.max(2) as f64;
        Self {
            reflect: 1.0,
            expand: 1.0 + 2.0 / n,
            contract: 0.75 - 1.0 / (2.0 * n),
            shrink: 1.0 - 1.0 / n,
        }
    }
}

fn clamp_into(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

/// Minimizes `f` from `x0` with at most `max_evals` evaluations.
///
/// Every trial point is clamped into `bounds`. The initial simplex steps
/// each coordinate by `step` (towards the interior when at a bound). Stops
/// when both the value spread and the simplex diameter fall below `ftol`
/// and `xtol`. NaN values are treated as `+inf`.
pub fn minimize<F>(
    f: F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    step: f64,
    max_evals: usize,
    ftol: f64,
    xtol: f64,
) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut start = x0.to_vec();
    clamp_into(&mut start, bounds);
    if max_evals == 0 {
        return Minimum {
            value: f64::NAN,
            x: start,
            evals: 0,
        };
    }
    let c = Coefficients::adaptive(n);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(&start, &mut evals);
    simplex.push((start.clone(), v0));
    for i in 0..n {
        if evals >= max_evals {
            break;
        }
        let mut x = start.clone();
        let (lo, hi) = bounds[i];
        x[i] = if x[i] + step <= hi {
            x[i] + step
        } else {
            (x[i] - step).max(lo)
        };
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    if simplex.len() < n + 1 {
        let best = simplex
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("simplex has a vertex");
        return Minimum {
            x: best.0,
            value: best.1,
            evals,
        };
    }

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0, f64::max);
        if (spread.is_finite() && spread <= ftol) && diameter <= xtol {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect();
            clamp_into(&mut x, bounds);
            x
        };

        let xr = along(c.reflect);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(c.reflect * c.expand);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let x = along(c.reflect * c.contract);
            let v = eval(&x, &mut evals);
            (x, v)
        } else {
            let x = along(-c.contract);
            let v = eval(&x, &mut evals);
            (x, v)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if evals >= max_evals {
                break;
            }
            let mut x: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + c.shrink * (v - b))
                .collect();
            clamp_into(&mut x, bounds);
            let v = eval(&x, &mut evals);
            *vertex = (x, v);
        }
    }

    let best = simplex
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("simplex has a vertex");
    Minimum {
        x: best.0,
        value: best.1,
        evals,
    }
}
