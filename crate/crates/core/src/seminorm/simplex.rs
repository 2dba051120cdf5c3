//! Nelder–Mead minimization for the low-dimensional similarity chart.

pub(crate) struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Minimizes `f` from `x0` with an axis-aligned initial simplex of the given
/// edge lengths. Stops after `max_iter` iterations or once the spread of
/// simplex values falls below `tol`. Non-finite values count as `+∞`.
pub(crate) fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    max_iter: usize,
    tol: f64,
) -> SimplexOutcome {
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let dim = x0.len();
    if dim == 0 {
        return SimplexOutcome {
            x: vec![],
            value: eval(x0),
            iterations: 0,
        };
    }
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += steps[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    while iterations < max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        // stable: ties keep the earlier vertex first
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[dim] - vals[0];
        if spread.is_finite() && spread < tol {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for p in &pts[..dim] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[dim])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let xr = along(-alpha);
        let fr = eval(&xr);
        if fr < vals[0] {
            let xe = along(-gamma);
            let fe = eval(&xe);
            if fe < fr {
                pts[dim] = xe;
                vals[dim] = fe;
            } else {
                pts[dim] = xr;
                vals[dim] = fr;
            }
            continue;
        }
        if fr < vals[dim - 1] {
            pts[dim] = xr;
            vals[dim] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[dim] {
            let xc = along(-rho);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < vals[dim].min(fr) {
            pts[dim] = xc;
            vals[dim] = fc;
            continue;
        }
        let best = pts[0].clone();
        for i in 1..=dim {
            pts[i] = best
                .iter()
                .zip(&pts[i])
                .map(|(b, p)| b + sigma * (p - b))
                .collect();
            vals[i] = eval(&pts[i]);
        }
    }
    let best = (0..=dim)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap_or(0);
    SimplexOutcome {
        x: pts[best].clone(),
        value: vals[best],
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let out = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
            &[0.5, 0.5],
            500,
            1e-14,
        );
        assert!((out.x[0] - 1.0).abs() < 1e-5);
        assert!((out.x[1] + 0.5).abs() < 1e-5);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| (x[0] * 3.0).sin() + x[0] * x[0];
        let out = nelder_mead(f, &[2.0], &[0.1], 3, 0.0);
        assert!(out.value <= f(&[2.0]));
    }

    #[test]
    fn infeasible_points_are_avoided() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.1).powi(2) };
        let out = nelder_mead(f, &[1.0], &[-2.0], 200, 1e-16);
        assert!(out.x[0] >= 0.0 && (out.x[0] - 0.1).abs() < 1e-4);
    }
}
