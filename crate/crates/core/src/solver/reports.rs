//! Residual and property reports on grid extremals.

use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::measure::{Exponent, SignedMeasure};

use super::energy::energy_gradient_of;
use super::grid::{GridField, Splat};
use super::residual_from_gradient;

/// `max_j |Σ (hⁿ/2ⁿ)|∇u|^{p-2}∇u·∇φ_j - c⟨m_h, φ_j⟩| / |c|` over the nodal
/// hat basis `φ_j`.
pub fn el_residual(u: &GridField, splat: &Splat, c: f64, exp: &Exponent) -> f64 {
    let grad = energy_gradient_of(u.grid(), u.values(), exp.p());
    let m = splat.dense(u.grid().node_count());
    residual_from_gradient(&grad, &m, c, exp.p())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub global_min: f64,
    pub global_max: f64,
    pub support_min: f64,
    pub support_max: f64,
    /// How far the global extremes overshoot the support extremes (≥ 0).
    pub slack: f64,
    /// `slack / (global_max - global_min)`, zero for constant fields.
    pub relative_slack: f64,
    pub pass: bool,
}

/// Compares the global extremes of `u` with its extremes on the nodes
/// carrying splat weight. Passes when the overshoot is at most
/// `tol · (max - min)`.
pub fn check_bounds(u: &GridField, splat: &Splat, tol: f64) -> BoundsReport {
    let (global_min, global_max) = (u.min(), u.max());
    let support = splat.support();
    let on_support = support.iter().map(|&i| u.values()[i]);
    let support_min = on_support.clone().fold(f64::INFINITY, f64::min);
    let support_max = on_support.fold(f64::NEG_INFINITY, f64::max);
    let slack = (support_min - global_min).max(global_max - support_max).max(0.0);
    let range = global_max - global_min;
    let relative_slack = if range > 0.0 { slack / range } else { 0.0 };
    BoundsReport {
        global_min,
        global_max,
        support_min,
        support_max,
        slack,
        relative_slack,
        pass: slack <= tol * range,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarfieldReport {
    pub boundary_mean: f64,
    /// `max - min` of `u` over the boundary nodes.
    pub spread: f64,
    /// `spread / (max u - min u)`, zero for constant fields.
    pub relative_spread: f64,
    /// `(u(x₀) + u(y₀))/2` when `μ` is a two-atom measure.
    pub midpoint_value: Option<f64>,
    /// `|boundary_mean - midpoint_value| / (max u - min u)`.
    pub relative_midpoint_deviation: Option<f64>,
}

/// Flatness of `u` on the boundary shell of its box.
pub fn farfield_check(u: &GridField, mu: &SignedMeasure) -> FarfieldReport {
    let boundary = u.grid().boundary_nodes();
    let vals: Vec<f64> = boundary.iter().map(|&i| u.values()[i]).collect();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let boundary_mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let range = u.range();
    let scale = if range > 0.0 { range } else { 1.0 };
    let midpoint_value = match mu.atoms() {
        [a, b] => match (u.value(&a.location), u.value(&b.location)) {
            (Ok(ua), Ok(ub)) => Some(0.5 * (ua + ub)),
            _ => None,
        },
        _ => None,
    };
    FarfieldReport {
        boundary_mean,
        spread: hi - lo,
        relative_spread: (hi - lo) / scale,
        midpoint_value,
        relative_midpoint_deviation: midpoint_value.map(|m| (boundary_mean - m).abs() / scale),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{splat, Grid};

    fn setup() -> (Grid, SignedMeasure, Splat) {
        let g = Grid::centered(2, 3.0, 13).unwrap();
        let mu = SignedMeasure::dipole(&[1.0, 0.0], &[-1.0, 0.0]).unwrap();
        let s = splat(&mu, &g).unwrap();
        (g, mu, s)
    }

    #[test]
    fn constant_field_reports() {
        let (g, mu, s) = setup();
        let u = GridField::from_fn(g, |_| 4.0);
        let b = check_bounds(&u, &s, 1e-3);
        assert!(b.pass);
        assert_eq!(b.slack, 0.0);
        let f = farfield_check(&u, &mu);
        assert_eq!(f.spread, 0.0);
        assert_eq!(f.relative_midpoint_deviation, Some(0.0));
        let e = Exponent::new(4.0, 2).unwrap();
        assert_eq!(el_residual(&u, &s, 2.0, &e), 1.0);
    }

    #[test]
    fn interior_spike_fails_bounds() {
        let (g, _, s) = setup();
        let u = GridField::from_fn(g, |x| {
            let bump = if x[1].abs() < 1e-9 && (x[0] - 0.0).abs() < 1e-9 { 5.0 } else { 0.0 };
            x[0] * 0.1 + bump
        });
        assert!(!check_bounds(&u, &s, 1e-3).pass);
    }

    #[test]
    fn residual_ignores_constants() {
        let (g, _, s) = setup();
        let e = Exponent::new(3.0, 2).unwrap();
        let u = GridField::from_fn(g, |x| (x[0] * 0.7).tanh() + 0.1 * x[1] * x[1]);
        let v = GridField::from_fn(g, |x| (x[0] * 0.7).tanh() + 0.1 * x[1] * x[1] + 9.0);
        let a = el_residual(&u, &s, 1.3, &e);
        let b = el_residual(&v, &s, 1.3, &e);
        assert!((a - b).abs() < 1e-12 * a);
    }
}
