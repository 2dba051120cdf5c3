//! Fluxes `F` with `div F = ρ` built from extremals, and the duality
//!
//! ```text
//! sup_{‖Du‖_p ≤ 1} |∫u dρ| = min { ‖F‖_q : div F = ρ }.
//! ```
//!
//! For an extremal normalized by `∫u dρ = 1` with multiplier `c = ‖Du‖_p^p`,
//! the flux is `F = -(1/c)|Du|^{p-2}Du`; testing `-Δ_p u = cρ` against any
//! `φ` gives `-∫Dφ·F = ∫φ dρ`.

use serde::{Deserialize, Serialize};

use crate::extremal1d::{extremal_1d, hat_tests_at_atoms, hat_tests_uniform};
use crate::field::integrate;
use crate::measure::{Exponent, SignedMeasure};
use crate::piecewise::{signed_pow, PiecewiseConstant, PiecewiseLinear};
use crate::solver::{corner_gradients, corner_weight, splat, ExtremalResult, Grid, GridField, Splat};

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityCertificate {
    /// `‖F‖_q`.
    pub flux_norm: f64,
    /// `∫u dρ / ‖Du‖_p`.
    pub primal: f64,
    /// `flux_norm - primal`.
    pub gap: f64,
    /// `|∫y dρ|^{1-n/p}`.
    pub moment_factor: f64,
    /// `flux_norm / moment_factor`.
    pub cstar: f64,
    /// Weak defect of `div F = ρ` over the test family.
    pub divergence_residual: f64,
}

/// `-(1/c)|u'|^{p-2}u'` on the intervals of `u`.
pub fn flux_from_extremal_1d(u: &PiecewiseLinear, c: f64, exp: &Exponent) -> PiecewiseConstant {
    let p = exp.p();
    u.derivative().map(|s| -signed_pow(s, p - 1.0) / c)
}

/// `max_φ |∫φ'F dx + Σ wᵢφ(yᵢ)|`, the weak defect of `div F = ρ`; exact.
pub fn divergence_residual_1d(
    flux: &PiecewiseConstant,
    rho: &SignedMeasure,
    tests: &[PiecewiseLinear],
) -> f64 {
    tests
        .iter()
        .map(|phi| {
            let pairing: f64 = rho
                .atoms()
                .iter()
                .map(|a| a.weight * phi.eval(a.location[0]))
                .sum();
            (pairing + flux.inner(&phi.derivative())).abs()
        })
        .fold(0.0, f64::max)
}

fn moment_factor(rho: &SignedMeasure, exp: &Exponent) -> f64 {
    rho.first_moment().norm().powf(exp.holder())
}

/// Certificate for the closed-form extremal on the line.
pub fn duality_gap_1d(rho: &SignedMeasure, exp: &Exponent) -> Result<DualityCertificate, AnalysisError> {
    let v = extremal_1d(rho, exp)?;
    let u = v.scaled(1.0 / integrate(&v, rho)?);
    let p = exp.p();
    let c = u.gradient_energy(p);
    let flux = flux_from_extremal_1d(&u, c, exp);
    let flux_norm = flux.norm(exp.q());
    let primal = integrate(&u, rho)? / u.gradient_norm(p);
    let b = flux.breakpoints();
    let (lo, hi) = (b[0], b[b.len() - 1]);
    let width = (hi - lo) / 8.0;
    let mut tests = hat_tests_at_atoms(rho, width);
    tests.extend(hat_tests_uniform(lo - width, hi + width, 64));
    let mf = moment_factor(rho, exp);
    Ok(DualityCertificate {
        flux_norm,
        primal,
        gap: flux_norm - primal,
        moment_factor: mf,
        cstar: flux_norm / mf,
        divergence_residual: divergence_residual_1d(&flux, rho, &tests),
    })
}

/// A flux with one vector per cell corner, matching the corner gradients
/// of the grid energy.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFlux {
    pub grid: Grid,
    pub vectors: Vec<[f64; 3]>,
}

impl GridFlux {
    /// `(Σ (hⁿ/2ⁿ)|F|^q)^{1/q}`.
    pub fn norm(&self, q: f64) -> f64 {
        let w = corner_weight(&self.grid);
        let s: f64 = self
            .vectors
            .iter()
            .map(|f| (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).powf(0.5 * q))
            .sum();
        (w * s).powf(1.0 / q)
    }
}

/// `-(1/c)|∇_c u|^{p-2}∇_c u` at every cell corner.
pub fn flux_from_extremal_grid(u: &GridField, c: f64, exp: &Exponent) -> GridFlux {
    let e = 0.5 * (exp.p() - 2.0);
    let vectors = corner_gradients(u)
        .into_iter()
        .map(|g| {
            let r2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            let s = if r2 > 0.0 { -r2.powf(e) / c } else { 0.0 };
            [s * g[0], s * g[1], s * g[2]]
        })
        .collect();
    GridFlux {
        grid: *u.grid(),
        vectors,
    }
}

/// `max_j |Σ (hⁿ/2ⁿ) F·∇φ_j + ⟨m_h, φ_j⟩|` over the nodal hat basis.
pub fn divergence_residual_grid(flux: &GridFlux, splat: &Splat) -> f64 {
    let grid = &flux.grid;
    let dim = grid.dim();
    let corners = 1usize << dim;
    let w = corner_weight(grid);
    let inv_h = 1.0 / grid.spacing();
    let mut div = splat.dense(grid.node_count());
    let offsets = grid.corner_offsets();
    for cell in 0..grid.cell_count() {
        let base = grid.cell_base(cell);
        for c in 0..corners {
            let f = &flux.vectors[cell * corners + c];
            for (k, fk) in f.iter().enumerate().take(dim) {
                let bit = 1 << k;
                div[base + offsets[c | bit]] += w * fk * inv_h;
                div[base + offsets[c & !bit]] -= w * fk * inv_h;
            }
        }
    }
    div.into_iter().map(f64::abs).fold(0.0, f64::max)
}

/// Certificate for a grid extremal: `primal` uses the interpolated pairing
/// and the discrete energy, `flux_norm` the corner quadrature.
pub fn duality_gap_grid(
    result: &ExtremalResult,
    rho: &SignedMeasure,
    exp: &Exponent,
) -> Result<DualityCertificate, AnalysisError> {
    let u = &result.field;
    let flux = flux_from_extremal_grid(u, result.multiplier, exp);
    let flux_norm = flux.norm(exp.q());
    let primal = integrate(u, rho)? / result.energy.powf(1.0 / exp.p());
    let sp = splat(rho, u.grid())?;
    let mf = moment_factor(rho, exp);
    Ok(DualityCertificate {
        flux_norm,
        primal,
        gap: flux_norm - primal,
        moment_factor: mf,
        cstar: flux_norm / mf,
        divergence_residual: divergence_residual_grid(&flux, &sp),
    })
}
