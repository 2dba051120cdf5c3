//! Quantitative stability of the generalized Morrey inequality.
//!
//! With `r = p` for `p > 2` and `r = p/(p-1)` for `1 < p ≤ 2`,
//!
//! ```text
//! (C/2)^r ‖Du - Dv‖_p^r + [v]_ρ^r ≤ C^r ‖Dv‖_p^r
//! ```
//!
//! where `u` is the extremal for `μ = S#ρ`, `S` attains `[v]_ρ`, and `u` is
//! scaled so that `∫u dμ = ∫v dμ`.

use serde::{Deserialize, Serialize};

use crate::extremal1d::extremal_1d;
use crate::field::integrate;
use crate::measure::{Exponent, SignedMeasure};
use crate::piecewise::PiecewiseLinear;
use crate::seminorm::{seminorm, SearchConfig, SeminormResult};
use crate::solver::{energy, GridField};

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "p>2")]
    Superquadratic,
    #[serde(rename = "1<p<=2")]
    Subquadratic,
}

impl Regime {
    pub fn of(exp: &Exponent) -> Regime {
        if exp.p() > 2.0 {
            Regime::Superquadratic
        } else {
            Regime::Subquadratic
        }
    }

    /// The power `r` applied to every term.
    pub fn power(&self, exp: &Exponent) -> f64 {
        match self {
            Regime::Superquadratic => exp.p(),
            Regime::Subquadratic => exp.p() / (exp.p() - 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub regime: Regime,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; nonnegative up to rounding and search error.
    pub slack: f64,
    /// Factor applied to the extremal of `S#ρ` to match `∫v dμ`.
    pub matched_extremal_scale: f64,
    pub seminorm: f64,
    pub deviation_norm: f64,
    pub gradient_norm: f64,
}

/// Assembles both sides from `[v]_ρ`, `‖Dv‖_p` and `‖Du - Dv‖_p`.
pub fn stability_report(
    exp: &Exponent,
    c: f64,
    seminorm: f64,
    gradient_norm: f64,
    deviation_norm: f64,
    matched_extremal_scale: f64,
) -> Result<StabilityReport, AnalysisError> {
    let regime = Regime::of(exp);
    if regime == Regime::Subquadratic && exp.n() != 1 {
        return Err(AnalysisError::RegimeMismatch {
            p: exp.p(),
            n: exp.n(),
        });
    }
    let r = regime.power(exp);
    let lhs = (0.5 * c * deviation_norm).powf(r) + seminorm.powf(r);
    let rhs = (c * gradient_norm).powf(r);
    Ok(StabilityReport {
        regime,
        lhs,
        rhs,
        slack: rhs - lhs,
        matched_extremal_scale,
        seminorm,
        deviation_norm,
        gradient_norm,
    })
}

/// The extremal of `S#ρ` for the maximizing `S` of `[v]_ρ`, scaled so that
/// its pairing with `S#ρ` equals that of `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedExtremal {
    pub extremal: PiecewiseLinear,
    pub scale: f64,
    pub search: SeminormResult,
}

pub fn matched_extremal_1d(
    v: &PiecewiseLinear,
    rho: &SignedMeasure,
    exp: &Exponent,
    search: &SearchConfig,
) -> Result<MatchedExtremal, AnalysisError> {
    let found = seminorm(v, rho, exp, search)?;
    let mu = found.argmax.pushforward(rho);
    let base = extremal_1d(&mu, exp)?;
    let scale = integrate(v, &mu)? / integrate(&base, &mu)?;
    Ok(MatchedExtremal {
        extremal: base.scaled(scale),
        scale,
        search: found,
    })
}

/// Both sides of the stability inequality for a piecewise-linear `v`, with
/// exact interval sums for every norm.
pub fn stability_deficit_1d(
    v: &PiecewiseLinear,
    rho: &SignedMeasure,
    exp: &Exponent,
    c: f64,
    search: &SearchConfig,
) -> Result<StabilityReport, AnalysisError> {
    let matched = matched_extremal_1d(v, rho, exp, search)?;
    let p = exp.p();
    let deviation = matched.extremal.combine(1.0, v, -1.0).gradient_norm(p);
    stability_report(
        exp,
        c,
        matched.search.value,
        v.gradient_norm(p),
        deviation,
        matched.scale,
    )
}

/// Both sides for grid fields `v` and a matched extremal `u` on the same
/// grid, with `‖D·‖_p` from the discrete energy.
pub fn stability_deficit_grid(
    v: &GridField,
    u: &GridField,
    seminorm_v: f64,
    exp: &Exponent,
    c: f64,
) -> Result<StabilityReport, AnalysisError> {
    let p = exp.p();
    let diff: Vec<f64> = u.values().iter().zip(v.values()).map(|(a, b)| a - b).collect();
    let diff = GridField::new(*v.grid(), diff)?;
    stability_report(
        exp,
        c,
        seminorm_v,
        energy(v, exp).powf(1.0 / p),
        energy(&diff, exp).powf(1.0 / p),
        1.0,
    )
}
