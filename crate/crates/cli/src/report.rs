//! JSON report schemas. Every report re-parses into an equal value.

use morrey_core::analysis::{DualityCertificate, StabilityReport};
use morrey_core::piecewise::PiecewiseSpec;
use morrey_core::solver::{BoundsReport, FarfieldReport, StopReason};
use morrey_core::SimilaritySpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremal1dReport {
    pub p: f64,
    pub q: f64,
    pub cstar: f64,
    /// Breakpoints and nodal values of the extremal `v`, linear in between
    /// and constant outside.
    pub breakpoints: Vec<f64>,
    pub nodes: Vec<f64>,
    pub left_limit: f64,
    pub right_limit: f64,
    /// The distribution function `F(x) = ρ((-∞, x])`.
    pub distribution: PiecewiseSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantMethod {
    Exact,
    GridEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub half_width: f64,
    pub resolution: usize,
    pub iterations: usize,
    pub el_residual: f64,
    pub stop: StopReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub dim: usize,
    pub p: f64,
    pub method: ConstantMethod,
    pub cstar: f64,
    /// `‖F‖_q / |∫y dρ|^{1-n/p}` for the flux built from the extremal.
    pub duality_cstar: f64,
    /// `[min, max]` of the two estimates.
    pub bracket: [f64; 2],
    pub grid: Option<GridSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub value: f64,
    pub ratio_at_argmax: f64,
    pub argmax: SimilaritySpec,
    pub evaluations: usize,
    pub constancy_failure: bool,
    /// `A` with `[u]_ρ ≤ A [u]_{1-n/p}`.
    pub comparison_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryScores {
    /// Largest `|u - u∘T|` over the axial maps, relative to the range of `u`.
    pub axial: f64,
    /// Standard deviation of `u + u∘R` for the midpoint reflection `R`,
    /// relative to the range of `u`.
    pub antisymmetry: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub dim: usize,
    pub p: f64,
    pub grid: GridSummary,
    pub multiplier: f64,
    pub energy: f64,
    pub seminorm: f64,
    pub cstar_estimate: f64,
    pub maximizer: SimilaritySpec,
    pub bounds: BoundsReport,
    pub farfield: FarfieldReport,
    /// Present for two-atom measures.
    pub symmetry: Option<SymmetryScores>,
    pub duality: DualityCertificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantSource {
    Given,
    Exact,
    GridEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityOutput {
    pub constant: f64,
    pub constant_source: ConstantSource,
    pub report: StabilityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Check {
        Check {
            name: name.to_string(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub dim: usize,
    pub p: f64,
    pub checks: Vec<Check>,
    pub pass: bool,
}
