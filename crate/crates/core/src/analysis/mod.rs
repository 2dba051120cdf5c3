//! Stability deficits, duality certificates and symmetry checks for
//! extremals on the line and on grids.

mod duality;
mod stability;
mod symmetry;

use thiserror::Error;

use crate::extremal1d::Extremal1dError;
use crate::field::FieldError;
use crate::seminorm::SeminormError;
use crate::similarity::SimilarityError;
use crate::solver::SolverError;

pub use duality::{
    divergence_residual_1d, divergence_residual_grid, duality_gap_1d, duality_gap_grid,
    flux_from_extremal_1d, flux_from_extremal_grid, DualityCertificate, GridFlux,
};
pub use stability::{
    matched_extremal_1d, stability_deficit_1d, stability_deficit_grid, stability_report,
    MatchedExtremal, Regime, StabilityReport,
};
pub use symmetry::{
    axial_rotations, check_antisymmetry, check_symmetry, midpoint_reflection,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("the 1 < p <= 2 branch needs n = 1, got p = {p}, n = {n}")]
    RegimeMismatch { p: f64, n: usize },
    #[error("map does not carry the measure to the required image (defect {defect})")]
    PushforwardMismatch { defect: f64 },
    #[error("the two points coincide")]
    CoincidentPoints,
    #[error(transparent)]
    Extremal1d(#[from] Extremal1dError),
    #[error(transparent)]
    Seminorm(#[from] SeminormError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}
