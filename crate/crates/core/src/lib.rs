//! Generalized Morrey seminorms, extremals and sharp constants for signed
//! atomic measures on `ℝⁿ`, `n ≤ 3`, with exponent `p > n`.
//!
//! * [`measure`] and [`similarity`]: measures `ρ`, similarity maps `S` and
//!   pushforwards `S#ρ`.
//! * [`seminorm`]: the ratio defining `[u]_ρ` and a multistart search over
//!   the similarity group.
//! * [`extremal1d`]: exact extremals and sharp constants on the line.
//! * [`solver`]: grid extremals for `n ≥ 2` by constrained minimization of
//!   the discrete `p`-Dirichlet energy.
//! * [`analysis`]: stability deficits, duality certificates and symmetry checks.

pub mod analysis;
pub mod config;
pub mod extremal1d;
pub mod field;
pub mod measure;
mod par;
pub mod seminorm;
pub mod piecewise;
pub mod similarity;
pub mod solver;

pub use config::{set_tolerances, tolerances, Tolerances};
pub use field::{integrate, FieldError, FnField, Region, ScalarField};
pub use measure::{Atom, Exponent, MeasureError, MeasureSpec, Point, SignedMeasure};
pub use piecewise::{PiecewiseConstant, PiecewiseLinear};
pub use similarity::{Orientation, Similarity, SimilarityError, SimilaritySpec};
