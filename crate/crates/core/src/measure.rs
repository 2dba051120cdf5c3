//! Signed atomic measures and the exponent pair `(p, n)`.
//!
//! A [`SignedMeasure`] is a finite sum of weighted Dirac atoms with zero
//! total mass and nonzero first moment. Points are stored as
//! [`nalgebra::Vector3`] padded with zeros beyond the ambient dimension, so
//! the same code paths serve `n = 1, 2, 3`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::tolerances;

pub type Point = Vector3<f64>;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("atom list is empty")]
    EmptyAfterMerge,
    #[error("total mass {total} is not zero (largest |weight| {scale})")]
    ZeroTotalMassViolated { total: f64, scale: f64 },
    #[error("first moment vanishes (|moment| = {norm})")]
    ZeroFirstMoment { norm: f64 },
    #[error("dimension {0} is not supported (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("atom has {got} coordinates, expected {expected}")]
    CoordinateCount { expected: usize, got: usize },
    #[error("non-finite atom data")]
    NonFinite,
    #[error("exponent p = {p} must exceed the dimension n = {n}")]
    ExponentTooSmall { p: f64, n: usize },
}

/// The exponent `p > n`, its dimension `n`, and the Hölder conjugate `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExponentSpec", into = "ExponentSpec")]
pub struct Exponent {
    p: f64,
    n: usize,
    q: f64,
}

#[derive(Serialize, Deserialize)]
struct ExponentSpec {
    p: f64,
    n: usize,
}

impl TryFrom<ExponentSpec> for Exponent {
    type Error = MeasureError;
    fn try_from(spec: ExponentSpec) -> Result<Self, Self::Error> {
        Exponent::new(spec.p, spec.n)
    }
}

impl From<Exponent> for ExponentSpec {
    fn from(e: Exponent) -> Self {
        ExponentSpec { p: e.p, n: e.n }
    }
}

impl Exponent {
    pub fn new(p: f64, n: usize) -> Result<Self, MeasureError> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(MeasureError::UnsupportedDimension(n));
        }
        if !p.is_finite() || p <= n as f64 {
            return Err(MeasureError::ExponentTooSmall { p, n });
        }
        Ok(Exponent {
            p,
            n,
            q: p / (p - 1.0),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Hölder conjugate `p / (p - 1)`.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// The Hölder exponent `1 - n/p` of the Morrey embedding.
    pub fn holder(&self) -> f64 {
        1.0 - self.n as f64 / self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: Point,
    pub weight: f64,
}

/// A finite signed atomic measure with zero total mass and nonzero first moment.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasure {
    dim: usize,
    atoms: Vec<Atom>,
    support_radius: f64,
}

/// Pads a coordinate slice into a [`Point`].
pub fn point_from_slice(coords: &[f64]) -> Point {
    let mut p = Point::zeros();
    for (slot, &c) in p.iter_mut().zip(coords) {
        *slot = c;
    }
    p
}

/// The first `dim` coordinates of a padded point.
pub fn point_to_vec(p: &Point, dim: usize) -> Vec<f64> {
    p.iter().take(dim).copied().collect()
}

impl SignedMeasure {
    /// Validates and normalizes a list of `(location, weight)` pairs.
    ///
    /// Coincident atoms are merged; atoms whose merged weight cancels are
    /// dropped.
    pub fn new(dim: usize, atoms: &[(Vec<f64>, f64)]) -> Result<Self, MeasureError> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(MeasureError::UnsupportedDimension(dim));
        }
        let mut raw = Vec::with_capacity(atoms.len());
        for (y, w) in atoms {
            if y.len() != dim {
                return Err(MeasureError::CoordinateCount {
                    expected: dim,
                    got: y.len(),
                });
            }
            if !w.is_finite() || y.iter().any(|c| !c.is_finite()) {
                return Err(MeasureError::NonFinite);
            }
            raw.push(Atom {
                location: point_from_slice(y),
                weight: *w,
            });
        }
        Self::from_atoms(dim, raw)
    }

    pub fn from_atoms(dim: usize, raw: Vec<Atom>) -> Result<Self, MeasureError> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(MeasureError::UnsupportedDimension(dim));
        }
        let tol = tolerances();
        let radius = raw.iter().map(|a| a.location.norm()).fold(0.0, f64::max);
        let merge_dist = tol.exact * radius.max(1.0);

        let mut merged: Vec<Atom> = Vec::with_capacity(raw.len());
        for atom in raw {
            if atom.weight == 0.0 {
                continue;
            }
            match merged
                .iter_mut()
                .find(|a| (a.location - atom.location).norm() <= merge_dist)
            {
                Some(existing) => existing.weight += atom.weight,
                None => merged.push(atom),
            }
        }
        let scale = merged.iter().map(|a| a.weight.abs()).fold(0.0, f64::max);
        merged.retain(|a| a.weight.abs() > tol.exact * scale);
        if merged.is_empty() {
            return Err(MeasureError::EmptyAfterMerge);
        }

        let scale = merged.iter().map(|a| a.weight.abs()).fold(0.0, f64::max);
        let total: f64 = merged.iter().map(|a| a.weight).sum();
        if total.abs() > tol.exact * scale {
            return Err(MeasureError::ZeroTotalMassViolated { total, scale });
        }

        let support_radius = merged.iter().map(|a| a.location.norm()).fold(0.0, f64::max);
        let abs_mass: f64 = merged.iter().map(|a| a.weight.abs()).sum();
        let moment: Point = merged.iter().map(|a| a.location * a.weight).sum();
        if moment.norm() <= tol.exact * abs_mass * support_radius.max(1.0) {
            return Err(MeasureError::ZeroFirstMoment {
                norm: moment.norm(),
            });
        }

        Ok(SignedMeasure {
            dim,
            atoms: merged,
            support_radius,
        })
    }

    /// Image of a valid measure under an injective similarity: weights, mass
    /// and distinctness carry over, and the moment is a nonzero multiple.
    pub(crate) fn from_mapped(dim: usize, atoms: Vec<Atom>) -> SignedMeasure {
        let support_radius = atoms.iter().map(|a| a.location.norm()).fold(0.0, f64::max);
        SignedMeasure {
            dim,
            atoms,
            support_radius,
        }
    }

    /// Builds `δ_x − δ_y`.
    pub fn dipole(x: &[f64], y: &[f64]) -> Result<Self, MeasureError> {
        Self::new(x.len(), &[(x.to_vec(), 1.0), (y.to_vec(), -1.0)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `max |y|` over the support.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Largest distance between two atoms.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[i + 1..] {
                d = d.max((a.location - b.location).norm());
            }
        }
        d
    }

    /// `Σ wᵢ yᵢ`.
    pub fn first_moment(&self) -> Point {
        self.atoms.iter().map(|a| a.location * a.weight).sum()
    }

    /// `Σ |wᵢ|`.
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.abs()).sum()
    }

    /// `-ρ`.
    pub fn negated(&self) -> SignedMeasure {
        self.scaled(-1.0)
    }

    /// `t·ρ` for `t ≠ 0`.
    pub fn scaled(&self, t: f64) -> SignedMeasure {
        assert!(t != 0.0 && t.is_finite(), "measure scale must be nonzero");
        SignedMeasure {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    location: a.location,
                    weight: t * a.weight,
                })
                .collect(),
            support_radius: self.support_radius,
        }
    }

    /// Atom-wise comparison up to reordering: every atom of `self` matches an
    /// atom of `other` in location and weight within `tol`.
    pub fn approx_eq(&self, other: &SignedMeasure, tol: f64) -> bool {
        self.dim == other.dim
            && self.atoms.len() == other.atoms.len()
            && self.atoms.iter().all(|a| {
                other.atoms.iter().any(|b| {
                    (a.location - b.location).norm() <= tol * (1.0 + a.location.norm())
                        && (a.weight - b.weight).abs() <= tol * (1.0 + a.weight.abs())
                })
            })
    }

    pub fn to_spec(&self) -> MeasureSpec {
        MeasureSpec {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomSpec {
                    y: point_to_vec(&a.location, self.dim),
                    w: a.weight,
                })
                .collect(),
        }
    }
}

/// JSON form: `{"dim": n, "atoms": [{"y": [..], "w": ..}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub dim: usize,
    pub atoms: Vec<AtomSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub y: Vec<f64>,
    pub w: f64,
}

impl TryFrom<&MeasureSpec> for SignedMeasure {
    type Error = MeasureError;
    fn try_from(spec: &MeasureSpec) -> Result<Self, Self::Error> {
        let atoms: Vec<(Vec<f64>, f64)> =
            spec.atoms.iter().map(|a| (a.y.clone(), a.w)).collect();
        SignedMeasure::new(spec.dim, &atoms)
    }
}
