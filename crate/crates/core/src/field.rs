//! Scalar fields `u: ℝⁿ → ℝ` and their pairing with atomic measures.

use thiserror::Error;

use crate::measure::{Point, SignedMeasure};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("point {point:?} lies outside the field domain")]
    AtomOutsideFieldDomain { point: Vec<f64> },
    #[error("field dimension {field} does not match measure dimension {measure}")]
    DimensionMismatch { field: usize, measure: usize },
}

/// Axis-aligned box `[lo, hi]` (padded coordinates beyond `dim` are zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub lo: Point,
    pub hi: Point,
}

impl Region {
    pub fn cube(dim: usize, half_width: f64) -> Region {
        let mut lo = Point::zeros();
        let mut hi = Point::zeros();
        for i in 0..dim {
            lo[i] = -half_width;
            hi[i] = half_width;
        }
        Region { lo, hi }
    }

    pub fn diameter(&self) -> f64 {
        (self.hi - self.lo).norm()
    }

    pub fn contains(&self, x: &Point, dim: usize) -> bool {
        (0..dim).all(|i| x[i] >= self.lo[i] && x[i] <= self.hi[i])
    }
}

/// An evaluatable field with gradient access.
///
/// `region` is where the interesting behaviour lives; fields backed by a
/// finite grid are only defined there, and report
/// [`FieldError::AtomOutsideFieldDomain`] elsewhere.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Point) -> Result<f64, FieldError>;
    fn gradient(&self, x: &Point) -> Result<Point, FieldError>;
    fn region(&self) -> Region;
}

/// `∫ u dρ = Σ wᵢ u(yᵢ)`.
pub fn integrate(u: &dyn ScalarField, rho: &SignedMeasure) -> Result<f64, FieldError> {
    if u.dim() != rho.dim() {
        return Err(FieldError::DimensionMismatch {
            field: u.dim(),
            measure: rho.dim(),
        });
    }
    rho.atoms()
        .iter()
        .try_fold(0.0, |acc, a| Ok(acc + a.weight * u.value(&a.location)?))
}

/// A field given by a closure, with a central-difference gradient.
pub struct FnField<F> {
    dim: usize,
    region: Region,
    f: F,
}

impl<F: Fn(&Point) -> f64 + Sync> FnField<F> {
    pub fn new(dim: usize, region: Region, f: F) -> Self {
        FnField { dim, region, f }
    }
}

impl<F: Fn(&Point) -> f64 + Sync> ScalarField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Point) -> Result<f64, FieldError> {
        Ok((self.f)(x))
    }

    fn gradient(&self, x: &Point) -> Result<Point, FieldError> {
        let h = 1e-6 * (1.0 + x.amax());
        let mut g = Point::zeros();
        for i in 0..self.dim {
            let mut xp = *x;
            let mut xm = *x;
            xp[i] += h;
            xm[i] -= h;
            g[i] = ((self.f)(&xp) - (self.f)(&xm)) / (2.0 * h);
        }
        Ok(g)
    }

    fn region(&self) -> Region {
        self.region
    }
}
