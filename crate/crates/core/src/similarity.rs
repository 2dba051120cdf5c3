//! Similarity transformations `S(y) = λ O y + z` and pushforwards of measures.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::tolerances;
use crate::measure::{point_from_slice, point_to_vec, Atom, Point, SignedMeasure, MAX_DIM};

/// Orthogonality defect above which a matrix is rejected instead of repaired.
const REPAIR_LIMIT: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimilarityError {
    #[error("scale must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("matrix is not orthogonal (defect {0:e})")]
    NotOrthogonal(f64),
    #[error("expected a {expected}x{expected} matrix and {expected}-vector shift")]
    Shape { expected: usize },
    #[error("dimension {0} is not supported")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// A point in the chart used to sample and polish over the orthogonal group.
///
/// `n = 1`: a sign. `n = 2`: an angle plus reflection flag. `n = 3`: a
/// rotation vector (axis times angle) plus reflection flag, where the
/// reflected branch is `-R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Orientation {
    Line { flip: bool },
    Plane { angle: f64, reflect: bool },
    Space { rotation: [f64; 3], reflect: bool },
}

impl Orientation {
    pub fn identity(dim: usize) -> Orientation {
        match dim {
            1 => Orientation::Line { flip: false },
            2 => Orientation::Plane {
                angle: 0.0,
                reflect: false,
            },
            _ => Orientation::Space {
                rotation: [0.0; 3],
                reflect: false,
            },
        }
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        match *self {
            Orientation::Line { flip } => {
                let mut m = Matrix3::identity();
                if flip {
                    m[(0, 0)] = -1.0;
                }
                m
            }
            Orientation::Plane { angle, reflect } => {
                let (s, c) = angle.sin_cos();
                let r = if reflect { -1.0 } else { 1.0 };
                // R(θ) · diag(1, r)
                Matrix3::new(c, -s * r, 0.0, s, c * r, 0.0, 0.0, 0.0, 1.0)
            }
            Orientation::Space { rotation, reflect } => {
                let rot = Rotation3::from_scaled_axis(Vector3::from(rotation)).into_inner();
                if reflect {
                    -rot
                } else {
                    rot
                }
            }
        }
    }

    /// Continuous chart coordinates (angle or rotation vector).
    pub fn chart(&self) -> Vec<f64> {
        match *self {
            Orientation::Line { .. } => vec![],
            Orientation::Plane { angle, .. } => vec![angle],
            Orientation::Space { rotation, .. } => rotation.to_vec(),
        }
    }

    /// Same discrete branch, new chart coordinates.
    pub fn with_chart(&self, coords: &[f64]) -> Orientation {
        match *self {
            Orientation::Line { flip } => Orientation::Line { flip },
            Orientation::Plane { reflect, .. } => Orientation::Plane {
                angle: coords[0],
                reflect,
            },
            Orientation::Space { reflect, .. } => Orientation::Space {
                rotation: [coords[0], coords[1], coords[2]],
                reflect,
            },
        }
    }

    pub fn reflected(&self) -> bool {
        match *self {
            Orientation::Line { flip } => flip,
            Orientation::Plane { reflect, .. } | Orientation::Space { reflect, .. } => reflect,
        }
    }

    /// Deterministic sample of the orthogonal group.
    ///
    /// `per_component` is the number of samples in each connected component:
    /// ignored for `n = 1`, angles for `n = 2`, rotations for `n = 3`.
    pub fn samples(dim: usize, per_component: usize) -> Vec<Orientation> {
        let k = per_component.max(1);
        match dim {
            1 => vec![
                Orientation::Line { flip: false },
                Orientation::Line { flip: true },
            ],
            2 => [false, true]
                .into_iter()
                .flat_map(|reflect| {
                    (0..k).map(move |i| Orientation::Plane {
                        angle: 2.0 * PI * i as f64 / k as f64,
                        reflect,
                    })
                })
                .collect(),
            _ => {
                let rotations = rotation_samples(k);
                [false, true]
                    .into_iter()
                    .flat_map(|reflect| {
                        rotations
                            .iter()
                            .map(move |&rotation| Orientation::Space { rotation, reflect })
                    })
                    .collect()
            }
        }
    }
}

/// `k` rotation vectors: identity first, then Fibonacci-sphere axes with
/// angles cycling through a few values in `(0, π]`.
fn rotation_samples(k: usize) -> Vec<[f64; 3]> {
    let mut out = vec![[0.0; 3]];
    if k == 1 {
        return out;
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    let rest = k - 1;
    let angles = [PI / 3.0, 2.0 * PI / 3.0, PI];
    for i in 0..rest {
        let zc = 1.0 - 2.0 * (i as f64 + 0.5) / rest as f64;
        let r = (1.0 - zc * zc).max(0.0).sqrt();
        let phi = golden * i as f64;
        let angle = angles[i % angles.len()];
        out.push([
            angle * r * phi.cos(),
            angle * r * phi.sin(),
            angle * zc,
        ]);
    }
    out
}

/// `S(y) = λ O y + z` on `ℝⁿ`, stored with padding up to three dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    dim: usize,
    scale: f64,
    orthogonal: Matrix3<f64>,
    shift: Point,
}

fn orthogonality_defect(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).amax()
}

fn embed_block(dim: usize, m: &Matrix3<f64>) -> Matrix3<f64> {
    let mut out = Matrix3::identity();
    for i in 0..dim {
        for j in 0..dim {
            out[(i, j)] = m[(i, j)];
        }
    }
    out
}

impl Similarity {
    pub fn identity(dim: usize) -> Similarity {
        Similarity {
            dim,
            scale: 1.0,
            orthogonal: Matrix3::identity(),
            shift: Point::zeros(),
        }
    }

    /// Builds a similarity from a (padded) matrix, repairing small
    /// orthogonality defects by polar decomposition.
    pub fn new(
        dim: usize,
        scale: f64,
        orthogonal: Matrix3<f64>,
        shift: Point,
    ) -> Result<Similarity, SimilarityError> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(SimilarityError::UnsupportedDimension(dim));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(SimilarityError::NonPositiveScale(scale));
        }
        let mut o = embed_block(dim, &orthogonal);
        let mut shift_padded = Point::zeros();
        for i in 0..dim {
            shift_padded[i] = shift[i];
        }
        let defect = orthogonality_defect(&o);
        if defect > REPAIR_LIMIT || !defect.is_finite() {
            return Err(SimilarityError::NotOrthogonal(defect));
        }
        if defect > tolerances().exact {
            let svd = o.svd(true, true);
            let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
            o = embed_block(dim, &(u * v_t));
        }
        Ok(Similarity {
            dim,
            scale,
            orthogonal: o,
            shift: shift_padded,
        })
    }

    /// From row-major `n × n` rows and an `n`-vector shift.
    pub fn from_rows(
        scale: f64,
        rows: &[Vec<f64>],
        shift: &[f64],
    ) -> Result<Similarity, SimilarityError> {
        let dim = shift.len();
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(SimilarityError::Shape { expected: dim });
        }
        let mut m = Matrix3::identity();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Similarity::new(dim, scale, m, point_from_slice(shift))
    }

    /// From chart coordinates; the orientation matrix is orthogonal by construction.
    pub fn from_orientation(
        dim: usize,
        scale: f64,
        orientation: &Orientation,
        shift: Point,
    ) -> Similarity {
        let mut s = Point::zeros();
        for i in 0..dim {
            s[i] = shift[i];
        }
        Similarity {
            dim,
            scale,
            orthogonal: orientation.matrix(),
            shift: s,
        }
    }

    /// One-dimensional `y ↦ λ·sign·y + z`.
    pub fn line(scale: f64, flip: bool, shift: f64) -> Result<Similarity, SimilarityError> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(SimilarityError::NonPositiveScale(scale));
        }
        Ok(Similarity::from_orientation(
            1,
            scale,
            &Orientation::Line { flip },
            point_from_slice(&[shift]),
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn orthogonal(&self) -> &Matrix3<f64> {
        &self.orthogonal
    }

    pub fn shift(&self) -> &Point {
        &self.shift
    }

    pub fn apply(&self, y: &Point) -> Point {
        self.orthogonal * y * self.scale + self.shift
    }

    pub fn inverse(&self) -> Similarity {
        let ot = self.orthogonal.transpose();
        Similarity {
            dim: self.dim,
            scale: 1.0 / self.scale,
            orthogonal: ot,
            shift: -(ot * self.shift) / self.scale,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Similarity) -> Similarity {
        Similarity {
            dim: self.dim,
            scale: self.scale * other.scale,
            orthogonal: self.orthogonal * other.orthogonal,
            shift: self.orthogonal * other.shift * self.scale + self.shift,
        }
    }

    /// Pushforward `S#ρ`: each atom moves to `S(yᵢ)` keeping its weight.
    pub fn pushforward(&self, rho: &SignedMeasure) -> SignedMeasure {
        let atoms = rho
            .atoms()
            .iter()
            .map(|a| Atom {
                location: self.apply(&a.location),
                weight: a.weight,
            })
            .collect();
        SignedMeasure::from_mapped(rho.dim(), atoms)
    }

    pub fn approx_eq(&self, other: &Similarity, tol: f64) -> bool {
        self.dim == other.dim
            && (self.scale - other.scale).abs() <= tol * self.scale.max(1.0)
            && (self.orthogonal - other.orthogonal).amax() <= tol
            && (self.shift - other.shift).amax() <= tol * (1.0 + self.shift.amax())
    }

    pub fn orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.orthogonal)
    }

    pub fn to_spec(&self) -> SimilaritySpec {
        SimilaritySpec {
            scale: self.scale,
            orthogonal: (0..self.dim)
                .map(|i| (0..self.dim).map(|j| self.orthogonal[(i, j)]).collect())
                .collect(),
            shift: point_to_vec(&self.shift, self.dim),
        }
    }
}

/// JSON form: `{"scale": λ, "orthogonal": [[..]], "shift": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilaritySpec {
    pub scale: f64,
    pub orthogonal: Vec<Vec<f64>>,
    pub shift: Vec<f64>,
}

impl TryFrom<&SimilaritySpec> for Similarity {
    type Error = SimilarityError;
    fn try_from(spec: &SimilaritySpec) -> Result<Self, Self::Error> {
        Similarity::from_rows(spec.scale, &spec.orthogonal, &spec.shift)
    }
}
