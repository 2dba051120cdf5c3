//! Symmetries inherited by extremals: `u = u∘T` when `T#ρ = ρ`, and
//! `u + u∘T` constant when `T#ρ = -ρ`.

use nalgebra::{Matrix3, Rotation3, Unit};

use crate::field::ScalarField;
use crate::measure::{Atom, Point, SignedMeasure};
use crate::similarity::Similarity;

use super::AnalysisError;

const PUSHFORWARD_TOL: f64 = 1e-10;

/// Largest atom-wise mismatch between `a` and `b` after pairing every atom of
/// `a` with its nearest atom in `b`.
fn measure_defect(a: &SignedMeasure, b: &SignedMeasure) -> f64 {
    if a.atoms().len() != b.atoms().len() {
        return f64::INFINITY;
    }
    let nearest = |x: &Atom| {
        b.atoms()
            .iter()
            .map(|y| (x.location - y.location).norm() + (x.weight - y.weight).abs())
            .fold(f64::INFINITY, f64::min)
    };
    a.atoms().iter().map(nearest).fold(0.0, f64::max)
}

fn require_image(t: &Similarity, rho: &SignedMeasure, target: &SignedMeasure) -> Result<(), AnalysisError> {
    let defect = measure_defect(&t.pushforward(rho), target);
    let scale = 1.0 + rho.support_radius() + rho.total_variation();
    if defect <= PUSHFORWARD_TOL * scale {
        Ok(())
    } else {
        Err(AnalysisError::PushforwardMismatch { defect })
    }
}

/// Pairs `(u(x), u(T x))` over the samples where both are defined.
fn paired_values(u: &dyn ScalarField, t: &Similarity, samples: &[Point]) -> Vec<(f64, f64)> {
    samples
        .iter()
        .filter_map(|x| Some((u.value(x).ok()?, u.value(&t.apply(x)).ok()?)))
        .collect()
}

/// `max |u(x) - u(T x)|` over the samples; requires `T#ρ = ρ`.
pub fn check_symmetry(
    u: &dyn ScalarField,
    t: &Similarity,
    rho: &SignedMeasure,
    samples: &[Point],
) -> Result<f64, AnalysisError> {
    require_image(t, rho, rho)?;
    Ok(paired_values(u, t, samples)
        .into_iter()
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Sample standard deviation of `u(x) + u(T x)`; requires `T#ρ = -ρ`.
pub fn check_antisymmetry(
    u: &dyn ScalarField,
    t: &Similarity,
    rho: &SignedMeasure,
    samples: &[Point],
) -> Result<f64, AnalysisError> {
    require_image(t, rho, &rho.negated())?;
    let sums: Vec<f64> = paired_values(u, t, samples)
        .into_iter()
        .map(|(a, b)| a + b)
        .collect();
    if sums.len() < 2 {
        return Ok(0.0);
    }
    let mean = sums.iter().sum::<f64>() / sums.len() as f64;
    let var = sums.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (sums.len() - 1) as f64;
    Ok(var.sqrt())
}

fn points(x0: &[f64], y0: &[f64]) -> Result<(usize, Point, Point), AnalysisError> {
    let dim = x0.len();
    if y0.len() != dim {
        return Err(AnalysisError::Similarity(crate::similarity::SimilarityError::DimensionMismatch(
            dim,
            y0.len(),
        )));
    }
    let (a, b) = (crate::measure::point_from_slice(x0), crate::measure::point_from_slice(y0));
    if (a - b).norm() == 0.0 {
        return Err(AnalysisError::CoincidentPoints);
    }
    Ok((dim, a, b))
}

/// Reflection through the hyperplane bisecting `x₀y₀`:
/// `T(x) = x - 2((x₀-y₀)·(x-m)/|x₀-y₀|²)(x₀-y₀)` with `m` the midpoint.
pub fn midpoint_reflection(x0: &[f64], y0: &[f64]) -> Result<Similarity, AnalysisError> {
    let (dim, a, b) = points(x0, y0)?;
    let d = a - b;
    let mid = 0.5 * (a + b);
    let o = Matrix3::identity() - 2.0 * d * d.transpose() / d.norm_squared();
    let shift = mid - o * mid;
    Ok(Similarity::new(dim, 1.0, o, shift)?)
}

/// Orthogonal maps about `x₀` fixing the axis `y₀ - x₀`.
///
/// `n = 1`: the identity. `n = 2`: the identity and the reflection across
/// the axis. `n = 3`: `count` rotations by multiples of `2π/count` about the
/// axis, each followed by the same maps composed with one reflection in a
/// plane containing the axis.
pub fn axial_rotations(x0: &[f64], y0: &[f64], count: usize) -> Result<Vec<Similarity>, AnalysisError> {
    let (dim, a, b) = points(x0, y0)?;
    let axis = (b - a).normalize();
    let about = |o: Matrix3<f64>| Similarity::new(dim, 1.0, o, a - o * a);
    let mut out = Vec::new();
    match dim {
        1 => out.push(Similarity::identity(1)),
        2 => {
            out.push(Similarity::identity(2));
            let r = 2.0 * axis * axis.transpose() - Matrix3::identity();
            let mut r = r;
            r[(2, 2)] = 1.0;
            out.push(about(r)?);
        }
        _ => {
            let unit = Unit::new_normalize(axis);
            let helper = if axis.x.abs() < 0.9 { Point::x() } else { Point::y() };
            let normal = axis.cross(&helper).normalize();
            let mirror = Matrix3::identity() - 2.0 * normal * normal.transpose();
            let count = count.max(1);
            let rotations: Vec<Matrix3<f64>> = (0..count)
                .map(|k| {
                    let angle = std::f64::consts::TAU * k as f64 / count as f64;
                    *Rotation3::from_axis_angle(&unit, angle).matrix()
                })
                .collect();
            for r in &rotations {
                out.push(about(*r)?);
            }
            for r in &rotations {
                out.push(about(r * mirror)?);
            }
        }
    }
    Ok(out)
}
