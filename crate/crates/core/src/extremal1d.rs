//! Closed-form extremals and sharp constants on the line.
//!
//! For an atomic `ρ` on `ℝ` the distribution function `F(x) = ρ((-∞, x])` is
//! a compactly supported step function, the extremal is
//! `v(x) = -∫_{-∞}^x |F|^{q-2} F dy`, and the sharp constant is
//! `C* = ‖F‖_q / |∫ y dρ|^{1/q}`. Everything below is evaluated by interval
//! sums, so the results are exact up to rounding.

use thiserror::Error;

use crate::measure::{Exponent, SignedMeasure};
use crate::piecewise::{signed_pow, PiecewiseConstant, PiecewiseError, PiecewiseLinear};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Extremal1dError {
    #[error("operation requires n = 1, got n = {0}")]
    DimensionNotOne(usize),
    #[error(transparent)]
    Piecewise(#[from] PiecewiseError),
}

fn require_line(rho: &SignedMeasure, exp: Option<&Exponent>) -> Result<(), Extremal1dError> {
    if rho.dim() != 1 {
        return Err(Extremal1dError::DimensionNotOne(rho.dim()));
    }
    if let Some(e) = exp {
        if e.n() != 1 {
            return Err(Extremal1dError::DimensionNotOne(e.n()));
        }
    }
    Ok(())
}

/// `F(x) = ρ((-∞, x])`, with both tails exactly zero.
pub fn distribution_function(rho: &SignedMeasure) -> Result<PiecewiseConstant, Extremal1dError> {
    require_line(rho, None)?;
    let mut atoms: Vec<(f64, f64)> = rho
        .atoms()
        .iter()
        .map(|a| (a.location[0], a.weight))
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let breakpoints: Vec<f64> = atoms.iter().map(|a| a.0).collect();
    let mut acc = 0.0;
    let values = atoms[..atoms.len() - 1]
        .iter()
        .map(|a| {
            acc += a.1;
            acc
        })
        .collect();
    Ok(PiecewiseConstant::new(breakpoints, values)?)
}

/// The extremal `v = -∫ |F|^{q-2} F`: zero on the left tail, slope
/// `-|Fᵢ|^{q-2}Fᵢ` on each interval, constant on the right tail.
pub fn extremal_1d(rho: &SignedMeasure, exp: &Exponent) -> Result<PiecewiseLinear, Extremal1dError> {
    require_line(rho, Some(exp))?;
    let f = distribution_function(rho)?;
    let slopes = f.map(|v| -signed_pow(v, exp.q() - 1.0));
    Ok(PiecewiseLinear::from_slopes(0.0, &slopes))
}

/// `C* = (∫|F|^q)^{1/q} / |∫ y dρ|^{1/q}`.
pub fn best_constant_1d(rho: &SignedMeasure, exp: &Exponent) -> Result<f64, Extremal1dError> {
    require_line(rho, Some(exp))?;
    let f = distribution_function(rho)?;
    let q = exp.q();
    let moment = rho.first_moment()[0].abs();
    Ok((f.integral_abs_pow(q) / moment).powf(1.0 / q))
}

/// `(lim_{x→-∞} v, lim_{x→+∞} v)`.
pub fn farfield_limits_1d(v: &PiecewiseLinear) -> (f64, f64) {
    (v.left_tail(), v.right_tail())
}

/// Hats of half-width `width` centred at every atom.
pub fn hat_tests_at_atoms(rho: &SignedMeasure, width: f64) -> Vec<PiecewiseLinear> {
    rho.atoms()
        .iter()
        .map(|a| {
            let y = a.location[0];
            PiecewiseLinear::hat(y - width, y, y + width, 1.0).expect("positive width")
        })
        .collect()
}

/// `count` hats with centres evenly spaced on `[lo, hi]`, each spanning its
/// two neighbouring centres.
pub fn hat_tests_uniform(lo: f64, hi: f64, count: usize) -> Vec<PiecewiseLinear> {
    let count = count.max(1);
    let step = if count > 1 {
        (hi - lo) / (count - 1) as f64
    } else {
        (hi - lo).max(1.0)
    };
    (0..count)
        .map(|i| {
            let c = lo + step * i as f64;
            PiecewiseLinear::hat(c - step, c, c + step, 1.0).expect("positive step")
        })
        .collect()
}

/// `max_φ |∫ |v'|^{p-2} v' φ' dx - Σ wᵢ φ(yᵢ)|` over compactly supported
/// piecewise-linear tests.
pub fn weak_residual_1d(
    v: &PiecewiseLinear,
    rho: &SignedMeasure,
    exp: &Exponent,
    tests: &[PiecewiseLinear],
) -> Result<f64, Extremal1dError> {
    require_line(rho, Some(exp))?;
    let flux = v.derivative().map(|s| signed_pow(s, exp.p() - 1.0));
    let residual = tests
        .iter()
        .map(|phi| {
            let lhs = flux.inner(&phi.derivative());
            let rhs: f64 = rho
                .atoms()
                .iter()
                .map(|a| a.weight * phi.eval(a.location[0]))
                .sum();
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max);
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::integrate;

    fn dipole() -> SignedMeasure {
        SignedMeasure::dipole(&[1.0], &[0.0]).unwrap()
    }

    fn three_atom() -> SignedMeasure {
        SignedMeasure::new(1, &[(vec![-1.0], -1.0), (vec![0.0], -1.0), (vec![1.0], 2.0)]).unwrap()
    }

    fn exp(p: f64) -> Exponent {
        Exponent::new(p, 1).unwrap()
    }

    #[test]
    fn distribution_of_dipole() {
        let f = distribution_function(&dipole()).unwrap();
        assert_eq!(f.breakpoints(), &[0.0, 1.0]);
        assert_eq!(f.values(), &[-1.0]);
        assert_eq!(f.eval(2.0), 0.0);
    }

    #[test]
    fn distribution_of_three_atoms() {
        let f = distribution_function(&three_atom()).unwrap();
        assert_eq!(f.breakpoints(), &[-1.0, 0.0, 1.0]);
        assert_eq!(f.values(), &[-1.0, -2.0]);
        assert_eq!(f.eval(5.0), 0.0);
        assert_eq!(f.eval(-5.0), 0.0);
    }

    #[test]
    fn planar_measure_rejected() {
        let rho = SignedMeasure::dipole(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(
            distribution_function(&rho).unwrap_err(),
            Extremal1dError::DimensionNotOne(2)
        );
    }

    #[test]
    fn dipole_extremal_is_ramp() {
        for p in [1.5, 2.0, 3.0, 7.0] {
            let v = extremal_1d(&dipole(), &exp(p)).unwrap();
            assert_eq!(v.breakpoints(), &[0.0, 1.0]);
            assert_eq!(v.nodes(), &[0.0, 1.0]);
            assert_eq!(farfield_limits_1d(&v), (0.0, 1.0));
        }
    }

    #[test]
    fn three_atom_extremal_nodes() {
        let v = extremal_1d(&three_atom(), &exp(2.0)).unwrap();
        assert_eq!(v.nodes(), &[0.0, 1.0, 3.0]);
        assert_eq!(v.eval(-10.0), 0.0);
        assert_eq!(farfield_limits_1d(&v), (0.0, 3.0));
        // pairing with ρ equals ∫|F|^q
        assert_eq!(integrate(&v, &three_atom()).unwrap(), 5.0);
    }

    #[test]
    fn sharp_constants() {
        for p in [1.5, 2.0, 3.0, 7.0] {
            assert!((best_constant_1d(&dipole(), &exp(p)).unwrap() - 1.0).abs() < 1e-15);
        }
        let c = best_constant_1d(&three_atom(), &exp(2.0)).unwrap();
        assert!((c - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_is_translation_invariant() {
        let shifted = SignedMeasure::new(
            1,
            &[(vec![2.5], -1.0), (vec![3.5], -1.0), (vec![4.5], 2.0)],
        )
        .unwrap();
        for p in [1.5, 4.0] {
            let a = best_constant_1d(&three_atom(), &exp(p)).unwrap();
            let b = best_constant_1d(&shifted, &exp(p)).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn residual_of_extremal_vanishes() {
        for p in [1.5, 2.0, 3.0] {
            let v = extremal_1d(&three_atom(), &exp(p)).unwrap();
            let tests = hat_tests_at_atoms(&three_atom(), 0.5);
            assert!(weak_residual_1d(&v, &three_atom(), &exp(p), &tests).unwrap() < 1e-12);
            let shifted = v.shifted(17.0);
            assert!(weak_residual_1d(&shifted, &three_atom(), &exp(p), &tests).unwrap() < 1e-12);
        }
    }

    #[test]
    fn residual_of_zero_field_is_source() {
        let zero = PiecewiseLinear::new(vec![0.0], vec![0.0]).unwrap();
        let phi = PiecewiseLinear::hat(0.0, 1.0, 2.0, 1.0).unwrap();
        let r = weak_residual_1d(&zero, &dipole(), &exp(2.0), &[phi]).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn energy_identity() {
        for p in [1.5, 2.0, 3.0, 7.0] {
            let e = exp(p);
            let rho = three_atom();
            let v = extremal_1d(&rho, &e).unwrap();
            let f = distribution_function(&rho).unwrap();
            let fq = f.integral_abs_pow(e.q());
            assert!((v.gradient_energy(p) - fq).abs() < 1e-12 * fq);
            assert!((integrate(&v, &rho).unwrap() - fq).abs() < 1e-12 * fq);
        }
    }
}
