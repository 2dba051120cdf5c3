mod common;

use common::{dipole_line, random_measure_line, random_piecewise, rng, three_atom};
use morrey_core::extremal1d::{
    best_constant_1d, distribution_function, extremal_1d, farfield_limits_1d, hat_tests_at_atoms,
    hat_tests_uniform, weak_residual_1d, Extremal1dError,
};
use morrey_core::seminorm::{seminorm, SearchConfig};
use morrey_core::{integrate, Exponent, PiecewiseLinear, SignedMeasure};
use proptest::prelude::*;

fn exp(p: f64) -> Exponent {
    Exponent::new(p, 1).unwrap()
}

fn search() -> SearchConfig {
    SearchConfig {
        keep_trace: false,
        ..SearchConfig::default()
    }
}

#[test]
fn distribution_examples() {
    let f = distribution_function(&dipole_line()).unwrap();
    assert_eq!(f.breakpoints(), &[0.0, 1.0]);
    assert_eq!(f.values(), &[-1.0]);
    assert_eq!((f.eval(-0.5), f.eval(0.0), f.eval(0.999), f.eval(1.0)), (0.0, -1.0, -1.0, 0.0));
    let f = distribution_function(&three_atom()).unwrap();
    assert_eq!(f.values(), &[-1.0, -2.0]);
    assert_eq!(f.eval(5.0), 0.0);
    let plane = SignedMeasure::dipole(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
    assert_eq!(distribution_function(&plane).unwrap_err(), Extremal1dError::DimensionNotOne(2));
}

#[test]
fn extremal_examples() {
    for p in [1.2, 2.0, 5.0] {
        let v = extremal_1d(&dipole_line(), &exp(p)).unwrap();
        assert_eq!(v.breakpoints(), &[0.0, 1.0]);
        assert_eq!(v.nodes(), &[0.0, 1.0]);
        assert_eq!(farfield_limits_1d(&v), (0.0, 1.0));
    }
    let v = extremal_1d(&three_atom(), &exp(2.0)).unwrap();
    assert_eq!(v.nodes(), &[0.0, 1.0, 3.0]);
    assert_eq!(v.eval(-7.0), 0.0);
    assert_eq!(v.eval(9.0), 3.0);
    assert_eq!(farfield_limits_1d(&v), (0.0, 3.0));
}

#[test]
fn constant_examples() {
    for p in [1.5, 2.0, 3.0, 7.0] {
        assert!((best_constant_1d(&dipole_line(), &exp(p)).unwrap() - 1.0).abs() < 1e-15);
    }
    let c = best_constant_1d(&three_atom(), &exp(2.0)).unwrap();
    assert!((c - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    let shifted =
        SignedMeasure::new(1, &[(vec![3.5], 2.0), (vec![2.5], -1.0), (vec![1.5], -1.0)]).unwrap();
    for p in [1.5, 4.0] {
        let a = best_constant_1d(&three_atom(), &exp(p)).unwrap();
        let b = best_constant_1d(&shifted, &exp(p)).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn weak_residual_examples() {
    let rho = three_atom();
    let tests = hat_tests_at_atoms(&rho, 0.5);
    for p in [1.5, 2.0, 6.0] {
        let v = extremal_1d(&rho, &exp(p)).unwrap();
        assert!(weak_residual_1d(&v, &rho, &exp(p), &tests).unwrap() < 1e-12);
        let lifted = v.shifted(12.5);
        let a = weak_residual_1d(&lifted, &rho, &exp(p), &tests).unwrap();
        let b = weak_residual_1d(&v, &rho, &exp(p), &tests).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
    let zero = PiecewiseLinear::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
    let hat = PiecewiseLinear::hat(0.5, 1.0, 1.5, 1.0).unwrap();
    assert_eq!(weak_residual_1d(&zero, &dipole_line(), &exp(2.0), &[hat]).unwrap(), 1.0);
}

#[test]
fn energy_identity() {
    let mut r = rng(11);
    for _ in 0..20 {
        let rho = random_measure_line(&mut r, 4);
        for p in [1.3, 2.0, 4.5] {
            let e = exp(p);
            let v = extremal_1d(&rho, &e).unwrap();
            let f = distribution_function(&rho).unwrap();
            let fq = f.integral_abs_pow(e.q());
            assert!((v.gradient_energy(p) - fq).abs() <= 1e-12 * fq.max(1.0));
            assert!((integrate(&v, &rho).unwrap() - fq).abs() <= 1e-12 * fq.max(1.0));
        }
    }
}

#[test]
fn seminorm_of_extremal_is_sharp() {
    for (rho, p) in [(dipole_line(), 2.0), (three_atom(), 2.0), (three_atom(), 3.0), (three_atom(), 1.5)] {
        let e = exp(p);
        let v = extremal_1d(&rho, &e).unwrap();
        let found = seminorm(&v, &rho, &e, &search()).unwrap();
        let c = best_constant_1d(&rho, &e).unwrap();
        assert!((found.value / v.gradient_norm(p) - c).abs() < 1e-6 * c, "p = {p}");
    }
    // For the ramp the maximizer is the identity up to the reflection x ↦ 1 - x.
    let v = extremal_1d(&dipole_line(), &exp(2.0)).unwrap();
    let found = seminorm(&v, &dipole_line(), &exp(2.0), &search()).unwrap();
    assert!((found.argmax.scale() - 1.0).abs() < 1e-6);
}

#[test]
fn generalized_morrey_inequality() {
    let mut r = rng(5);
    for (rho, p) in [(three_atom(), 2.0), (dipole_line(), 3.0), (three_atom(), 1.5)] {
        let e = exp(p);
        let c = best_constant_1d(&rho, &e).unwrap();
        for _ in 0..50 {
            let w = random_piecewise(&mut r, -2.0, 2.0, 6);
            let s = seminorm(&w, &rho, &e, &search()).unwrap();
            assert!(s.value <= c * w.gradient_norm(p) + 1e-8, "{} > {}", s.value, c * w.gradient_norm(p));
        }
    }
}

#[test]
fn extremal_minimizes_energy_under_constraint() {
    let mut r = rng(9);
    for (rho, p) in [(three_atom(), 2.0), (three_atom(), 4.0), (dipole_line(), 1.5)] {
        let e = exp(p);
        let v = extremal_1d(&rho, &e).unwrap();
        let target = integrate(&v, &rho).unwrap();
        for _ in 0..50 {
            let w = random_piecewise(&mut r, -1.5, 1.5, 7);
            let pairing = integrate(&w, &rho).unwrap();
            if pairing.abs() < 1e-3 {
                continue;
            }
            let w = w.scaled(target / pairing);
            assert!(v.gradient_norm(p) <= w.gradient_norm(p) + 1e-12);
        }
    }
}

#[test]
fn hats_cover_interval() {
    let hats = hat_tests_uniform(-1.0, 1.0, 5);
    assert_eq!(hats.len(), 5);
    assert_eq!(hats[2].eval(0.0), 1.0);
    assert_eq!(hats[2].eval(0.5), 0.0);
}

proptest! {
    #[test]
    fn far_field_gap_is_total_slope(seed in 0u64..500, p in 1.1f64..8.0) {
        let rho = random_measure_line(&mut rng(seed), 5);
        let e = exp(p);
        let v = extremal_1d(&rho, &e).unwrap();
        let (left, right) = farfield_limits_1d(&v);
        prop_assert_eq!(left, 0.0);
        let slope_integral = v.derivative().integral();
        prop_assert!((right - left - slope_integral).abs() <= 1e-12 * (1.0 + slope_integral.abs()));
        let radius = rho.support_radius();
        prop_assert_eq!(v.eval(-radius - 1e-9), 0.0);
    }

    #[test]
    fn right_tail_of_distribution_vanishes(seed in 0u64..500) {
        let rho = random_measure_line(&mut rng(seed), 6);
        let f = distribution_function(&rho).unwrap();
        prop_assert!(f.eval(1e6) == 0.0 && f.eval(-1e6) == 0.0);
        // On the last interval F is minus the weight of the rightmost atom.
        let last = f.values()[f.values().len() - 1];
        let rightmost = rho.atoms().iter().max_by(|a, b| a.location[0].total_cmp(&b.location[0])).unwrap();
        let top = rho.atoms().iter().map(|a| a.weight.abs()).fold(0.0, f64::max);
        prop_assert!((last + rightmost.weight).abs() <= 1e-12 * top);
    }
}
