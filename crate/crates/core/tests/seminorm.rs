mod common;

use common::{dipole_line, dipole_plane, ramp, random_measure_line, random_piecewise, rng, three_atom};
use morrey_core::extremal1d::extremal_1d;
use morrey_core::measure::point_from_slice;
use morrey_core::seminorm::{
    comparison_constant, holder_seminorm, holder_seminorm_on_points, ratio, seminorm, HolderSampleConfig,
    SearchConfig,
};
use morrey_core::{Exponent, FnField, Orientation, Point, Region, SignedMeasure, Similarity};
use proptest::prelude::*;

fn exp(p: f64, n: usize) -> Exponent {
    Exponent::new(p, n).unwrap()
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

#[test]
fn ratio_examples() {
    let e = exp(2.0, 1);
    let constant = FnField::new(1, Region::cube(1, 3.0), |_| -2.0);
    let s = Similarity::line(0.7, true, 0.4).unwrap();
    assert_eq!(ratio(&constant, &dipole_line(), &s, &e).unwrap(), 0.0);
    let id = Similarity::identity(1);
    assert_eq!(ratio(&ramp(), &dipole_line(), &id, &e).unwrap(), 1.0);
    let double = Similarity::line(2.0, false, 0.0).unwrap();
    let r = ratio(&ramp(), &dipole_line(), &double, &e).unwrap();
    assert!((r - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn constant_field_has_zero_seminorm() {
    let constant = FnField::new(1, Region::cube(1, 2.0), |_| 3.0);
    let found = seminorm(&constant, &three_atom(), &exp(3.0, 1), &SearchConfig::default()).unwrap();
    assert_eq!(found.value, 0.0);
    assert!(!found.constancy_failure);
}

/// `λ^{1/4-1} |clamp(±λ + z) - clamp(z)|`, the ratio of the ramp against
/// `δ₁ - δ₀` at `p = 4`, maximized over a dense grid.
fn ramp_oracle() -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..=4000 {
        let lambda = (-4.0 + 8.0 * i as f64 / 4000.0f64).exp();
        for j in 0..=400 {
            let z = -2.0 + 4.0 * j as f64 / 400.0;
            for sign in [1.0, -1.0] {
                let pairing = clamp01(sign * lambda + z) - clamp01(z);
                best = best.max(lambda.powf(-0.75) * pairing.abs());
            }
        }
    }
    best
}

#[test]
fn ramp_at_p4_matches_dense_sweep() {
    let e = exp(4.0, 1);
    let found = seminorm(&ramp(), &dipole_line(), &e, &SearchConfig::default()).unwrap();
    let oracle = ramp_oracle();
    assert!((oracle - 1.0).abs() < 1e-12);
    assert!((found.value - oracle).abs() < 1e-8);
    assert!((found.argmax.scale() - 1.0).abs() < 1e-6);
    for entry in &found.search_trace {
        if entry.scale > 1.0 + 1e-9 {
            assert!(entry.ratio <= entry.scale.powf(-0.75) + 1e-15);
            assert!(entry.ratio < 1.0);
        }
    }
}

#[test]
fn trace_is_dominated_by_value() {
    let e = exp(3.0, 1);
    let v = random_piecewise(&mut rng(3), -1.0, 2.0, 8);
    let found = seminorm(&v, &three_atom(), &e, &SearchConfig::default()).unwrap();
    assert_eq!(found.value, found.ratio_at_argmax);
    let again = ratio(&v, &three_atom(), &found.argmax, &e).unwrap();
    assert!((again - found.value).abs() <= 1e-14 * found.value);
    assert!(!found.search_trace.is_empty());
    assert!(found.search_trace.iter().all(|t| t.ratio <= found.value));
}

#[test]
fn comparison_constant_examples() {
    for p in [1.5, 2.0, 9.0] {
        assert_eq!(comparison_constant(&dipole_line(), &exp(p, 1)), 1.0);
    }
    let a = comparison_constant(&three_atom(), &exp(2.0, 1));
    assert!((a - 3.0f64.sqrt()).abs() < 1e-15);
}

#[test]
fn holder_examples() {
    let e = exp(2.0, 1);
    let constant = FnField::new(1, Region::cube(1, 1.0), |_| 0.5);
    assert_eq!(holder_seminorm(&constant, &e, &HolderSampleConfig::default()).unwrap(), 0.0);
    let h = holder_seminorm(&ramp(), &e, &HolderSampleConfig::default()).unwrap();
    assert!((h - 1.0).abs() < 1e-15);
    let pair = [point_from_slice(&[0.0]), point_from_slice(&[1.0])];
    assert_eq!(holder_seminorm_on_points(&ramp(), &pair, &e).unwrap(), 1.0);
}

/// Points `S(yᵢ)` and `S(0)`, on which `[u]_ρ ≤ A·[u]_{1-n/p}` holds
/// ratio by ratio.
fn matched_points(s: &Similarity, rho: &SignedMeasure) -> Vec<Point> {
    let mut pts: Vec<Point> = rho.atoms().iter().map(|a| s.apply(&a.location)).collect();
    pts.push(s.apply(&Point::zeros()));
    pts
}

#[test]
fn comparison_inequality_on_matched_samples() {
    let mut r = rng(21);
    for trial in 0..25 {
        let rho = random_measure_line(&mut r, 4);
        let p = if trial % 2 == 0 { 1.7 } else { 5.0 };
        let e = exp(p, 1);
        let a = comparison_constant(&rho, &e);
        let w = random_piecewise(&mut r, -3.0, 3.0, 9);
        let found = seminorm(&w, &rho, &e, &SearchConfig::default()).unwrap();
        let mut sims = vec![found.argmax];
        sims.extend(found.search_trace.iter().step_by(37).map(|t| {
            Similarity::from_orientation(1, t.scale, &t.orientation, Point::from(t.shift))
        }));
        for s in sims {
            let h = holder_seminorm_on_points(&w, &matched_points(&s, &rho), &e).unwrap();
            let lhs = ratio(&w, &rho, &s, &e).unwrap();
            assert!(lhs <= a * h + 1e-8, "{lhs} > {a} * {h}");
        }
    }
}

#[test]
fn plane_clamp_value() {
    let e = exp(4.0, 2);
    let u = FnField::new(2, Region::cube(2, 3.0), |x| x[0].clamp(-1.0, 1.0));
    let found = seminorm(&u, &dipole_plane(), &e, &SearchConfig::default()).unwrap();
    assert!((found.value - 2.0f64.sqrt()).abs() < 1e-8, "{}", found.value);
    assert!((found.argmax.scale() - 1.0).abs() < 1e-4);
}

fn polish_only() -> SearchConfig {
    SearchConfig {
        keep_trace: false,
        ..SearchConfig::default()
    }
}

#[test]
fn invariance_under_sign_and_constants() {
    let e = exp(3.0, 1);
    let rho = three_atom();
    let v = extremal_1d(&rho, &e).unwrap();
    let base = seminorm(&v, &rho, &e, &polish_only()).unwrap();
    let negated = v.scaled(-1.0);
    let lifted = v.shifted(4.0);
    for w in [&negated, &lifted] {
        let other = seminorm(w, &rho, &e, &polish_only()).unwrap();
        assert!((other.value - base.value).abs() <= 1e-8 * base.value);
        let at_same = ratio(w, &rho, &base.argmax, &e).unwrap();
        assert!((at_same - base.value).abs() <= 1e-12 * base.value);
    }
}

#[test]
fn invariance_under_similarity() {
    // u_T(x) = λ₀^{n/p-1} u(T x) with T x = λ₀ x + z₀.
    let e = exp(3.0, 1);
    let rho = three_atom();
    let v = extremal_1d(&rho, &e).unwrap();
    let (l0, z0) = (2.5, -0.75);
    let t = Similarity::line(l0, false, z0).unwrap();
    let moved = v.compose_affine(l0, z0).scaled(l0.powf(1.0 / 3.0 - 1.0));
    let base = seminorm(&v, &rho, &e, &polish_only()).unwrap();
    let other = seminorm(&moved, &rho, &e, &polish_only()).unwrap();
    assert!((other.value - base.value).abs() <= 1e-8 * base.value);
    let mut r = rng(1);
    for _ in 0..20 {
        use rand::Rng;
        let s = Similarity::line(r.gen_range(0.2..3.0), r.gen_bool(0.5), r.gen_range(-2.0..2.0)).unwrap();
        let a = ratio(&moved, &rho, &s, &e).unwrap();
        let b = ratio(&v, &rho, &t.compose(&s), &e).unwrap();
        assert!((a - b).abs() <= 1e-12 * b.max(1.0));
    }
}

#[test]
fn refined_search_never_loses() {
    let mut r = rng(8);
    for (rho, p) in [(three_atom(), 3.0), (dipole_line(), 1.5)] {
        let e = exp(p, 1);
        let w = random_piecewise(&mut r, -2.0, 2.0, 7);
        let cfg = SearchConfig {
            scale_samples: 9,
            shift_samples: 5,
            polish_starts: 0,
            ..polish_only()
        };
        let mut last = 0.0;
        let mut cfg_k = cfg;
        for _ in 0..3 {
            let v = seminorm(&w, &rho, &e, &cfg_k).unwrap().value;
            assert!(v >= last, "{v} < {last}");
            last = v;
            cfg_k = cfg_k.refined(1);
        }
    }
    let u = FnField::new(2, Region::cube(2, 2.0), |x| (x[0] - 0.3 * x[1]).tanh());
    let e = exp(3.0, 2);
    let cfg = SearchConfig {
        scale_samples: 5,
        shift_samples: 3,
        orientation_samples: Some(4),
        polish_starts: 0,
        ..polish_only()
    };
    let coarse = seminorm(&u, &dipole_plane(), &e, &cfg).unwrap().value;
    let fine = seminorm(&u, &dipole_plane(), &e, &cfg.refined(2)).unwrap().value;
    assert!(fine >= coarse);
}

#[test]
fn corner_ratios_below_value() {
    let e = exp(4.0, 2);
    let u = FnField::new(2, Region::cube(2, 3.0), |x| (x[0] + 0.5 * x[1]).atan());
    let rho = SignedMeasure::new(2, &[(vec![1.0, 0.0], 2.0), (vec![0.0, 1.0], -1.0), (vec![-1.0, -1.0], -1.0)])
        .unwrap();
    let cfg = SearchConfig {
        scale_range: Some((0.01, 100.0)),
        shift_region: Some((vec![-3.0, -3.0], vec![3.0, 3.0])),
        ..polish_only()
    };
    let found = seminorm(&u, &rho, &e, &cfg).unwrap();
    for lambda in [0.01, 100.0] {
        for zx in [-3.0, 3.0] {
            for zy in [-3.0, 3.0] {
                for o in Orientation::samples(2, 16) {
                    let s = Similarity::from_orientation(2, lambda, &o, point_from_slice(&[zx, zy]));
                    assert!(ratio(&u, &rho, &s, &e).unwrap() <= found.value);
                }
            }
        }
    }
}

#[test]
fn empty_config_is_rejected() {
    let cfg = SearchConfig {
        scale_samples: 0,
        ..SearchConfig::default()
    };
    assert!(seminorm(&ramp(), &dipole_line(), &exp(2.0, 1), &cfg).is_err());
}

proptest! {
    #[test]
    fn comparison_constant_is_scale_free(seed in 0u64..1000, t in 0.05f64..20.0, p in 1.1f64..6.0) {
        let rho = random_measure_line(&mut rng(seed), 4);
        let e = exp(p, 1);
        let scaled = Similarity::line(t, false, 0.0).unwrap().pushforward(&rho);
        let (a, b) = (comparison_constant(&rho, &e), comparison_constant(&scaled, &e));
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn ratio_is_invariant_under_constants(
        seed in 0u64..1000, k in -10.0f64..10.0, lambda in 0.1f64..5.0, z in -2.0f64..2.0, flip in any::<bool>()
    ) {
        let mut r = rng(seed);
        let rho = random_measure_line(&mut r, 3);
        let w = random_piecewise(&mut r, -3.0, 3.0, 6);
        let e = exp(2.5, 1);
        let s = Similarity::line(lambda, flip, z).unwrap();
        let a = ratio(&w, &rho, &s, &e).unwrap();
        let b = ratio(&w.shifted(k), &rho, &s, &e).unwrap();
        let c = ratio(&w.scaled(-1.0), &rho, &s, &e).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + k.abs()) * rho.total_variation());
        prop_assert_eq!(a, c);
    }
}
