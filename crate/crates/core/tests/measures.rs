mod common;

use common::{dipole_line, three_atom};
use morrey_core::measure::point_from_slice;
use morrey_core::{
    integrate, FnField, MeasureError, Orientation, PiecewiseLinear, Region, SignedMeasure, Similarity,
};
use proptest::prelude::*;

#[test]
fn validation_examples() {
    assert_eq!(dipole_line().first_moment()[0], 1.0);
    assert_eq!(three_atom().first_moment()[0], 3.0);
    let symmetric = SignedMeasure::new(1, &[(vec![-1.0], 1.0), (vec![1.0], 1.0), (vec![0.0], -2.0)]);
    assert!(matches!(symmetric, Err(MeasureError::ZeroFirstMoment { .. })));
    let plane = SignedMeasure::dipole(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
    assert_eq!(plane.first_moment(), point_from_slice(&[1.0, 0.0]));
}

#[test]
fn pushforward_examples() {
    let rho = three_atom();
    assert_eq!(Similarity::identity(1).pushforward(&rho), rho);
    let s = Similarity::line(2.0, false, 1.0).unwrap();
    let expect = SignedMeasure::dipole(&[3.0], &[1.0]).unwrap();
    assert!(s.pushforward(&dipole_line()).approx_eq(&expect, 0.0));
    assert_eq!(s.apply(&point_from_slice(&[3.0]))[0], 7.0);
}

#[test]
fn integrate_examples() {
    let rho = three_atom();
    let constant = FnField::new(1, Region::cube(1, 2.0), |_| 4.25);
    assert_eq!(integrate(&constant, &rho).unwrap(), 0.0);
    let ramp = PiecewiseLinear::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
    assert_eq!(integrate(&ramp, &dipole_line()).unwrap(), 1.0);
    // Extremal of the three-atom measure at p = 2: nodes 0, 1, 3.
    let v = PiecewiseLinear::new(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 3.0]).unwrap();
    assert_eq!(integrate(&v, &rho).unwrap(), 5.0);
}

#[test]
fn group_examples() {
    let id = Similarity::identity(2);
    assert_eq!(id.inverse(), id);
    let s = Similarity::from_orientation(
        2,
        1.7,
        &Orientation::identity(2).with_chart(&[0.4, 1.0]),
        point_from_slice(&[0.3, -2.0]),
    );
    assert!(s.compose(&s.inverse()).approx_eq(&id, 1e-12));
}

fn similarity_strategy(dim: usize) -> impl Strategy<Value = Similarity> {
    (
        -2.0f64..2.0,
        prop::collection::vec(-3.2f64..3.2, 3),
        any::<bool>(),
        prop::collection::vec(-3.0f64..3.0, dim),
    )
        .prop_map(move |(log_scale, angles, flip, shift)| {
            let mut chart: Vec<f64> = match dim {
                1 => vec![],
                2 => vec![angles[0]],
                _ => angles.clone(),
            };
            chart.push(if flip { 1.0 } else { 0.0 });
            let o = Orientation::identity(dim).with_chart(&chart);
            Similarity::from_orientation(dim, log_scale.exp(), &o, point_from_slice(&shift))
        })
}

fn measure_strategy(dim: usize) -> impl Strategy<Value = SignedMeasure> {
    prop::collection::vec((prop::collection::vec(-2.0f64..2.0, dim), 0.1f64..2.0), 1..4)
        .prop_filter_map("degenerate", move |pos| {
            let mut atoms: Vec<(Vec<f64>, f64)> = pos.clone();
            let total: f64 = atoms.iter().map(|a| a.1).sum();
            let mut anchor = vec![0.0; dim];
            anchor[0] = -2.5;
            atoms.push((anchor, -total));
            SignedMeasure::new(dim, &atoms).ok()
        })
}

proptest! {
    #[test]
    fn pushforward_scales_moment(
        (s, rho) in (1usize..=3).prop_flat_map(|d| (similarity_strategy(d), measure_strategy(d)))
    ) {
        let image = s.pushforward(&rho);
        let total: f64 = image.atoms().iter().map(|a| a.weight).sum();
        let mut mapped: Vec<f64> = image.atoms().iter().map(|a| a.weight).collect();
        let mut orig: Vec<f64> = rho.atoms().iter().map(|a| a.weight).collect();
        mapped.sort_by(f64::total_cmp);
        orig.sort_by(f64::total_cmp);
        prop_assert_eq!(mapped, orig);
        prop_assert!(total.abs() <= 1e-12 * rho.total_variation());
        let expect = s.scale() * (s.orthogonal() * rho.first_moment());
        prop_assert!((image.first_moment() - expect).norm() <= 1e-10 * expect.norm());
        prop_assert!((image.first_moment().norm() - s.scale() * rho.first_moment().norm()).abs()
            <= 1e-10 * expect.norm());
    }

    #[test]
    fn composition_stays_similar(a in similarity_strategy(3), b in similarity_strategy(3)) {
        let c = a.compose(&b);
        prop_assert!(c.orthogonality_defect() <= 1e-12);
        prop_assert!(c.scale() > 0.0);
        let x = point_from_slice(&[0.3, -1.1, 2.0]);
        prop_assert!((c.apply(&x) - a.apply(&b.apply(&x))).norm() <= 1e-12 * (1.0 + c.apply(&x).norm()));
    }

    #[test]
    fn integrate_ignores_constants(rho in measure_strategy(2), k in -50.0f64..50.0, a in -3.0f64..3.0) {
        let region = Region::cube(2, 3.0);
        let u = FnField::new(2, region, move |x| (a * x[0]).sin() + x[1] * x[1]);
        let shifted = FnField::new(2, region, move |x| (a * x[0]).sin() + x[1] * x[1] + k);
        let base = integrate(&u, &rho).unwrap();
        let moved = integrate(&shifted, &rho).unwrap();
        prop_assert!((base - moved).abs() <= 1e-10 * (base.abs() + k.abs() * rho.total_variation()).max(1e-300));
    }
}
