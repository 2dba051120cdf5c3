#![allow(dead_code)]

use morrey_core::{PiecewiseLinear, SignedMeasure};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `δ₁ - δ₀`.
pub fn dipole_line() -> SignedMeasure {
    SignedMeasure::dipole(&[1.0], &[0.0]).unwrap()
}

/// `2δ₁ - δ₀ - δ₋₁`.
pub fn three_atom() -> SignedMeasure {
    SignedMeasure::new(1, &[(vec![1.0], 2.0), (vec![0.0], -1.0), (vec![-1.0], -1.0)]).unwrap()
}

/// `δ_(1,0) - δ_(-1,0)`.
pub fn dipole_plane() -> SignedMeasure {
    SignedMeasure::dipole(&[1.0, 0.0], &[-1.0, 0.0]).unwrap()
}

/// `clamp(x, 0, 1)`.
pub fn ramp() -> PiecewiseLinear {
    PiecewiseLinear::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap()
}

/// Continuous piecewise-linear function with `k` breakpoints spread over
/// `[lo, hi]` and node values in `[-1, 1]`.
pub fn random_piecewise(rng: &mut ChaCha8Rng, lo: f64, hi: f64, k: usize) -> PiecewiseLinear {
    let mut xs: Vec<f64> = (0..k).map(|_| rng.gen_range(lo..hi)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let vs = xs.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    PiecewiseLinear::new(xs, vs).unwrap()
}

/// Random zero-mass measure on the line with `k ≥ 2` atoms in `[-2, 2]`.
pub fn random_measure_line(rng: &mut ChaCha8Rng, k: usize) -> SignedMeasure {
    loop {
        let mut atoms: Vec<(Vec<f64>, f64)> = (0..k - 1)
            .map(|_| (vec![rng.gen_range(-2.0..2.0)], rng.gen_range(-1.0..1.0)))
            .collect();
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        atoms.push((vec![rng.gen_range(-2.0..2.0)], -total));
        if let Ok(rho) = SignedMeasure::new(1, &atoms) {
            if rho.first_moment().norm() > 0.1 {
                return rho;
            }
        }
    }
}
