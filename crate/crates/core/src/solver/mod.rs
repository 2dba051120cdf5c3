//! Grid extremals for `n ≥ 2`.
//!
//! Minimizes the discrete energy `E(u)` of [`energy`] over nodal fields with
//! `⟨m_h, u⟩ = 1`, where `m_h` is the multilinear splat of `μ`. A minimizer
//! satisfies `(1/p)∇E = c·m_h` with `c = E(u)`, the discrete form of
//! `-Δ_p u = c μ`. Because `E` is `p`-homogeneous and the constraint is
//! linear, any iterate can be put back on the constraint by rescaling.

mod energy;
mod grid;
mod reports;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldError;
use crate::measure::{Exponent, SignedMeasure};
use crate::par;
use crate::seminorm::{seminorm, SearchConfig, SeminormError};
use crate::similarity::Similarity;

pub use energy::{corner_gradients, corner_weight, energy, energy_gradient};
pub use grid::{splat, Grid, GridField, Splat};
pub use reports::{check_bounds, el_residual, farfield_check, BoundsReport, FarfieldReport};

use energy::{energy_gradient_of, energy_of, Linearization};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("atom {point:?} is not strictly inside the grid box")]
    AtomOutsideBox { point: Vec<f64> },
    #[error("the grid solver supports n = 2 and n = 3, got n = {0}")]
    UnsupportedDimension(usize),
    #[error("constraint pairing {pairing} is degenerate")]
    ConstraintDegenerate { pairing: f64 },
    #[error("no convergence after {iterations} iterations (EL residual {el_residual})")]
    MaxIterations { iterations: usize, el_residual: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Seminorm(#[from] SeminormError),
}

/// Box and resolution for [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Half-width `L` of `[-L, L]ⁿ`; defaults to three support radii.
    pub half_width: Option<f64>,
    /// Nodes per axis.
    pub resolution: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            half_width: None,
            resolution: 97,
        }
    }
}

impl GridConfig {
    /// Builds the grid, requiring `L > 2·support_radius(μ)`.
    pub fn grid_for(&self, mu: &SignedMeasure) -> Result<Grid, SolverError> {
        let r = mu.support_radius();
        let l = self.half_width.unwrap_or(3.0 * r);
        if l.is_nan() || l <= 2.0 * r {
            return Err(SolverError::InvalidGrid(format!(
                "half-width {l} must exceed twice the support radius {r}"
            )));
        }
        Grid::centered(mu.dim(), l, self.resolution)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Damped Newton steps solved by projected conjugate gradients.
    NewtonCg,
    /// Projected gradient steps with backtracking.
    GradientDescent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    /// The `p = 2` constrained minimizer.
    Poisson,
    /// The splatted measure after five damped Jacobi sweeps.
    SmoothedSplat,
    /// Uniform noise in `[-1, 1]` from the configured seed.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    pub init: Init,
    pub seed: u64,
    /// Stop when the relative energy decrease over `window` iterations falls
    /// below `tol`.
    pub tol: f64,
    /// Defaults to 5 for Newton and 100 for gradient descent.
    pub window: Option<usize>,
    /// Stop once the EL residual is at most this.
    pub residual_tol: f64,
    pub max_iter: usize,
    /// Conjugate-gradient iterations per Newton step.
    pub max_cg: usize,
    /// Relative isotropic shift added to the Hessian.
    pub regularization: f64,
    /// Search used for the seminorm of the result.
    pub search: SearchConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: Method::NewtonCg,
            init: Init::Poisson,
            seed: 0,
            tol: 1e-10,
            window: None,
            residual_tol: 1e-10,
            max_iter: 200_000,
            max_cg: 5_000,
            regularization: 1e-8,
            search: SearchConfig {
                keep_trace: false,
                ..SearchConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Residual,
    EnergyStagnation,
    /// No step along the search direction lowers `E` in floating point.
    LineSearchExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalResult {
    /// Normalized so that `⟨m_h, u⟩ = 1` and the nodal mean is zero.
    pub field: GridField,
    pub multiplier: f64,
    pub energy: f64,
    pub seminorm_value: f64,
    pub cstar_estimate: f64,
    pub maximizer: Similarity,
    pub iterations: usize,
    pub el_residual: f64,
    pub energy_history: Vec<f64>,
    pub stop: StopReason,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    par::sum_indexed(a.len(), |i| a[i] * b[i])
}

/// Orthogonal projection onto `{d : Σ d = 0, ⟨m̂, d⟩ = 0}` with `m̂` the
/// mean-free part of `m_h`.
struct Tangent {
    m: Vec<f64>,
    m_norm2: f64,
}

impl Tangent {
    fn new(dense: &[f64]) -> Tangent {
        let mean = dense.iter().sum::<f64>() / dense.len() as f64;
        let m: Vec<f64> = dense.iter().map(|v| v - mean).collect();
        let m_norm2 = dot(&m, &m);
        Tangent { m, m_norm2 }
    }

    /// Projection onto mean-free vectors only.
    fn mean_free() -> Tangent {
        Tangent { m: Vec::new(), m_norm2: 0.0 }
    }

    fn project(&self, v: &mut [f64]) {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        if self.m.is_empty() {
            v.iter_mut().for_each(|x| *x -= mean);
            return;
        }
        let a = dot(&self.m, v) / self.m_norm2;
        for (vi, mi) in v.iter_mut().zip(&self.m) {
            *vi -= mean + a * mi;
        }
    }
}

/// Projected Jacobi-preconditioned CG for `P H P x = P rhs`.
fn pcg(
    lin: &Linearization,
    tangent: &Tangent,
    rhs: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Vec<f64> {
    let inv_diag: Vec<f64> = lin
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 0.0 })
        .collect();
    let precondition = |r: &[f64]| {
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, b)| a * b).collect();
        tangent.project(&mut z);
        z
    };
    let mut x = vec![0.0; rhs.len()];
    let mut r = rhs.to_vec();
    tangent.project(&mut r);
    let r0 = dot(&r, &r).sqrt();
    if r0 == 0.0 {
        return x;
    }
    let mut z = precondition(&r);
    let mut dir = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..max_iter {
        let mut hd = lin.apply(&dir);
        tangent.project(&mut hd);
        let curvature = dot(&dir, &hd);
        if curvature <= 0.0 {
            break;
        }
        let alpha = rz / curvature;
        for i in 0..x.len() {
            x[i] += alpha * dir[i];
            r[i] -= alpha * hd[i];
        }
        if dot(&r, &r).sqrt() <= rel_tol * r0 {
            break;
        }
        z = precondition(&r);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..dir.len() {
            dir[i] = z[i] + beta * dir[i];
        }
    }
    x
}

/// Rescales to `⟨m_h, u⟩ = 1` and removes the nodal mean.
fn normalize(values: &mut [f64], splat: &Splat) -> Result<(), SolverError> {
    let pairing = splat.pair(values);
    if pairing.is_nan() || pairing.abs() < 1e-14 {
        return Err(SolverError::ConstraintDegenerate { pairing });
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    for v in values.iter_mut() {
        *v = (*v - mean) / pairing;
    }
    Ok(())
}

fn residual_from_gradient(grad: &[f64], m: &[f64], c: f64, p: f64) -> f64 {
    grad.iter()
        .zip(m)
        .map(|(g, mj)| (g / p - c * mj).abs())
        .fold(0.0, f64::max)
        / c.abs()
}

fn initial_values(
    grid: &Grid,
    splat: &Splat,
    cfg: &SolverConfig,
) -> Result<Vec<f64>, SolverError> {
    let dense = splat.dense(grid.node_count());
    let mut values = match cfg.init {
        Init::Poisson => {
            let zero = vec![0.0; grid.node_count()];
            let lin = Linearization::new(grid, &zero, 2.0, 0.0);
            pcg(&lin, &Tangent::mean_free(), &dense, 1e-12, cfg.max_cg.max(grid.node_count()))
        }
        Init::SmoothedSplat => {
            let zero = vec![0.0; grid.node_count()];
            let lin = Linearization::new(grid, &zero, 2.0, 0.0);
            let diag = lin.diagonal();
            let mut u: Vec<f64> = dense.iter().zip(&diag).map(|(m, d)| m / d).collect();
            for _ in 0..5 {
                let hu = lin.apply(&u);
                for j in 0..u.len() {
                    u[j] += (2.0 / 3.0) * (dense[j] - hu[j]) / diag[j];
                }
            }
            u
        }
        Init::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..grid.node_count()).map(|_| rng.gen_range(-1.0..1.0)).collect()
        }
    };
    normalize(&mut values, splat)?;
    Ok(values)
}

struct Descent {
    values: Vec<f64>,
    energy: f64,
    el_residual: f64,
    history: Vec<f64>,
    stop: StopReason,
}

fn descend(
    grid: &Grid,
    splat: &Splat,
    exp: &Exponent,
    cfg: &SolverConfig,
) -> Result<Descent, SolverError> {
    let p = exp.p();
    let m = splat.dense(grid.node_count());
    let tangent = Tangent::new(&m);
    let mut u = initial_values(grid, splat, cfg)?;
    let mut e = energy_of(grid, &u, p);
    let mut history = vec![e];
    let window = cfg.window.unwrap_or(match cfg.method {
        Method::NewtonCg => 5,
        Method::GradientDescent => 100,
    });
    let mut el = f64::INFINITY;
    for iter in 0..cfg.max_iter {
        let grad = energy_gradient_of(grid, &u, p);
        el = residual_from_gradient(&grad, &m, e, p);
        if el <= cfg.residual_tol {
            return Ok(Descent { values: u, energy: e, el_residual: el, history, stop: StopReason::Residual });
        }
        if iter >= window {
            let before = history[iter - window];
            if (before - e) <= cfg.tol * e {
                return Ok(Descent {
                    values: u,
                    energy: e,
                    el_residual: el,
                    history,
                    stop: StopReason::EnergyStagnation,
                });
            }
        }
        let mut neg = grad.iter().map(|g| -g).collect::<Vec<_>>();
        tangent.project(&mut neg);
        let (dir, first_step) = match cfg.method {
            Method::NewtonCg => {
                let lin = Linearization::new(grid, &u, p, cfg.regularization);
                let forcing = el.sqrt().clamp(1e-6, 0.1);
                (pcg(&lin, &tangent, &neg, forcing, cfg.max_cg), 1.0)
            }
            Method::GradientDescent => {
                let gmax = energy::corner_gradients_of(grid, &u)
                    .iter()
                    .map(|g| energy::dot(g, g).sqrt())
                    .fold(0.0, f64::max);
                let h = grid.spacing();
                let step = h.powi(2 - grid.dim() as i32) / (p * gmax.powf(p - 2.0));
                (neg, step)
            }
        };
        let slope = dot(&grad, &dir);
        if slope.is_nan() || slope >= 0.0 {
            return Ok(Descent { values: u, energy: e, el_residual: el, history, stop: StopReason::LineSearchExhausted });
        }
        let mut t = first_step;
        let mut accepted = None;
        for _ in 0..=40 {
            let mut trial: Vec<f64> = u.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
            if normalize(&mut trial, splat).is_ok() {
                let et = energy_of(grid, &trial, p);
                if et <= e + 1e-4 * t * slope && et < e {
                    accepted = Some((trial, et));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, et)) => {
                u = trial;
                e = et;
                history.push(e);
            }
            None => {
                return Ok(Descent { values: u, energy: e, el_residual: el, history, stop: StopReason::LineSearchExhausted });
            }
        }
    }
    Err(SolverError::MaxIterations {
        iterations: cfg.max_iter,
        el_residual: el,
    })
}

/// Approximates the extremal of `μ` on the configured grid, then estimates
/// `[u]_μ` and `C* ≈ [u]_μ / ‖Du‖_p`.
pub fn minimize(
    mu: &SignedMeasure,
    exp: &Exponent,
    grid_cfg: &GridConfig,
    cfg: &SolverConfig,
) -> Result<ExtremalResult, SolverError> {
    if mu.dim() != exp.n() {
        return Err(SolverError::Field(FieldError::DimensionMismatch {
            field: exp.n(),
            measure: mu.dim(),
        }));
    }
    if exp.n() < 2 {
        return Err(SolverError::UnsupportedDimension(exp.n()));
    }
    let grid = grid_cfg.grid_for(mu)?;
    let sp = splat(mu, &grid)?;
    let d = descend(&grid, &sp, exp, cfg)?;
    let field = GridField::new(grid, d.values)?;
    let search = seminorm(&field, mu, exp, &cfg.search)?;
    Ok(ExtremalResult {
        cstar_estimate: search.value / d.energy.powf(1.0 / exp.p()),
        seminorm_value: search.value,
        maximizer: search.argmax,
        multiplier: d.energy,
        energy: d.energy,
        iterations: d.history.len() - 1,
        el_residual: d.el_residual,
        energy_history: d.history,
        stop: d.stop,
        field,
    })
}
