//! Exact arithmetic on one-dimensional piecewise-constant and
//! piecewise-linear functions.
//!
//! Every integral here is a finite interval sum; there is no quadrature.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, Region, ScalarField};
use crate::measure::{point_from_slice, Point};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PiecewiseError {
    #[error("breakpoints must be finite and strictly increasing")]
    Unsorted,
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("at least one breakpoint is required")]
    Empty,
}

/// `sign(x)·|x|^e`, with `0 ↦ 0` for every exponent.
pub fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(e)
    }
}

/// `|s|^e · dx`, switching to log space when `|s|^e` alone would overflow or
/// underflow.
pub fn abs_pow_times(s: f64, e: f64, dx: f64) -> f64 {
    let a = s.abs();
    if a == 0.0 || dx == 0.0 {
        return 0.0;
    }
    let log_pow = e * a.ln();
    if log_pow.abs() < 600.0 {
        a.powf(e) * dx
    } else {
        (log_pow + dx.ln()).exp()
    }
}

fn check_breakpoints(b: &[f64]) -> Result<(), PiecewiseError> {
    if b.is_empty() {
        return Err(PiecewiseError::Empty);
    }
    if b.iter().any(|x| !x.is_finite()) || b.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PiecewiseError::Unsorted);
    }
    Ok(())
}

/// Sorted union of two breakpoint lists.
pub fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().chain(b).copied().collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// A step function, zero on both unbounded tails, right-continuous: the value
/// on `[xᵢ, xᵢ₊₁)` is `values[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseSpec", into = "PiecewiseSpec")]
pub struct PiecewiseConstant {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

/// Continuous, linear between breakpoints, constant on both tails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseSpec", into = "PiecewiseSpec")]
pub struct PiecewiseLinear {
    breakpoints: Vec<f64>,
    nodes: Vec<f64>,
}

/// JSON form shared by both piecewise types: `{"breakpoints": [..], "values": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseSpec {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl TryFrom<PiecewiseSpec> for PiecewiseConstant {
    type Error = PiecewiseError;
    fn try_from(s: PiecewiseSpec) -> Result<Self, Self::Error> {
        PiecewiseConstant::new(s.breakpoints, s.values)
    }
}

impl From<PiecewiseConstant> for PiecewiseSpec {
    fn from(f: PiecewiseConstant) -> Self {
        PiecewiseSpec {
            breakpoints: f.breakpoints,
            values: f.values,
        }
    }
}

impl TryFrom<PiecewiseSpec> for PiecewiseLinear {
    type Error = PiecewiseError;
    fn try_from(s: PiecewiseSpec) -> Result<Self, Self::Error> {
        PiecewiseLinear::new(s.breakpoints, s.values)
    }
}

impl From<PiecewiseLinear> for PiecewiseSpec {
    fn from(f: PiecewiseLinear) -> Self {
        PiecewiseSpec {
            breakpoints: f.breakpoints,
            values: f.nodes,
        }
    }
}

impl PiecewiseConstant {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, PiecewiseError> {
        check_breakpoints(&breakpoints)?;
        if values.len() + 1 != breakpoints.len() {
            return Err(PiecewiseError::Length {
                expected: breakpoints.len() - 1,
                got: values.len(),
            });
        }
        Ok(PiecewiseConstant {
            breakpoints,
            values,
        })
    }

    pub fn zero() -> Self {
        PiecewiseConstant {
            breakpoints: vec![0.0],
            values: vec![],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        let b = &self.breakpoints;
        if x < b[0] || x >= b[b.len() - 1] {
            return 0.0;
        }
        // first index with b[i] > x, minus one
        let i = b.partition_point(|&t| t <= x) - 1;
        self.values[i]
    }

    /// `(xᵢ, xᵢ₊₁, value)` for each bounded interval.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    /// `∫ |f|^e dx`.
    pub fn integral_abs_pow(&self, e: f64) -> f64 {
        self.intervals()
            .map(|(a, b, v)| abs_pow_times(v, e, b - a))
            .sum()
    }

    /// `‖f‖_e`.
    pub fn norm(&self, e: f64) -> f64 {
        self.integral_abs_pow(e).powf(1.0 / e)
    }

    /// `∫ f dx`.
    pub fn integral(&self) -> f64 {
        self.intervals().map(|(a, b, v)| v * (b - a)).sum()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> PiecewiseConstant {
        PiecewiseConstant {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Re-expresses the function on a finer, sorted breakpoint list that
    /// contains the current one.
    pub fn on_breakpoints(&self, breakpoints: &[f64]) -> PiecewiseConstant {
        let values = breakpoints
            .windows(2)
            .map(|w| self.eval(0.5 * (w[0] + w[1])))
            .collect();
        PiecewiseConstant {
            breakpoints: breakpoints.to_vec(),
            values,
        }
    }

    /// Pointwise combination on the merged breakpoints.
    pub fn zip_with(
        &self,
        other: &PiecewiseConstant,
        f: impl Fn(f64, f64) -> f64,
    ) -> PiecewiseConstant {
        let merged = merge_breakpoints(&self.breakpoints, &other.breakpoints);
        let values = merged
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                f(self.eval(mid), other.eval(mid))
            })
            .collect();
        PiecewiseConstant {
            breakpoints: merged,
            values,
        }
    }

    /// `∫ f g dx`, exact.
    pub fn inner(&self, other: &PiecewiseConstant) -> f64 {
        self.zip_with(other, |a, b| a * b).integral()
    }
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<f64>, nodes: Vec<f64>) -> Result<Self, PiecewiseError> {
        check_breakpoints(&breakpoints)?;
        if nodes.len() != breakpoints.len() {
            return Err(PiecewiseError::Length {
                expected: breakpoints.len(),
                got: nodes.len(),
            });
        }
        if nodes.iter().any(|v| !v.is_finite()) {
            return Err(PiecewiseError::Unsorted);
        }
        Ok(PiecewiseLinear { breakpoints, nodes })
    }

    /// Integrates a slope profile starting from `left` on the left tail.
    pub fn from_slopes(left: f64, slopes: &PiecewiseConstant) -> PiecewiseLinear {
        let mut nodes = Vec::with_capacity(slopes.breakpoints.len());
        let mut acc = left;
        nodes.push(acc);
        for (a, b, s) in slopes.intervals() {
            acc += s * (b - a);
            nodes.push(acc);
        }
        PiecewiseLinear {
            breakpoints: slopes.breakpoints.clone(),
            nodes,
        }
    }

    /// Hat function: zero outside `[left, right]`, height at `peak`.
    pub fn hat(left: f64, peak: f64, right: f64, height: f64) -> Result<Self, PiecewiseError> {
        PiecewiseLinear::new(vec![left, peak, right], vec![0.0, height, 0.0])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn left_tail(&self) -> f64 {
        self.nodes[0]
    }

    pub fn right_tail(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let b = &self.breakpoints;
        let last = b.len() - 1;
        if x <= b[0] {
            return self.nodes[0];
        }
        if x >= b[last] {
            return self.nodes[last];
        }
        let i = b.partition_point(|&t| t <= x) - 1;
        let t = (x - b[i]) / (b[i + 1] - b[i]);
        self.nodes[i] + t * (self.nodes[i + 1] - self.nodes[i])
    }

    /// Derivative as a step function (zero on the tails).
    pub fn derivative(&self) -> PiecewiseConstant {
        let values = self
            .breakpoints
            .windows(2)
            .zip(self.nodes.windows(2))
            .map(|(b, v)| (v[1] - v[0]) / (b[1] - b[0]))
            .collect();
        PiecewiseConstant {
            breakpoints: self.breakpoints.clone(),
            values,
        }
    }

    /// `∫ |v'|^e dx`.
    pub fn gradient_energy(&self, e: f64) -> f64 {
        self.derivative().integral_abs_pow(e)
    }

    /// `‖v'‖_e`.
    pub fn gradient_norm(&self, e: f64) -> f64 {
        self.derivative().norm(e)
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> PiecewiseLinear {
        PiecewiseLinear {
            breakpoints: self.breakpoints.clone(),
            nodes: self.nodes.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, t: f64) -> PiecewiseLinear {
        self.map_values(|v| t * v)
    }

    pub fn shifted(&self, c: f64) -> PiecewiseLinear {
        self.map_values(|v| v + c)
    }

    /// Pointwise linear combination `a·self + b·other`, exact on merged breakpoints.
    pub fn combine(&self, a: f64, other: &PiecewiseLinear, b: f64) -> PiecewiseLinear {
        let merged = merge_breakpoints(&self.breakpoints, &other.breakpoints);
        let nodes = merged
            .iter()
            .map(|&x| a * self.eval(x) + b * other.eval(x))
            .collect();
        PiecewiseLinear {
            breakpoints: merged,
            nodes,
        }
    }

    /// `x ↦ self(s·x + z)` for `s ≠ 0`.
    pub fn compose_affine(&self, s: f64, z: f64) -> PiecewiseLinear {
        let mut pairs: Vec<(f64, f64)> = self
            .breakpoints
            .iter()
            .zip(&self.nodes)
            .map(|(&x, &v)| ((x - z) / s, v))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        PiecewiseLinear {
            breakpoints: pairs.iter().map(|p| p.0).collect(),
            nodes: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// `count` evenly spaced samples on `[lo, hi]`.
    pub fn sample(&self, lo: f64, hi: f64, count: usize) -> Vec<(f64, f64)> {
        let count = count.max(2);
        (0..count)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (count - 1) as f64;
                (x, self.eval(x))
            })
            .collect()
    }
}

impl ScalarField for PiecewiseLinear {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &Point) -> Result<f64, FieldError> {
        Ok(self.eval(x[0]))
    }

    fn gradient(&self, x: &Point) -> Result<Point, FieldError> {
        Ok(point_from_slice(&[self.derivative().eval(x[0])]))
    }

    fn region(&self) -> Region {
        Region {
            lo: point_from_slice(&[self.breakpoints[0]]),
            hi: point_from_slice(&[self.breakpoints[self.breakpoints.len() - 1]]),
        }
    }
}
