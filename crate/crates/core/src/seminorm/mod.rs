//! The generalized Morrey seminorm
//!
//! ```text
//! [u]_ρ = sup_S |∫ u d(S#ρ)| / |∫ x d(S#ρ)|^{1-n/p}
//! ```
//!
//! For `S(y) = λOy + z` the denominator is `λ^{1-n/p} |∫ y dρ|^{1-n/p}`,
//! so each ratio costs one field evaluation per atom. The supremum over the
//! similarity group is attained; [`seminorm`] approximates it by a
//! multistart grid over `(λ, O, z)` followed by simplex polishing, and the
//! value it returns is always a ratio actually attained, hence a lower
//! bound.

mod simplex;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, Region, ScalarField};
use crate::measure::{Exponent, Point, SignedMeasure};
use crate::par;
use crate::similarity::{Orientation, Similarity};

use simplex::nelder_mead;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeminormError {
    #[error("search configuration is empty or inconsistent: {0}")]
    EmptySearchConfig(&'static str),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("field dimension {field} does not match exponent dimension {exponent}")]
    DimensionMismatch { field: usize, exponent: usize },
}

/// Sampling and polishing parameters for [`seminorm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// `[λ_min, λ_max]`; defaults to `[0.01·D, 100·D] / diam(supp ρ)` with
    /// `D` the diameter of the field's region.
    pub scale_range: Option<(f64, f64)>,
    /// Log-spaced samples of `λ`, endpoints included.
    pub scale_samples: usize,
    /// Box for the translation `z`; defaults to the field's region.
    pub shift_region: Option<(Vec<f64>, Vec<f64>)>,
    /// Grid points per axis for `z`, endpoints included.
    pub shift_samples: usize,
    /// Samples per connected component of `O(n)`; defaults to 16 for
    /// `n = 2` and 60 for `n = 3` (ignored for `n = 1`).
    pub orientation_samples: Option<usize>,
    /// Number of best grid points handed to the simplex polish.
    pub polish_starts: usize,
    pub polish_iterations: usize,
    pub polish_tolerance: f64,
    /// Record every grid evaluation in the result.
    pub keep_trace: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            scale_range: None,
            scale_samples: 33,
            shift_region: None,
            shift_samples: 9,
            orientation_samples: None,
            polish_starts: 8,
            polish_iterations: 200,
            polish_tolerance: 1e-10,
            keep_trace: true,
        }
    }
}

impl SearchConfig {
    /// Grid with every sample count doubled (minus one), so the original
    /// grid is a subset of the refined one.
    pub fn refined(&self, dim: usize) -> SearchConfig {
        let o = self.orientation_samples.unwrap_or(default_orientations(dim));
        SearchConfig {
            scale_samples: 2 * self.scale_samples - 1,
            shift_samples: 2 * self.shift_samples - 1,
            orientation_samples: Some(if dim == 3 { o } else { 2 * o }),
            ..self.clone()
        }
    }
}

fn default_orientations(dim: usize) -> usize {
    match dim {
        1 => 1,
        2 => 16,
        _ => 60,
    }
}

/// One evaluated similarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub scale: f64,
    pub orientation: Orientation,
    pub shift: [f64; 3],
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeminormResult {
    pub value: f64,
    pub argmax: Similarity,
    pub argmax_orientation: Orientation,
    pub ratio_at_argmax: f64,
    pub search_trace: Vec<TraceEntry>,
    /// Number of ratio evaluations, polish included.
    pub evaluations: usize,
    /// The search returned zero although the field has a nonzero sampled
    /// gradient: a zero seminorm forces a constant field.
    pub constancy_failure: bool,
}

impl SeminormResult {
    /// Writes the trace as CSV with header `scale,orientation...,shift...,ratio`.
    pub fn write_trace_csv(&self, dim: usize, mut out: impl Write) -> io::Result<()> {
        let o_cols = match dim {
            1 => "flip",
            2 => "angle,reflect",
            _ => "rot_x,rot_y,rot_z,reflect",
        };
        let z_cols = ["z_x", "z_y", "z_z"][..dim].join(",");
        writeln!(out, "scale,{o_cols},{z_cols},ratio")?;
        for e in &self.search_trace {
            let o = match e.orientation {
                Orientation::Line { flip } => format!("{}", flip as u8),
                Orientation::Plane { angle, reflect } => format!("{angle},{}", reflect as u8),
                Orientation::Space { rotation, reflect } => format!(
                    "{},{},{},{}",
                    rotation[0], rotation[1], rotation[2], reflect as u8
                ),
            };
            let z: Vec<String> = e.shift[..dim].iter().map(|v| v.to_string()).collect();
            writeln!(out, "{},{},{},{}", e.scale, o, z.join(","), e.ratio)?;
        }
        Ok(())
    }
}

/// Precomputed pieces of the ratio shared by every similarity.
struct RatioKernel<'a> {
    field: &'a dyn ScalarField,
    rho: &'a SignedMeasure,
    denominator: f64,
    scale_power: f64,
}

impl<'a> RatioKernel<'a> {
    fn new(
        field: &'a dyn ScalarField,
        rho: &'a SignedMeasure,
        exp: &Exponent,
    ) -> Result<Self, SeminormError> {
        if field.dim() != exp.n() || rho.dim() != exp.n() {
            return Err(SeminormError::DimensionMismatch {
                field: field.dim(),
                exponent: exp.n(),
            });
        }
        Ok(RatioKernel {
            field,
            rho,
            denominator: rho.first_moment().norm().powf(exp.holder()),
            scale_power: -exp.holder(),
        })
    }

    fn eval(&self, s: &Similarity) -> Result<f64, FieldError> {
        let mut pairing = 0.0;
        for a in self.rho.atoms() {
            pairing += a.weight * self.field.value(&s.apply(&a.location))?;
        }
        Ok(s.scale().powf(self.scale_power) * pairing.abs() / self.denominator)
    }
}

/// `λ^{n/p-1} |Σ wᵢ u(S(yᵢ))| / |Σ wᵢ yᵢ|^{1-n/p}`.
pub fn ratio(
    u: &dyn ScalarField,
    rho: &SignedMeasure,
    s: &Similarity,
    exp: &Exponent,
) -> Result<f64, SeminormError> {
    Ok(RatioKernel::new(u, rho, exp)?.eval(s)?)
}

/// `A = Σ |wᵢ| |yᵢ|^{1-n/p} / |Σ wᵢ yᵢ|^{1-n/p}`, so that
/// `[u]_ρ ≤ A·[u]_{1-n/p}`.
pub fn comparison_constant(rho: &SignedMeasure, exp: &Exponent) -> f64 {
    let a = exp.holder();
    let num: f64 = rho
        .atoms()
        .iter()
        .map(|atom| atom.weight.abs() * atom.location.norm().powf(a))
        .sum();
    num / rho.first_moment().norm().powf(a)
}

/// `max |u(x) - u(y)| / |x - y|^{1-n/p}` over pairs drawn from `points`.
pub fn holder_seminorm_on_points(
    u: &dyn ScalarField,
    points: &[Point],
    exp: &Exponent,
) -> Result<f64, FieldError> {
    let values: Vec<f64> = points
        .iter()
        .map(|x| u.value(x))
        .collect::<Result<_, _>>()?;
    let a = exp.holder();
    let best = par::map_indexed(points.len(), |i| {
        let mut best: f64 = 0.0;
        for j in i + 1..points.len() {
            let d = (points[i] - points[j]).norm();
            if d > 0.0 {
                best = best.max((values[i] - values[j]).abs() / d.powf(a));
            }
        }
        best
    });
    Ok(best.into_iter().fold(0.0, f64::max))
}

/// Sample grid for [`holder_seminorm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderSampleConfig {
    pub points_per_axis: usize,
}

impl Default for HolderSampleConfig {
    fn default() -> Self {
        HolderSampleConfig {
            points_per_axis: 65,
        }
    }
}

/// Uniform grid of `k` points per axis on a region (endpoints included).
pub fn region_grid(region: &Region, dim: usize, k: usize) -> Vec<Point> {
    let k = k.max(1);
    let coord = |axis: usize, i: usize| {
        if k == 1 {
            0.5 * (region.lo[axis] + region.hi[axis])
        } else {
            region.lo[axis] + (region.hi[axis] - region.lo[axis]) * i as f64 / (k - 1) as f64
        }
    };
    let total = k.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = Point::zeros();
            for axis in 0..dim {
                p[axis] = coord(axis, idx % k);
                idx /= k;
            }
            p
        })
        .collect()
}

/// Lower bound on the Hölder seminorm `[u]_{1-n/p}` from all pairs of a
/// uniform grid over the field's region.
pub fn holder_seminorm(
    u: &dyn ScalarField,
    exp: &Exponent,
    cfg: &HolderSampleConfig,
) -> Result<f64, FieldError> {
    let points = region_grid(&u.region(), u.dim(), cfg.points_per_axis);
    holder_seminorm_on_points(u, &points, exp)
}

fn log_spaced(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 || lo == hi {
        return vec![(lo * hi).sqrt()];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..k)
        .map(|i| (a + (b - a) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

/// Candidate ordering: larger ratio wins; near-ties go to smaller `|log λ|`,
/// then smaller `|z|`.
fn better(a: &TraceEntry, b: &TraceEntry) -> bool {
    let tie = 1e-12 * a.ratio.abs().max(b.ratio.abs());
    if (a.ratio - b.ratio).abs() > tie {
        return a.ratio > b.ratio;
    }
    let (la, lb) = (a.scale.ln().abs(), b.scale.ln().abs());
    if (la - lb).abs() > 1e-12 {
        return la < lb;
    }
    shift_norm2(a) < shift_norm2(b) - 1e-24
}

fn shift_norm2(e: &TraceEntry) -> f64 {
    e.shift.iter().map(|v| v * v).sum()
}

fn similarity_of(dim: usize, e: &TraceEntry) -> Similarity {
    Similarity::from_orientation(dim, e.scale, &e.orientation, Point::from(e.shift))
}

/// Searches the similarity group for the supremum defining `[u]_ρ`.
///
/// Similarities that move an atom outside the domain of a grid-backed field
/// are skipped. The returned value is attained by `argmax`.
pub fn seminorm(
    u: &dyn ScalarField,
    rho: &SignedMeasure,
    exp: &Exponent,
    cfg: &SearchConfig,
) -> Result<SeminormResult, SeminormError> {
    let kernel = RatioKernel::new(u, rho, exp)?;
    let dim = exp.n();
    if cfg.scale_samples == 0 || cfg.shift_samples == 0 || cfg.orientation_samples == Some(0) {
        return Err(SeminormError::EmptySearchConfig("sample counts must be at least 1"));
    }
    let region = u.region();
    let (lambda_lo, lambda_hi) = cfg.scale_range.unwrap_or_else(|| {
        let d = region.diameter();
        let d = if d > 0.0 { d } else { 1.0 };
        let diam = rho.diameter();
        (0.01 * d / diam, 100.0 * d / diam)
    });
    if !(lambda_lo > 0.0 && lambda_hi >= lambda_lo && lambda_hi.is_finite()) {
        return Err(SeminormError::EmptySearchConfig("scale range must satisfy 0 < min <= max"));
    }
    let shift_region = match &cfg.shift_region {
        Some((lo, hi)) => {
            if lo.len() != dim || hi.len() != dim || lo.iter().zip(hi).any(|(a, b)| a > b) {
                return Err(SeminormError::EmptySearchConfig("shift region is malformed"));
            }
            Region {
                lo: crate::measure::point_from_slice(lo),
                hi: crate::measure::point_from_slice(hi),
            }
        }
        None => region,
    };

    let scales = log_spaced(lambda_lo, lambda_hi, cfg.scale_samples);
    let shifts = region_grid(&shift_region, dim, cfg.shift_samples);
    let orientations = Orientation::samples(
        dim,
        cfg.orientation_samples.unwrap_or(default_orientations(dim)),
    );

    let total = scales.len() * shifts.len() * orientations.len();
    let grid: Vec<Option<TraceEntry>> = par::map_indexed(total, |idx| {
        let si = idx % scales.len();
        let zi = (idx / scales.len()) % shifts.len();
        let oi = idx / (scales.len() * shifts.len());
        let z = shifts[zi];
        let entry = TraceEntry {
            scale: scales[si],
            orientation: orientations[oi],
            shift: [z[0], z[1], z[2]],
            ratio: 0.0,
        };
        let s = similarity_of(dim, &entry);
        kernel.eval(&s).ok().map(|ratio| TraceEntry { ratio, ..entry })
    });
    let mut trace: Vec<TraceEntry> = grid.into_iter().flatten().collect();
    let mut evaluations = total;
    if trace.is_empty() {
        return Err(SeminormError::EmptySearchConfig(
            "no sampled similarity keeps the measure inside the field domain",
        ));
    }

    // Pick polish starts: best entries under the candidate ordering.
    let mut ranked: Vec<usize> = (0..trace.len()).collect();
    ranked.sort_by(|&a, &b| {
        let (x, y) = (&trace[a], &trace[b]);
        y.ratio
            .total_cmp(&x.ratio)
            .then(x.scale.ln().abs().total_cmp(&y.scale.ln().abs()))
            .then(shift_norm2(x).total_cmp(&shift_norm2(y)))
            .then(a.cmp(&b))
    });
    let mut best = ranked
        .iter()
        .map(|&i| trace[i])
        .take_while(|e| e.ratio >= trace[ranked[0]].ratio * (1.0 - 1e-12))
        .fold(trace[ranked[0]], |acc, e| if better(&e, &acc) { e } else { acc });

    let log_step = if scales.len() > 1 {
        (lambda_hi / lambda_lo).ln() / (scales.len() - 1) as f64
    } else {
        0.5
    };
    let shift_steps: Vec<f64> = (0..dim)
        .map(|a| {
            let w = shift_region.hi[a] - shift_region.lo[a];
            if cfg.shift_samples > 1 && w > 0.0 {
                w / (cfg.shift_samples - 1) as f64
            } else {
                0.1 * region.diameter().max(1.0)
            }
        })
        .collect();
    let angle_step = match dim {
        1 => 0.0,
        2 => std::f64::consts::PI / cfg.orientation_samples.unwrap_or(16) as f64,
        _ => 0.3,
    };

    let starts: Vec<TraceEntry> = ranked
        .iter()
        .take(cfg.polish_starts)
        .map(|&i| trace[i])
        .filter(|e| e.ratio > 0.0)
        .collect();
    let polished = par::map_indexed(starts.len(), |k| {
        let start = starts[k];
        let chart = start.orientation.chart();
        let mut x0 = vec![start.scale.ln()];
        x0.extend(&chart);
        x0.extend(&start.shift[..dim]);
        let mut steps = vec![log_step];
        steps.extend(std::iter::repeat_n(angle_step, chart.len()));
        steps.extend(&shift_steps);
        let n_chart = chart.len();
        let decode = |x: &[f64]| {
            let mut shift = [0.0; 3];
            shift[..dim].copy_from_slice(&x[1 + n_chart..]);
            TraceEntry {
                scale: x[0].exp(),
                orientation: start.orientation.with_chart(&x[1..1 + n_chart]),
                shift,
                ratio: 0.0,
            }
        };
        let out = nelder_mead(
            |x| {
                let e = decode(x);
                match kernel.eval(&similarity_of(dim, &e)) {
                    Ok(r) => -r,
                    Err(_) => f64::INFINITY,
                }
            },
            &x0,
            &steps,
            cfg.polish_iterations,
            cfg.polish_tolerance,
        );
        let e = decode(&out.x);
        let evals = out.iterations * 2 + x0.len() + 1;
        (TraceEntry { ratio: -out.value, ..e }, evals)
    });
    for (entry, evals) in polished {
        evaluations += evals;
        if entry.ratio.is_finite() && better(&entry, &best) {
            best = entry;
        }
    }
    if cfg.keep_trace {
        trace.push(best);
    } else {
        trace.clear();
    }

    let argmax = similarity_of(dim, &best);
    let constancy_failure = best.ratio <= 0.0
        && shifts.iter().any(|z| {
            u.gradient(z)
                .map(|g| g.norm() > 1e-8)
                .unwrap_or(false)
        });

    Ok(SeminormResult {
        value: best.ratio,
        argmax,
        argmax_orientation: best.orientation,
        ratio_at_argmax: best.ratio,
        search_trace: trace,
        evaluations,
        constancy_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::measure::point_from_slice;

    fn ramp() -> crate::piecewise::PiecewiseLinear {
        crate::piecewise::PiecewiseLinear::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap()
    }

    fn dipole() -> SignedMeasure {
        SignedMeasure::dipole(&[1.0], &[0.0]).unwrap()
    }

    #[test]
    fn ratio_of_constant_is_zero() {
        let c = FnField::new(1, Region::cube(1, 1.0), |_: &Point| 3.0);
        let e = Exponent::new(2.0, 1).unwrap();
        for s in [1.0, 0.3, 7.0] {
            let sim = Similarity::line(s, false, 0.2).unwrap();
            assert_eq!(ratio(&c, &dipole(), &sim, &e).unwrap(), 0.0);
        }
    }

    #[test]
    fn ratio_of_ramp() {
        let e = Exponent::new(2.0, 1).unwrap();
        let id = Similarity::identity(1);
        assert_eq!(ratio(&ramp(), &dipole(), &id, &e).unwrap(), 1.0);
        let double = Similarity::line(2.0, false, 0.0).unwrap();
        let r = ratio(&ramp(), &dipole(), &double, &e).unwrap();
        assert!((r - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn comparison_constants() {
        let e = Exponent::new(2.0, 1).unwrap();
        assert_eq!(comparison_constant(&dipole(), &e), 1.0);
        assert_eq!(comparison_constant(&dipole(), &Exponent::new(5.0, 1).unwrap()), 1.0);
        let three = SignedMeasure::new(1, &[(vec![1.0], 2.0), (vec![0.0], -1.0), (vec![-1.0], -1.0)])
            .unwrap();
        assert!((comparison_constant(&three, &e) - 3f64.sqrt()).abs() < 1e-15);
        let scaled = SignedMeasure::new(1, &[(vec![2.5], 2.0), (vec![0.0], -1.0), (vec![-2.5], -1.0)])
            .unwrap();
        assert!((comparison_constant(&scaled, &e) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn holder_of_ramp() {
        let e = Exponent::new(2.0, 1).unwrap();
        let h = holder_seminorm(&ramp(), &e, &HolderSampleConfig::default()).unwrap();
        assert!((h - 1.0).abs() < 1e-15);
        let c = FnField::new(1, Region::cube(1, 1.0), |_: &Point| -2.0);
        assert_eq!(holder_seminorm(&c, &e, &HolderSampleConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn constant_field_has_zero_seminorm() {
        let c = FnField::new(1, Region::cube(1, 1.0), |_: &Point| 3.0);
        let e = Exponent::new(3.0, 1).unwrap();
        let res = seminorm(&c, &dipole(), &e, &SearchConfig::default()).unwrap();
        assert_eq!(res.value, 0.0);
        assert!(!res.constancy_failure);
    }

    #[test]
    fn empty_config_rejected() {
        let e = Exponent::new(3.0, 1).unwrap();
        let cfg = SearchConfig {
            scale_samples: 0,
            ..SearchConfig::default()
        };
        assert!(matches!(
            seminorm(&ramp(), &dipole(), &e, &cfg),
            Err(SeminormError::EmptySearchConfig(_))
        ));
        let cfg = SearchConfig {
            scale_range: Some((1.0, 0.5)),
            ..SearchConfig::default()
        };
        assert!(seminorm(&ramp(), &dipole(), &e, &cfg).is_err());
    }

    #[test]
    fn ramp_maximizer_is_identity() {
        let e = Exponent::new(4.0, 1).unwrap();
        let res = seminorm(&ramp(), &dipole(), &e, &SearchConfig::default()).unwrap();
        assert!((res.value - 1.0).abs() < 1e-12);
        assert!(res.argmax.approx_eq(&Similarity::identity(1), 1e-9));
        assert!(res.search_trace.iter().all(|t| t.ratio <= res.value));
        assert_eq!(res.value, res.ratio_at_argmax);
    }

    #[test]
    fn trace_csv_header() {
        let e = Exponent::new(4.0, 1).unwrap();
        let cfg = SearchConfig {
            scale_samples: 3,
            shift_samples: 2,
            ..SearchConfig::default()
        };
        let res = seminorm(&ramp(), &dipole(), &e, &cfg).unwrap();
        let mut buf = Vec::new();
        res.write_trace_csv(1, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("scale,flip,z_x,ratio\n"));
        assert_eq!(text.lines().count(), 1 + res.search_trace.len());
    }

    #[test]
    fn region_grid_includes_corners() {
        let r = Region::cube(2, 1.0);
        let g = region_grid(&r, 2, 3);
        assert_eq!(g.len(), 9);
        assert!(g.contains(&point_from_slice(&[-1.0, -1.0])));
        assert!(g.contains(&point_from_slice(&[1.0, 1.0])));
        assert!(g.contains(&point_from_slice(&[0.0, 0.0])));
    }
}
