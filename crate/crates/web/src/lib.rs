//! Browser bindings: the closed-form extremal on the line, the ratio
//! landscape over `(ln λ, z)`, and a small grid solve on the plane.

use morrey_core::extremal1d::{best_constant_1d, extremal_1d};
use morrey_core::seminorm::ratio;
use morrey_core::solver::{minimize, GridConfig, SolverConfig};
use morrey_core::{Exponent, MeasureSpec, PiecewiseLinear, SignedMeasure, Similarity};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn parse(measure_json: &str, p: f64) -> Result<(SignedMeasure, Exponent), JsValue> {
    let spec: MeasureSpec = serde_json::from_str(measure_json).map_err(js_err)?;
    let rho = SignedMeasure::try_from(&spec).map_err(js_err)?;
    let exp = Exponent::new(p, rho.dim()).map_err(js_err)?;
    Ok((rho, exp))
}

#[derive(Serialize)]
struct Extremal1d {
    cstar: f64,
    breakpoints: Vec<f64>,
    nodes: Vec<f64>,
}

/// `{"cstar", "breakpoints", "nodes"}` for a measure on the line.
#[wasm_bindgen]
pub fn extremal_line(measure_json: &str, p: f64) -> Result<String, JsValue> {
    let (rho, exp) = parse(measure_json, p)?;
    let v = extremal_1d(&rho, &exp).map_err(js_err)?;
    let out = Extremal1d {
        cstar: best_constant_1d(&rho, &exp).map_err(js_err)?,
        breakpoints: v.breakpoints().to_vec(),
        nodes: v.nodes().to_vec(),
    };
    serde_json::to_string(&out).map_err(js_err)
}

fn bumped_extremal(rho: &SignedMeasure, exp: &Exponent, bump: f64) -> Result<PiecewiseLinear, JsValue> {
    let v = extremal_1d(rho, exp).map_err(js_err)?;
    let b = v.breakpoints();
    let (lo, hi) = (b[0], b[b.len() - 1]);
    let hat = PiecewiseLinear::hat(lo, 0.5 * (lo + hi), hi, 1.0).map_err(js_err)?;
    Ok(v.combine(1.0, &hat, bump))
}

/// Row-major `rows × cols` ratios for the extremal plus `bump` times a hat,
/// with `ln λ` from `-2.5` to `2.5` down the rows and `z` across
/// `[-3R, 3R]`, `R` the support radius. Reflected maps are skipped.
#[wasm_bindgen]
pub fn ratio_landscape(
    measure_json: &str,
    p: f64,
    bump: f64,
    rows: usize,
    cols: usize,
) -> Result<Vec<f64>, JsValue> {
    let (rho, exp) = parse(measure_json, p)?;
    let v = bumped_extremal(&rho, &exp, bump)?;
    let reach = 3.0 * rho.support_radius().max(1.0);
    let (rows, cols) = (rows.max(2), cols.max(2));
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let lambda = (-2.5 + 5.0 * i as f64 / (rows - 1) as f64).exp();
        for j in 0..cols {
            let z = -reach + 2.0 * reach * j as f64 / (cols - 1) as f64;
            let s = Similarity::line(lambda, false, z).map_err(js_err)?;
            out.push(ratio(&v, &rho, &s, &exp).map_err(js_err)?);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct PlaneSolve {
    resolution: usize,
    half_width: f64,
    cstar: f64,
    el_residual: f64,
    values: Vec<f64>,
}

/// Grid extremal on `res × res` nodes; `{"resolution", "half_width",
/// "cstar", "el_residual", "values"}` with `values` row-major in `y`.
#[wasm_bindgen]
pub fn solve_plane(measure_json: &str, p: f64, res: usize) -> Result<String, JsValue> {
    let (rho, exp) = parse(measure_json, p)?;
    let grid = GridConfig {
        half_width: None,
        resolution: res,
    };
    let mut cfg = SolverConfig::default();
    cfg.search.scale_samples = 17;
    cfg.search.shift_samples = 5;
    cfg.search.polish_starts = 4;
    let r = minimize(&rho, &exp, &grid, &cfg).map_err(js_err)?;
    let out = PlaneSolve {
        resolution: r.field.grid().resolution(),
        half_width: r.field.grid().hi()[0],
        cstar: r.cstar_estimate,
        el_residual: r.el_residual,
        values: r.field.values().to_vec(),
    };
    serde_json::to_string(&out).map_err(js_err)
}
