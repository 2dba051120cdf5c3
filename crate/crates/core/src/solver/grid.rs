//! Uniform tensor grids, nodal fields with multilinear interpolation, and
//! the discrete pairing `⟨m_h, u⟩` of a measure with a nodal field.

use serde::{Deserialize, Serialize};

use crate::field::{FieldError, Region, ScalarField};
use crate::measure::{point_to_vec, Point, SignedMeasure, MAX_DIM};

use super::SolverError;

/// `res` nodes per axis with spacing `h`, starting at `lo`. Node indices are
/// lexicographic with axis 0 fastest; cell `c` has its lower corner at the
/// node with the same multi-index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    res: usize,
    spacing: f64,
    lo: [f64; 3],
}

impl Grid {
    pub fn new(dim: usize, lo: &[f64], spacing: f64, res: usize) -> Result<Grid, SolverError> {
        if !(1..=MAX_DIM).contains(&dim) || lo.len() != dim {
            return Err(SolverError::UnsupportedDimension(dim));
        }
        if res < 3 {
            return Err(SolverError::InvalidGrid(format!("resolution {res} is below 3")));
        }
        if !(spacing.is_finite() && spacing > 0.0) || lo.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::InvalidGrid(format!("spacing {spacing} is not positive")));
        }
        let mut l = [0.0; 3];
        l[..dim].copy_from_slice(lo);
        Ok(Grid {
            dim,
            res,
            spacing,
            lo: l,
        })
    }

    /// `[-L, L]ⁿ` with `res` nodes per axis, `h = 2L/(res - 1)`.
    pub fn centered(dim: usize, half_width: f64, res: usize) -> Result<Grid, SolverError> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(SolverError::InvalidGrid(format!(
                "half-width {half_width} is not positive"
            )));
        }
        Grid::new(
            dim,
            &vec![-half_width; dim],
            2.0 * half_width / (res.max(2) - 1) as f64,
            res,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.res
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn lo(&self) -> Point {
        Point::from(self.lo)
    }

    pub fn hi(&self) -> Point {
        let mut hi = Point::from(self.lo);
        for k in 0..self.dim {
            hi[k] += self.spacing * (self.res - 1) as f64;
        }
        hi
    }

    pub fn region(&self) -> Region {
        Region {
            lo: self.lo(),
            hi: self.hi(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.res.pow(self.dim as u32)
    }

    pub fn cell_count(&self) -> usize {
        (self.res - 1).pow(self.dim as u32)
    }

    /// Multi-index of node `idx`.
    pub fn node_multi(&self, mut idx: usize) -> [usize; 3] {
        let mut m = [0; 3];
        for slot in m.iter_mut().take(self.dim) {
            *slot = idx % self.res;
            idx /= self.res;
        }
        m
    }

    pub fn node_index(&self, multi: [usize; 3]) -> usize {
        (0..self.dim).rev().fold(0, |acc, k| acc * self.res + multi[k])
    }

    pub fn node_point(&self, idx: usize) -> Point {
        let m = self.node_multi(idx);
        let mut x = Point::zeros();
        for k in 0..self.dim {
            x[k] = self.lo[k] + self.spacing * m[k] as f64;
        }
        x
    }

    /// Lower-corner node of cell `cell`.
    pub(crate) fn cell_base(&self, mut cell: usize) -> usize {
        let mut multi = [0; 3];
        for slot in multi.iter_mut().take(self.dim) {
            *slot = cell % (self.res - 1);
            cell /= self.res - 1;
        }
        self.node_index(multi)
    }

    /// Node offsets of the `2ⁿ` cell corners; bit `k` of the corner index
    /// selects the upper node along axis `k`.
    pub(crate) fn corner_offsets(&self) -> [usize; 8] {
        let mut out = [0; 8];
        for (c, slot) in out.iter_mut().enumerate().take(1 << self.dim) {
            let mut stride = 1;
            for k in 0..self.dim {
                if c & (1 << k) != 0 {
                    *slot += stride;
                }
                stride *= self.res;
            }
        }
        out
    }

    /// Cells adjacent to node `idx`, each with the node's corner index in
    /// that cell.
    pub(crate) fn node_cells(&self, idx: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let multi = self.node_multi(idx);
        (0..1usize << self.dim).filter_map(move |corner| {
            let mut cell = 0;
            for k in (0..self.dim).rev() {
                let bit = (corner >> k) & 1;
                if multi[k] < bit || multi[k] - bit >= self.res - 1 {
                    return None;
                }
                cell = cell * (self.res - 1) + (multi[k] - bit);
            }
            Some((cell, corner))
        })
    }

    /// Nodes with at least one coordinate on the box boundary.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&i| {
                let m = self.node_multi(i);
                (0..self.dim).any(|k| m[k] == 0 || m[k] == self.res - 1)
            })
            .collect()
    }

    /// Cell base multi-index and local coordinates in `[0, 1]ⁿ` for `x`,
    /// or `None` outside the box.
    fn locate(&self, x: &Point) -> Option<([usize; 3], [f64; 3])> {
        let slack = 1e-12 * self.res as f64;
        let mut base = [0; 3];
        let mut frac = [0.0; 3];
        for k in 0..self.dim {
            let t = (x[k] - self.lo[k]) / self.spacing;
            let top = (self.res - 1) as f64;
            if !(t >= -slack && t <= top + slack) {
                return None;
            }
            let t = t.clamp(0.0, top);
            let i = (t.floor() as usize).min(self.res - 2);
            base[k] = i;
            frac[k] = t - i as f64;
        }
        Some((base, frac))
    }

    /// Multilinear weights of the `2ⁿ` corners around `x`.
    fn weights(&self, x: &Point) -> Option<(usize, [f64; 8])> {
        let (base, frac) = self.locate(x)?;
        let mut w = [0.0; 8];
        for (c, slot) in w.iter_mut().enumerate().take(1 << self.dim) {
            *slot = (0..self.dim)
                .map(|k| if c & (1 << k) != 0 { frac[k] } else { 1.0 - frac[k] })
                .product();
        }
        Some((self.node_index(base), w))
    }

    fn outside(&self, x: &Point) -> FieldError {
        FieldError::AtomOutsideFieldDomain {
            point: point_to_vec(x, self.dim),
        }
    }
}

/// Nodal values on a [`Grid`], evaluated off-grid by multilinear
/// interpolation and undefined outside the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    grid: Grid,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<GridField, SolverError> {
        if values.len() != grid.node_count() {
            return Err(SolverError::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::InvalidGrid("non-finite nodal value".into()));
        }
        Ok(GridField { grid, values })
    }

    pub fn zeros(grid: Grid) -> GridField {
        GridField {
            values: vec![0.0; grid.node_count()],
            grid,
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(&Point) -> f64) -> GridField {
        let values = (0..grid.node_count()).map(|i| f(&grid.node_point(i))).collect();
        GridField { grid, values }
    }

    /// Rebuilds a field from scattered `(point, value)` samples that cover a
    /// uniform grid with equal spacing and node count on every axis.
    pub fn from_samples(dim: usize, samples: &[(Vec<f64>, f64)]) -> Result<GridField, SolverError> {
        let total = samples.len();
        let res = (total as f64).powf(1.0 / dim as f64).round() as usize;
        if res < 3 || res.pow(dim as u32) != total {
            return Err(SolverError::InvalidGrid(format!(
                "{total} samples do not form a {dim}-dimensional square grid"
            )));
        }
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for (x, _) in samples {
            if x.len() != dim {
                return Err(SolverError::InvalidGrid("coordinate count mismatch".into()));
            }
            for k in 0..dim {
                lo[k] = lo[k].min(x[k]);
                hi[k] = hi[k].max(x[k]);
            }
        }
        let h = (hi[0] - lo[0]) / (res - 1) as f64;
        for k in 1..dim {
            let hk = (hi[k] - lo[k]) / (res - 1) as f64;
            if (hk - h).abs() > 1e-9 * h {
                return Err(SolverError::InvalidGrid("axes have different spacings".into()));
            }
        }
        let grid = Grid::new(dim, &lo, h, res)?;
        let mut values = vec![f64::NAN; total];
        for (x, u) in samples {
            let mut multi = [0; 3];
            for k in 0..dim {
                let t = (x[k] - lo[k]) / h;
                let i = t.round();
                if (t - i).abs() > 1e-6 {
                    return Err(SolverError::InvalidGrid(format!("sample {x:?} is off the grid")));
                }
                multi[k] = i as usize;
            }
            values[grid.node_index(multi)] = *u;
        }
        GridField::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn range(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `max |u - v|` over nodes of two fields on the same grid.
    pub fn sup_distance(&self, other: &GridField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `(x, u)` for every node, in node order.
    pub fn samples(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        (0..self.values.len()).map(|i| (self.grid.node_point(i), self.values[i]))
    }
}

impl ScalarField for GridField {
    fn dim(&self) -> usize {
        self.grid.dim
    }

    fn value(&self, x: &Point) -> Result<f64, FieldError> {
        let (base, w) = self.grid.weights(x).ok_or_else(|| self.grid.outside(x))?;
        let offsets = self.grid.corner_offsets();
        Ok((0..1 << self.grid.dim)
            .map(|c| w[c] * self.values[base + offsets[c]])
            .sum())
    }

    fn gradient(&self, x: &Point) -> Result<Point, FieldError> {
        let (base, frac) = self.grid.locate(x).ok_or_else(|| self.grid.outside(x))?;
        let base = self.grid.node_index(base);
        let offsets = self.grid.corner_offsets();
        let dim = self.grid.dim;
        let mut g = Point::zeros();
        for (c, off) in offsets.iter().enumerate().take(1usize << dim) {
            let u = self.values[base + off];
            for k in 0..dim {
                let mut w = if c & (1 << k) != 0 { 1.0 } else { -1.0 };
                for j in (0..dim).filter(|&j| j != k) {
                    w *= if c & (1 << j) != 0 { frac[j] } else { 1.0 - frac[j] };
                }
                g[k] += w * u / self.grid.spacing;
            }
        }
        Ok(g)
    }

    fn region(&self) -> Region {
        self.grid.region()
    }
}

/// The discrete functional `u ↦ ⟨m_h, u⟩ = Σ wᵢ·(interpolated u at yᵢ)`,
/// stored as merged `(node, weight)` pairs sorted by node.
#[derive(Debug, Clone, PartialEq)]
pub struct Splat {
    entries: Vec<(usize, f64)>,
}

impl Splat {
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn pair(&self, values: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, w)| w * values[i]).sum()
    }

    pub fn dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for &(i, w) in &self.entries {
            out[i] += w;
        }
        out
    }

    /// Nodes carrying nonzero weight.
    pub fn support(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| e.1 != 0.0)
            .map(|e| e.0)
            .collect()
    }
}

/// Multilinear splatting of `μ` onto the nodes of `grid`; every atom must lie
/// strictly inside the box.
pub fn splat(mu: &SignedMeasure, grid: &Grid) -> Result<Splat, SolverError> {
    if mu.dim() != grid.dim {
        return Err(SolverError::Field(FieldError::DimensionMismatch {
            field: grid.dim,
            measure: mu.dim(),
        }));
    }
    let region = grid.region();
    let offsets = grid.corner_offsets();
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for atom in mu.atoms() {
        let y = &atom.location;
        let inside = (0..grid.dim).all(|k| y[k] > region.lo[k] && y[k] < region.hi[k]);
        let located = if inside { grid.weights(y) } else { None };
        let (base, w) = located.ok_or_else(|| SolverError::AtomOutsideBox {
            point: point_to_vec(y, grid.dim),
        })?;
        for c in 0..1 << grid.dim {
            if w[c] != 0.0 {
                entries.push((base + offsets[c], atom.weight * w[c]));
            }
        }
    }
    entries.sort_by_key(|e| e.0);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
    for (i, w) in entries {
        match merged.last_mut() {
            Some(last) if last.0 == i => last.1 += w,
            _ => merged.push((i, w)),
        }
    }
    Ok(Splat { entries: merged })
}
