//! The discrete `p`-Dirichlet energy and its derivatives.
//!
//! Every cell carries `2ⁿ` corner gradients: at corner `c` the gradient is
//! built from the `n` edges of the cell meeting at `c`. Each one is weighted
//! by `hⁿ/2ⁿ`, so
//!
//! ```text
//! E(u) = Σ_cells Σ_corners (hⁿ/2ⁿ) |∇_c u|^p
//! ```
//!
//! In two dimensions this is the mean of the P1 energies of the two diagonal
//! triangulations. The stencil commutes with the reflections of the grid,
//! and `E` is convex and vanishes exactly on constants.

use crate::measure::Exponent;
use crate::par;

use super::grid::{Grid, GridField};

/// Per-cell geometry shared by every assembly loop.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stencil {
    pub dim: usize,
    pub corners: usize,
    pub offsets: [usize; 8],
    pub inv_h: f64,
    pub weight: f64,
}

impl Stencil {
    pub fn new(grid: &Grid) -> Stencil {
        let dim = grid.dim();
        let corners = 1 << dim;
        Stencil {
            dim,
            corners,
            offsets: grid.corner_offsets(),
            inv_h: 1.0 / grid.spacing(),
            weight: grid.spacing().powi(dim as i32) / corners as f64,
        }
    }

    #[inline]
    pub fn gather(&self, values: &[f64], base: usize) -> [f64; 8] {
        let mut out = [0.0; 8];
        for c in 0..self.corners {
            out[c] = values[base + self.offsets[c]];
        }
        out
    }

    #[inline]
    pub fn corner_gradient(&self, local: &[f64; 8], c: usize) -> [f64; 3] {
        let mut g = [0.0; 3];
        for (k, gk) in g.iter_mut().enumerate().take(self.dim) {
            let bit = 1 << k;
            *gk = (local[c | bit] - local[c & !bit]) * self.inv_h;
        }
        g
    }

    /// Adds the transpose of the corner-gradient map applied to `v`.
    #[inline]
    pub fn scatter(&self, local: &mut [f64; 8], c: usize, v: &[f64; 3]) {
        for (k, vk) in v.iter().enumerate().take(self.dim) {
            let bit = 1 << k;
            local[c | bit] += vk * self.inv_h;
            local[c & !bit] -= vk * self.inv_h;
        }
    }

    /// Gradient of the corner-`c` gradient with respect to local node `l`.
    #[inline]
    pub fn node_derivative(&self, c: usize, l: usize) -> [f64; 3] {
        let mut d = [0.0; 3];
        for (k, dk) in d.iter_mut().enumerate().take(self.dim) {
            let bit = 1 << k;
            if l == c | bit {
                *dk += self.inv_h;
            }
            if l == c & !bit {
                *dk -= self.inv_h;
            }
        }
        d
    }
}

#[inline]
pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Assembles nodal values from per-cell local contributions; each node sums
/// its adjacent cells in a fixed order.
pub(crate) fn assemble<F>(grid: &Grid, per_cell: F) -> Vec<f64>
where
    F: Fn(usize) -> [f64; 8] + Sync + Send,
{
    let local = par::map_indexed(grid.cell_count(), per_cell);
    par::map_indexed(grid.node_count(), |node| {
        grid.node_cells(node).map(|(cell, corner)| local[cell][corner]).sum()
    })
}

/// Corner gradients in cell-major, corner-minor order.
pub fn corner_gradients(u: &GridField) -> Vec<[f64; 3]> {
    corner_gradients_of(u.grid(), u.values())
}

pub(crate) fn corner_gradients_of(grid: &Grid, values: &[f64]) -> Vec<[f64; 3]> {
    let st = Stencil::new(grid);
    let per_cell = par::map_indexed(grid.cell_count(), |cell| {
        let local = st.gather(values, grid.cell_base(cell));
        let mut g = [[0.0; 3]; 8];
        for (c, gc) in g.iter_mut().enumerate().take(st.corners) {
            *gc = st.corner_gradient(&local, c);
        }
        g
    });
    per_cell
        .into_iter()
        .flat_map(|g| g.into_iter().take(st.corners))
        .collect()
}

/// Quadrature weight `hⁿ/2ⁿ` of one corner gradient.
pub fn corner_weight(grid: &Grid) -> f64 {
    Stencil::new(grid).weight
}

/// `E(u) = Σ (hⁿ/2ⁿ) |∇_c u|^p`.
pub fn energy(u: &GridField, exp: &Exponent) -> f64 {
    energy_of(u.grid(), u.values(), exp.p())
}

pub(crate) fn energy_of(grid: &Grid, values: &[f64], p: f64) -> f64 {
    let st = Stencil::new(grid);
    let half = 0.5 * p;
    par::sum_indexed(grid.cell_count(), |cell| {
        let local = st.gather(values, grid.cell_base(cell));
        (0..st.corners)
            .map(|c| {
                let g = st.corner_gradient(&local, c);
                dot(&g, &g).powf(half)
            })
            .sum::<f64>()
    }) * st.weight
}

/// Exact nodal gradient `∂E/∂u_j`.
pub fn energy_gradient(u: &GridField, exp: &Exponent) -> GridField {
    let values = energy_gradient_of(u.grid(), u.values(), exp.p());
    GridField::new(*u.grid(), values).expect("gradient of a finite field is finite")
}

pub(crate) fn energy_gradient_of(grid: &Grid, values: &[f64], p: f64) -> Vec<f64> {
    let st = Stencil::new(grid);
    let e = 0.5 * (p - 2.0);
    assemble(grid, |cell| {
        let local = st.gather(values, grid.cell_base(cell));
        let mut out = [0.0; 8];
        for c in 0..st.corners {
            let g = st.corner_gradient(&local, c);
            let s = st.weight * p * dot(&g, &g).powf(e);
            st.scatter(&mut out, c, &[s * g[0], s * g[1], s * g[2]]);
        }
        out
    })
}

/// Second-order model of `E` at a fixed field: cached corner gradients and
/// the Hessian `w·p·(|g|^{p-2} I + (p-2)|g|^{p-4} g gᵀ)` per corner, plus
/// `shift·w·I` to keep flat regions from making it singular.
pub(crate) struct Linearization<'g> {
    grid: &'g Grid,
    st: Stencil,
    grads: Vec<[f64; 3]>,
    iso: Vec<f64>,
    aniso: Vec<f64>,
}

impl<'g> Linearization<'g> {
    pub fn new(grid: &'g Grid, values: &[f64], p: f64, regularization: f64) -> Linearization<'g> {
        let st = Stencil::new(grid);
        let grads = corner_gradients_of(grid, values);
        let pow = |g: &[f64; 3], e: f64| {
            let r2 = dot(g, g);
            if r2 > 0.0 {
                r2.powf(0.5 * e)
            } else if e == 0.0 {
                1.0
            } else {
                0.0
            }
        };
        let mut iso: Vec<f64> = grads.iter().map(|g| p * pow(g, p - 2.0)).collect();
        let aniso: Vec<f64> = grads.iter().map(|g| p * (p - 2.0) * pow(g, p - 4.0)).collect();
        let mean = iso.iter().sum::<f64>() / iso.len() as f64;
        let shift = regularization * mean;
        for a in iso.iter_mut() {
            *a += shift;
        }
        Linearization {
            grid,
            st,
            grads,
            iso,
            aniso,
        }
    }

    /// `H v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let st = &self.st;
        assemble(self.grid, |cell| {
            let local = st.gather(v, self.grid.cell_base(cell));
            let mut out = [0.0; 8];
            for c in 0..st.corners {
                let k = cell * st.corners + c;
                let dv = st.corner_gradient(&local, c);
                let g = &self.grads[k];
                let b = self.aniso[k] * dot(g, &dv);
                let a = self.iso[k];
                let f = [a * dv[0] + b * g[0], a * dv[1] + b * g[1], a * dv[2] + b * g[2]];
                st.scatter(&mut out, c, &[st.weight * f[0], st.weight * f[1], st.weight * f[2]]);
            }
            out
        })
    }

    /// `diag(H)`.
    pub fn diagonal(&self) -> Vec<f64> {
        let st = &self.st;
        assemble(self.grid, |cell| {
            let mut out = [0.0; 8];
            for c in 0..st.corners {
                let k = cell * st.corners + c;
                let g = &self.grads[k];
                for (l, o) in out.iter_mut().enumerate().take(st.corners) {
                    let d = st.node_derivative(c, l);
                    let gd = dot(g, &d);
                    *o += st.weight * (self.iso[k] * dot(&d, &d) + self.aniso[k] * gd * gd);
                }
            }
            out
        })
    }
}
