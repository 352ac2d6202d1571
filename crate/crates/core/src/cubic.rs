//! Cubic Hermite building blocks: the 1D basis, bicubic patches from corner
//! data, and a tensor-product Catmull–Rom interpolant over a regular grid in
//! two or three dimensions.

use crate::error::{HfrepError, Result};
use crate::grid::{Point, ScalarGrid};

/// Hermite basis `[h00, h01, h10, h11]` at `t` and its derivative.
/// `h00`/`h01` weight the end values, `h10`/`h11` the end slopes.
#[inline]
pub fn hermite_basis(t: f64) -> ([f64; 4], [f64; 4]) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        [
            2.0 * t3 - 3.0 * t2 + 1.0,
            -2.0 * t3 + 3.0 * t2,
            t3 - 2.0 * t2 + t,
            t3 - t2,
        ],
        [
            6.0 * t2 - 6.0 * t,
            -6.0 * t2 + 6.0 * t,
            3.0 * t2 - 4.0 * t + 1.0,
            3.0 * t2 - 2.0 * t,
        ],
    )
}

/// Bicubic Hermite patch on a `sx × sy` rectangle. `corners` holds
/// `[f, fx, fy, fxy]` (world derivatives) at the corners in the order
/// `(0,0), (1,0), (0,1), (1,1)`; `(u, v)` are local coordinates in `[0, 1]`.
/// Returns `[f, fx, fy, fxy]` at the point.
pub fn bicubic_patch(corners: &[[f64; 4]; 4], sx: f64, sy: f64, u: f64, v: f64) -> [f64; 4] {
    let (bu, du) = hermite_basis(u);
    let (bv, dv) = hermite_basis(v);
    let mut out = [0.0; 4];
    for (c, data) in corners.iter().enumerate() {
        let (i, j) = (c & 1, c >> 1);
        // value and slope weights along each axis for this corner
        let wu = [bu[i], sx * bu[2 + i]];
        let wv = [bv[j], sy * bv[2 + j]];
        let dwu = [du[i], sx * du[2 + i]];
        let dwv = [dv[j], sy * dv[2 + j]];
        let coef = [[data[0], data[2]], [data[1], data[3]]]; // [x-order][y-order]
        for a in 0..2 {
            for b in 0..2 {
                let k = coef[a][b];
                out[0] += k * wu[a] * wv[b];
                out[1] += k * dwu[a] * wv[b];
                out[2] += k * wu[a] * dwv[b];
                out[3] += k * dwu[a] * dwv[b];
            }
        }
    }
    out[1] /= sx;
    out[2] /= sy;
    out[3] /= sx * sy;
    out
}

/// Derivative estimate at node `i` of a uniformly spaced sequence (unit
/// spacing): central inside, second-order one-sided at the ends, so it is
/// exact for quadratics everywhere.
#[inline]
fn diff(v: &dyn Fn(usize) -> f64, i: usize, n: usize) -> f64 {
    if n == 2 {
        v(1) - v(0)
    } else if i == 0 {
        (-3.0 * v(0) + 4.0 * v(1) - v(2)) / 2.0
    } else if i == n - 1 {
        (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) / 2.0
    } else {
        (v(i + 1) - v(i - 1)) / 2.0
    }
}

/// Tensor-product cubic Hermite interpolant over a regular grid, with
/// Catmull–Rom derivative estimates. C¹ everywhere inside the box and exact
/// at the nodes; reproduces polynomials of degree ≤ 2 per axis.
#[derive(Debug, Clone)]
pub struct CubicGrid {
    grid: ScalarGrid,
    /// For each multi-index α ∈ {0,1}^d (bit a = derivative along axis a),
    /// the node values of ∂^α f in lattice units.
    derivs: Vec<Vec<f64>>,
}

impl CubicGrid {
    pub fn new(grid: ScalarGrid) -> Self {
        let d = grid.dim();
        let dims = grid.dims();
        let mut derivs = vec![grid.values().to_vec()];
        for alpha in 1..(1usize << d) {
            // differentiate along the highest set axis, starting from the
            // already computed derivative without that axis
            let axis = (usize::BITS - 1 - alpha.leading_zeros()) as usize;
            let base = &derivs[alpha & !(1 << axis)];
            let stride = [1, dims[0], dims[0] * dims[1]][axis];
            let n = dims[axis];
            let out: Vec<f64> = (0..grid.len())
                .map(|idx| {
                    let i = grid.coords(idx)[axis];
                    let start = idx - i * stride;
                    diff(&|k| base[start + k * stride], i, n)
                })
                .collect();
            derivs.push(out);
        }
        CubicGrid { grid, derivs }
    }

    pub fn grid(&self) -> &ScalarGrid {
        &self.grid
    }

    /// Value and world gradient at `p`. Outside the box is a domain error.
    pub fn eval_with_gradient(&self, p: &Point) -> Result<(f64, [f64; 3])> {
        let g = &self.grid;
        if !g.bbox().contains(p) {
            return Err(HfrepError::Domain { point: p.0, what: "interpolant bounding box" });
        }
        let d = g.dim();
        let (cell, t) = g.locate(g.world_to_grid(p));
        let mut basis = [([0.0; 4], [0.0; 4]); 3];
        for a in 0..d {
            basis[a] = hermite_basis(t[a]);
        }
        let mut value = 0.0;
        let mut grad = [0.0; 3];
        for corner in 0..(1usize << d) {
            let mut ijk = cell;
            for a in 0..d {
                ijk[a] += (corner >> a) & 1;
            }
            let idx = g.index(ijk[0], ijk[1], ijk[2]);
            for (alpha, data) in self.derivs.iter().enumerate() {
                let k = data[idx];
                let mut w = 1.0;
                let mut dw = [1.0; 3];
                for a in 0..d {
                    let bit = (corner >> a) & 1;
                    let slot = bit + 2 * ((alpha >> a) & 1);
                    let (b, db) = (basis[a].0[slot], basis[a].1[slot]);
                    w *= b;
                    for (e, dwe) in dw.iter_mut().enumerate().take(d) {
                        *dwe *= if e == a { db } else { b };
                    }
                }
                value += k * w;
                for a in 0..d {
                    grad[a] += k * dw[a];
                }
            }
        }
        for a in 0..d {
            grad[a] /= g.spacing()[a];
        }
        Ok((value, grad))
    }

    pub fn eval(&self, p: &Point) -> Result<f64> {
        Ok(self.eval_with_gradient(p)?.0)
    }
}
