//! Points, bounding boxes and node-centred scalar grids.
//!
//! Everything in the pipeline is expressed in three coordinates; 2D data
//! simply keeps `z = 0` and a grid with a single node along the third axis.

use std::ops::{Add, Mul, Sub};

use rayon::prelude::*;

use crate::error::{invalid, HfrepError, Result};

/// A point (or vector) in world units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub const ORIGIN: Point = Point([0.0; 3]);

    pub fn new(x: f64, y: f64) -> Self {
        Point([x, y, 0.0])
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Point([x, y, z])
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.0[0]
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.0[1]
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        let d = *self - *other;
        d.dot(&d)
    }

    pub fn normalized(&self) -> Point {
        let n = self.norm();
        if n > 0.0 {
            *self * (1.0 / n)
        } else {
            *self
        }
    }

    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        *self + (*other - *self) * t
    }

    pub fn cross(&self, o: &Point) -> Point {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Point([b * z - c * y, c * x - a * z, a * y - b * x])
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// Axis-aligned computing domain. `dim` is 2 or 3; for 2D boxes the z range
/// is ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
    pub dim: usize,
}

impl BoundingBox {
    pub fn new2(min: [f64; 2], max: [f64; 2]) -> Result<Self> {
        Self::new(Point::new(min[0], min[1]), Point::new(max[0], max[1]), 2)
    }

    pub fn new3(min: [f64; 3], max: [f64; 3]) -> Result<Self> {
        Self::new(Point(min), Point(max), 3)
    }

    pub fn new(min: Point, max: Point, dim: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(invalid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if !min.is_finite() || !max.is_finite() {
            return Err(invalid("bounding box corners must be finite"));
        }
        for a in 0..dim {
            if min.0[a] >= max.0[a] {
                return Err(invalid(format!("bounding box min must be < max on axis {a}")));
            }
        }
        let (mut min, mut max) = (min, max);
        if dim == 2 {
            min.0[2] = 0.0;
            max.0[2] = 0.0;
        }
        Ok(BoundingBox { min, max, dim })
    }

    /// The square `[-half, half]²`.
    pub fn centered_square(half: f64) -> Self {
        Self::new2([-half, -half], [half, half]).expect("positive half extent")
    }

    pub fn centered_cube(half: f64) -> Self {
        Self::new3([-half; 3], [half; 3]).expect("positive half extent")
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.max.0[axis] - self.min.0[axis]
    }

    pub fn diagonal(&self) -> f64 {
        (0..self.dim).map(|a| self.extent(a).powi(2)).sum::<f64>().sqrt()
    }

    pub fn center(&self) -> Point {
        self.min.lerp(&self.max, 0.5)
    }

    /// Inclusive containment with a relative slack of `1e-12` of the extent.
    pub fn contains(&self, p: &Point) -> bool {
        (0..self.dim).all(|a| {
            let slack = 1e-12 * self.extent(a);
            p.0[a] >= self.min.0[a] - slack && p.0[a] <= self.max.0[a] + slack
        })
    }
}

/// Continuity class of a field, ordered `C0 < C1 < CInf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContinuityClass {
    C0,
    C1,
    CInf,
}

/// Real values sampled at the nodes of a uniform lattice spanning a bounding
/// box. Node `(i, j, k)` lives at `min + (i, j, k) * h`; values are stored
/// with x varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    dims: [usize; 3],
    bbox: BoundingBox,
    spacing: [f64; 3],
    values: Vec<f64>,
}

impl ScalarGrid {
    /// Creates a grid from node values. `dims` has one entry per axis of the
    /// bounding box, each at least 2.
    pub fn new(dims: &[usize], bbox: BoundingBox, values: Vec<f64>) -> Result<Self> {
        let dims = normalize_dims(dims, &bbox)?;
        let count: usize = dims.iter().product();
        if values.len() != count {
            return Err(invalid(format!(
                "grid expects {count} values, got {}",
                values.len()
            )));
        }
        let mut spacing = [0.0; 3];
        for a in 0..bbox.dim {
            spacing[a] = bbox.extent(a) / (dims[a] - 1) as f64;
        }
        Ok(ScalarGrid { dims, bbox, spacing, values })
    }

    pub fn filled(dims: &[usize], bbox: BoundingBox, value: f64) -> Result<Self> {
        let n = normalize_dims(dims, &bbox)?.iter().product();
        Self::new(dims, bbox, vec![value; n])
    }

    /// Samples `f` at every node (in parallel).
    pub fn from_fn<F>(dims: &[usize], bbox: BoundingBox, f: F) -> Result<Self>
    where
        F: Fn(Point) -> f64 + Sync,
    {
        let mut grid = Self::filled(dims, bbox, 0.0)?;
        let shape = grid.clone_shape();
        grid.values
            .par_iter_mut()
            .enumerate()
            .for_each(|(idx, v)| *v = f(shape.node_position(idx)));
        Ok(grid)
    }

    fn clone_shape(&self) -> GridShape {
        GridShape { dims: self.dims, min: self.bbox.min, spacing: self.spacing }
    }

    pub fn dim(&self) -> usize {
        self.bbox.dim
    }

    /// Node counts per axis; unused axes report 1.
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    /// Smallest node spacing over the active axes.
    pub fn min_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing[a]).fold(f64::INFINITY, f64::min)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let rest = idx / self.dims[0];
        [i, rest % self.dims[1], rest / self.dims[1]]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.index(i, j, k)]
    }

    pub fn node_position(&self, idx: usize) -> Point {
        self.clone_shape().node_position(idx)
    }

    /// World position of a (possibly fractional) lattice coordinate.
    pub fn grid_to_world(&self, frac: [f64; 3]) -> Point {
        let mut p = [0.0; 3];
        for a in 0..self.dim() {
            p[a] = self.bbox.min.0[a] + frac[a] * self.spacing[a];
        }
        Point(p)
    }

    /// Fractional lattice coordinate of a world point. Points outside the
    /// box map to out-of-range coordinates.
    pub fn world_to_grid(&self, p: &Point) -> [f64; 3] {
        let mut g = [0.0; 3];
        for a in 0..self.dim() {
            g[a] = (p.0[a] - self.bbox.min.0[a]) / self.spacing[a];
        }
        g
    }

    /// Lower lattice corner of the cell containing `g` and the local
    /// coordinates inside that cell, clamped to the lattice.
    pub(crate) fn locate(&self, g: [f64; 3]) -> ([usize; 3], [f64; 3]) {
        let mut cell = [0usize; 3];
        let mut t = [0.0; 3];
        for a in 0..self.dim() {
            let last = (self.dims[a] - 2) as f64;
            let c = g[a].floor().clamp(0.0, last);
            cell[a] = c as usize;
            t[a] = (g[a] - c).clamp(0.0, 1.0);
        }
        (cell, t)
    }

    /// Multilinear interpolation of the node values.
    pub fn sample_bilinear(&self, p: &Point) -> Result<f64> {
        if !self.bbox.contains(p) {
            return Err(HfrepError::Domain { point: p.0, what: "grid bounding box" });
        }
        let (cell, t) = self.locate(self.world_to_grid(p));
        let d = self.dim();
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut ijk = [0usize; 3];
            for a in 0..d {
                let bit = (corner >> a) & 1;
                ijk[a] = cell[a] + bit;
                w *= if bit == 1 { t[a] } else { 1.0 - t[a] };
            }
            acc += w * self.get(ijk[0], ijk[1], ijk[2]);
        }
        Ok(acc)
    }

    /// Finite-difference gradient at a node: central in the interior,
    /// one-sided on the border.
    pub fn gradient_central(&self, node: [usize; 3]) -> [f64; 3] {
        let mut grad = [0.0; 3];
        let here = self.get(node[0], node[1], node[2]);
        for a in 0..self.dim() {
            let n = self.dims[a];
            let mut lo = node;
            let mut hi = node;
            let (vlo, vhi, span);
            if node[a] == 0 {
                hi[a] += 1;
                vlo = here;
                vhi = self.get(hi[0], hi[1], hi[2]);
                span = 1.0;
            } else if node[a] == n - 1 {
                lo[a] -= 1;
                vlo = self.get(lo[0], lo[1], lo[2]);
                vhi = here;
                span = 1.0;
            } else {
                lo[a] -= 1;
                hi[a] += 1;
                vlo = self.get(lo[0], lo[1], lo[2]);
                vhi = self.get(hi[0], hi[1], hi[2]);
                span = 2.0;
            }
            grad[a] = (vhi - vlo) / (span * self.spacing[a]);
        }
        grad
    }

    /// Applies `f` to every value, keeping the lattice.
    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> ScalarGrid {
        let values = self.values.par_iter().map(|&v| f(v)).collect();
        self.with_values(values)
    }

    /// Same lattice, new values. Panics on a length mismatch.
    pub fn with_values(&self, values: Vec<f64>) -> ScalarGrid {
        assert_eq!(values.len(), self.values.len(), "value count must match the lattice");
        ScalarGrid { dims: self.dims, bbox: self.bbox, spacing: self.spacing, values }
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Same lattice as `self`.
    pub fn same_lattice(&self, other: &ScalarGrid) -> bool {
        self.dims == other.dims && self.bbox == other.bbox
    }

    /// Maximum absolute difference against a grid on the same lattice.
    pub fn max_abs_diff(&self, other: &ScalarGrid) -> f64 {
        assert!(self.same_lattice(other), "grids must share a lattice");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy)]
struct GridShape {
    dims: [usize; 3],
    min: Point,
    spacing: [f64; 3],
}

impl GridShape {
    fn node_position(&self, idx: usize) -> Point {
        let i = idx % self.dims[0];
        let rest = idx / self.dims[0];
        let ijk = [i, rest % self.dims[1], rest / self.dims[1]];
        let mut p = [0.0; 3];
        for a in 0..3 {
            p[a] = self.min.0[a] + ijk[a] as f64 * self.spacing[a];
        }
        Point(p)
    }
}

fn normalize_dims(dims: &[usize], bbox: &BoundingBox) -> Result<[usize; 3]> {
    if dims.len() != bbox.dim {
        return Err(invalid(format!(
            "expected {} grid dimensions, got {}",
            bbox.dim,
            dims.len()
        )));
    }
    let mut out = [1usize; 3];
    for (a, &n) in dims.iter().enumerate() {
        if n < 2 {
            return Err(invalid("every grid axis needs at least 2 nodes"));
        }
        out[a] = n;
    }
    Ok(out)
}
