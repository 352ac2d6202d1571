//! Fast iterative method for `|∇φ| = 1/f` with first-order Godunov upwinding.
//!
//! The solver runs on any [`UpwindGraph`]: a node knows, per axis, its nearest
//! neighbour on each side and the spacing to it. Regular grids and the
//! quadtree vertex graph both implement it, so on a uniform tree the two give
//! bit-identical results.
//!
//! Each sweep computes the updates of every active node from the same
//! snapshot of `φ` (in parallel), then writes them. Values only ever
//! decrease, and a node re-activates its neighbours when it improves by more
//! than `eps`.

use rayon::prelude::*;

use crate::dt::SeedSet;
use crate::error::{invalid, HfrepError, Result};
use crate::grid::{BoundingBox, Point, ScalarGrid};

/// Per-node positive speed.
#[derive(Debug, Clone, PartialEq)]
pub enum SpeedField {
    Uniform(f64),
    PerNode(Vec<f64>),
}

impl Default for SpeedField {
    fn default() -> Self {
        SpeedField::Uniform(1.0)
    }
}

impl SpeedField {
    #[inline]
    pub fn at(&self, node: usize) -> f64 {
        match self {
            SpeedField::Uniform(f) => *f,
            SpeedField::PerNode(v) => v[node],
        }
    }

    fn validate(&self, nodes: usize) -> Result<()> {
        let ok = match self {
            SpeedField::Uniform(f) => f.is_finite() && *f > 0.0,
            SpeedField::PerNode(v) => {
                v.len() == nodes && v.iter().all(|f| f.is_finite() && *f > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("speed must be positive and finite at every node"))
        }
    }
}

/// Axis-aligned neighbourhood structure the solver runs on.
pub trait UpwindGraph: Sync {
    fn node_count(&self) -> usize;
    fn dim(&self) -> usize;
    /// `[minus side, plus side]` neighbours along `axis` with their spacing.
    fn axis_neighbours(&self, node: usize, axis: usize) -> [Option<(usize, f64)>; 2];
    fn speed(&self, node: usize) -> f64;
}

/// Smallest `φ` with `Σ max((φ - v_i)/h_i, 0)² = 1/f²` over the given
/// `(v_i, h_i)` pairs, dropping dimensions whose value is not below `φ`.
/// Infinite values are ignored; returns infinity when nothing is usable.
pub fn godunov_nd(pairs: &[(f64, f64)], f: f64) -> f64 {
    let mut vals: [(f64, f64); 3] = [(f64::INFINITY, 1.0); 3];
    let mut n = 0;
    for &(v, h) in pairs {
        if v.is_finite() {
            vals[n] = (v, h);
            n += 1;
        }
    }
    if n == 0 {
        return f64::INFINITY;
    }
    let vals = &mut vals[..n];
    vals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let inv_f2 = 1.0 / (f * f);
    let mut phi = vals[0].0 + vals[0].1 / f;
    let (mut sa, mut sb, mut sc) = (0.0, 0.0, 0.0);
    let (v0, h0) = vals[0];
    sa += 1.0 / (h0 * h0);
    sb += v0 / (h0 * h0);
    sc += v0 * v0 / (h0 * h0);
    for &(v, h) in &vals[1..] {
        if phi <= v {
            break;
        }
        let w = 1.0 / (h * h);
        let (a, b, c) = (sa + w, sb + v * w, sc + v * v * w);
        // a φ² - 2 b φ + (c - 1/f²) = 0
        let disc = b * b - a * (c - inv_f2);
        if disc < 0.0 {
            break;
        }
        phi = (b + disc.sqrt()) / a;
        (sa, sb, sc) = (a, b, c);
    }
    phi
}

/// Two-axis Godunov update with per-axis upwind values `a` (x) and `b` (y).
pub fn godunov_update(a: f64, b: f64, hx: f64, hy: f64, f: f64) -> f64 {
    godunov_nd(&[(a, hx), (b, hy)], f)
}

/// Local update at `node` from the current values of its neighbours.
pub fn upwind_update<G: UpwindGraph + ?Sized>(graph: &G, phi: &[f64], node: usize) -> f64 {
    let d = graph.dim();
    let mut choices = [[(f64::INFINITY, 1.0); 2]; 3];
    let mut counts = [1usize; 3];
    for axis in 0..d {
        let [lo, hi] = graph.axis_neighbours(node, axis);
        let lo = lo.map(|(i, h)| (phi[i], h));
        let hi = hi.map(|(i, h)| (phi[i], h));
        match (lo, hi) {
            (Some(l), Some(r)) if l.1 == r.1 => {
                choices[axis][0] = if r.0 < l.0 { r } else { l };
            }
            (Some(l), Some(r)) => {
                choices[axis] = [l, r];
                counts[axis] = 2;
            }
            (Some(x), None) | (None, Some(x)) => choices[axis][0] = x,
            (None, None) => {}
        }
    }
    let f = graph.speed(node);
    let mut best = f64::INFINITY;
    for cx in 0..counts[0] {
        for cy in 0..counts[1] {
            for cz in 0..counts[2] {
                let pairs = [choices[0][cx], choices[1][cy], choices[2][cz]];
                best = best.min(godunov_nd(&pairs[..d], f));
            }
        }
    }
    best
}

/// Order in which active nodes are processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// All active nodes read one snapshot; parallel.
    #[default]
    Jacobi,
    /// Sequential in-place updates in ascending node order.
    GaussSeidel,
    /// Sequential in-place updates in descending node order.
    GaussSeidelReversed,
}

/// Incremental solver state; `step` runs one sweep over the active list.
pub struct FimSolver<'g, G: UpwindGraph + ?Sized> {
    graph: &'g G,
    phi: Vec<f64>,
    pinned: Vec<bool>,
    active: Vec<usize>,
    eps: f64,
    sweeps: usize,
}

impl<'g, G: UpwindGraph + ?Sized> FimSolver<'g, G> {
    /// `sources` pins nodes at fixed values; all other nodes start at
    /// `sentinel`.
    pub fn new(graph: &'g G, sources: &[(usize, f64)], sentinel: f64, eps: f64) -> Result<Self> {
        if sources.is_empty() {
            return Err(HfrepError::EmptyBoundary);
        }
        if !(eps > 0.0) {
            return Err(invalid("eps must be positive"));
        }
        let n = graph.node_count();
        let mut phi = vec![sentinel; n];
        let mut pinned = vec![false; n];
        for &(i, v) in sources {
            phi[i] = phi[i].min(v);
            pinned[i] = true;
        }
        let mut solver = FimSolver { graph, phi, pinned, active: Vec::new(), eps, sweeps: 0 };
        let seeds: Vec<usize> = sources.iter().map(|s| s.0).collect();
        solver.active = solver.activate_around(&seeds);
        Ok(solver)
    }

    fn activate_around(&self, changed: &[usize]) -> Vec<usize> {
        let mut next = Vec::with_capacity(changed.len() * 5);
        for &i in changed {
            if !self.pinned[i] {
                next.push(i);
            }
            for axis in 0..self.graph.dim() {
                for (j, _) in self.graph.axis_neighbours(i, axis).into_iter().flatten() {
                    if !self.pinned[j] {
                        next.push(j);
                    }
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        next
    }

    pub fn values(&self) -> &[f64] {
        &self.phi
    }

    pub fn is_converged(&self) -> bool {
        self.active.is_empty()
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// One sweep. Returns `true` while nodes remain active.
    pub fn step(&mut self, schedule: Schedule) -> bool {
        if self.active.is_empty() {
            return false;
        }
        self.sweeps += 1;
        let mut changed = Vec::new();
        match schedule {
            Schedule::Jacobi => {
                let graph = self.graph;
                let phi = &self.phi;
                let updates: Vec<(usize, f64)> = self
                    .active
                    .par_iter()
                    .map(|&i| (i, upwind_update(graph, phi, i)))
                    .collect();
                for (i, q) in updates {
                    if q < self.phi[i] {
                        if q < self.phi[i] - self.eps {
                            changed.push(i);
                        }
                        self.phi[i] = q;
                    }
                }
            }
            Schedule::GaussSeidel | Schedule::GaussSeidelReversed => {
                let mut order = std::mem::take(&mut self.active);
                if schedule == Schedule::GaussSeidelReversed {
                    order.reverse();
                }
                for i in order {
                    let q = upwind_update(self.graph, &self.phi, i);
                    if q < self.phi[i] {
                        if q < self.phi[i] - self.eps {
                            changed.push(i);
                        }
                        self.phi[i] = q;
                    }
                }
            }
        }
        self.active = self.activate_around(&changed);
        !self.active.is_empty()
    }

    pub fn run(mut self, schedule: Schedule) -> Vec<f64> {
        while self.step(schedule) {}
        self.phi
    }

    /// Largest `φ - update(φ)` over non-pinned nodes.
    pub fn max_residual(&self) -> f64 {
        max_residual(self.graph, &self.phi, &self.pinned)
    }
}

/// Largest `|φ_i - update_i(φ)|` over the nodes not marked in `pinned`.
pub fn max_residual<G: UpwindGraph + ?Sized>(graph: &G, phi: &[f64], pinned: &[bool]) -> f64 {
    (0..graph.node_count())
        .into_par_iter()
        .filter(|&i| !pinned[i])
        .map(|i| {
            let q = upwind_update(graph, phi, i);
            if q.is_finite() {
                (phi[i] - q).abs()
            } else {
                0.0
            }
        })
        .reduce(|| 0.0, f64::max)
}

/// Regular lattice as an upwind graph.
pub struct GridGraph<'a> {
    lattice: &'a ScalarGrid,
    speed: &'a SpeedField,
}

impl<'a> GridGraph<'a> {
    pub fn new(lattice: &'a ScalarGrid, speed: &'a SpeedField) -> Result<Self> {
        speed.validate(lattice.len())?;
        Ok(GridGraph { lattice, speed })
    }
}

impl UpwindGraph for GridGraph<'_> {
    fn node_count(&self) -> usize {
        self.lattice.len()
    }

    fn dim(&self) -> usize {
        self.lattice.dim()
    }

    #[inline]
    fn axis_neighbours(&self, node: usize, axis: usize) -> [Option<(usize, f64)>; 2] {
        let dims = self.lattice.dims();
        let ijk = self.lattice.coords(node);
        let stride = match axis {
            0 => 1,
            1 => dims[0],
            _ => dims[0] * dims[1],
        };
        let h = self.lattice.spacing()[axis];
        let lo = (ijk[axis] > 0).then(|| (node - stride, h));
        let hi = (ijk[axis] + 1 < dims[axis]).then(|| (node + stride, h));
        [lo, hi]
    }

    fn speed(&self, node: usize) -> f64 {
        self.speed.at(node)
    }
}

/// Default convergence tolerance for spacing `h`.
pub fn default_eps(h: f64) -> f64 {
    1e-6 * h
}

/// "Infinity" used for unreached nodes: ten box diagonals.
pub fn sentinel(bbox: &BoundingBox) -> f64 {
    10.0 * bbox.diagonal()
}

/// Nodes strictly closer than the smallest spacing to some seed, paired with
/// their exact distance to the nearest such seed.
pub fn grid_sources(lattice: &ScalarGrid, seeds: &SeedSet) -> Vec<(usize, f64)> {
    let d = lattice.dim();
    let dims = lattice.dims();
    let hmin = lattice.min_spacing();
    let mut best: Vec<(usize, f64)> = Vec::new();
    let mut slot = std::collections::HashMap::new();
    for s in &seeds.points {
        let g = lattice.world_to_grid(s);
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        for a in 0..d {
            let r = hmin / lattice.spacing()[a];
            lo[a] = ((g[a] - r).floor().max(0.0)) as usize;
            hi[a] = ((g[a] + r).ceil().max(0.0) as usize).min(dims[a] - 1);
        }
        for k in lo[2]..=hi[2] {
            for j in lo[1]..=hi[1] {
                for i in lo[0]..=hi[0] {
                    let idx = lattice.index(i, j, k);
                    let dist = lattice.node_position(idx).distance(s);
                    if dist < hmin {
                        let e = slot.entry(idx).or_insert_with(|| {
                            best.push((idx, dist));
                            best.len() - 1
                        });
                        best[*e].1 = best[*e].1.min(dist);
                    }
                }
            }
        }
    }
    best.sort_by_key(|b| b.0);
    best
}

/// Travel time from `seeds` over a regular lattice.
pub fn fim_solve(
    seeds: &SeedSet,
    speed: &SpeedField,
    dims: &[usize],
    bbox: BoundingBox,
    eps: f64,
) -> Result<ScalarGrid> {
    fim_solve_with(seeds, speed, dims, bbox, eps, Schedule::Jacobi)
}

pub fn fim_solve_with(
    seeds: &SeedSet,
    speed: &SpeedField,
    dims: &[usize],
    bbox: BoundingBox,
    eps: f64,
    schedule: Schedule,
) -> Result<ScalarGrid> {
    if seeds.is_empty() {
        return Err(HfrepError::EmptyBoundary);
    }
    let lattice = ScalarGrid::filled(dims, bbox, 0.0)?;
    let graph = GridGraph::new(&lattice, speed)?;
    let mut sources = grid_sources(&lattice, seeds);
    for s in &mut sources {
        s.1 /= speed.at(s.0);
    }
    if sources.is_empty() {
        return Err(invalid("no lattice node lies within one cell of a seed"));
    }
    let phi = FimSolver::new(&graph, &sources, sentinel(&bbox), eps)?.run(schedule);
    Ok(lattice.with_values(phi))
}

/// Exact distance from `p` to the circle of radius `r` about the origin;
/// handy as an oracle.
pub fn circle_udf(p: &Point, r: f64) -> f64 {
    (p.norm() - r).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dt::extract_seeds;
    use crate::frep::{sample_frep, FRepNode, Primitive};

    #[test]
    fn godunov_examples() {
        let inf = f64::INFINITY;
        assert_eq!(godunov_update(0.0, inf, 1.0, 1.0, 1.0), 1.0);
        assert!((godunov_update(0.0, 0.0, 1.0, 1.0, 1.0) - 0.5f64.sqrt()).abs() < 1e-15);
        let expected = (0.5 + (2.0f64 - 0.25).sqrt()) / 2.0;
        assert!((godunov_update(0.0, 0.5, 1.0, 1.0, 1.0) - expected).abs() < 1e-15);
        assert!((expected - 0.91144).abs() < 1e-5);
        // dimension dropping: the second neighbour is too far to matter
        assert_eq!(godunov_update(0.0, 2.0, 1.0, 1.0, 1.0), 1.0);
        assert_eq!(godunov_update(inf, inf, 1.0, 1.0, 1.0), inf);
    }

    #[test]
    fn godunov_satisfies_the_discrete_equation() {
        let pairs = [(0.3, 0.5), (0.1, 0.25), (0.45, 1.0)];
        let f = 1.7;
        let phi = godunov_nd(&pairs, f);
        let lhs: f64 = pairs.iter().map(|(v, h)| ((phi - v) / h).max(0.0).powi(2)).sum();
        assert!((lhs - 1.0 / (f * f)).abs() < 1e-12);
    }

    fn single_source(speed: f64) -> ScalarGrid {
        let bbox = BoundingBox::new2([-50.0, -50.0], [50.0, 50.0]).unwrap();
        let seeds = SeedSet::from_points(vec![Point::new(0.0, 0.0)]);
        fim_solve(&seeds, &SpeedField::Uniform(speed), &[101, 101], bbox, 1e-9).unwrap()
    }

    #[test]
    fn single_source_distance() {
        let g = single_source(1.0);
        let v = g.get(60, 50, 0);
        assert!((10.0..=12.0).contains(&v), "{v}");
        assert_eq!(g.get(50, 50, 0), 0.0);
    }

    #[test]
    fn speed_scaling() {
        let a = single_source(1.0);
        let b = single_source(0.5);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((2.0 * x - y).abs() <= 1e-9 * y.abs().max(1e-300));
        }
    }

    fn circle_seeds(n: usize) -> (SeedSet, BoundingBox) {
        let bbox = BoundingBox::centered_square(1.0);
        let c: FRepNode = Primitive::circle([0.0, 0.0], 0.6).unwrap().into();
        let g = sample_frep(&c, &[n, n], bbox).unwrap();
        (extract_seeds(&g).unwrap(), bbox)
    }

    #[test]
    fn circle_accuracy_and_residual() {
        let (seeds, bbox) = circle_seeds(129);
        let lattice = ScalarGrid::filled(&[129, 129], bbox, 0.0).unwrap();
        let speed = SpeedField::default();
        let graph = GridGraph::new(&lattice, &speed).unwrap();
        let sources = grid_sources(&lattice, &seeds);
        let eps = default_eps(lattice.min_spacing());
        let mut solver = FimSolver::new(&graph, &sources, sentinel(&bbox), eps).unwrap();
        let mut prev = solver.values().to_vec();
        while solver.step(Schedule::Jacobi) {
            for (a, b) in solver.values().iter().zip(&prev) {
                assert!(a <= b, "values must not increase");
            }
            prev = solver.values().to_vec();
        }
        assert!(solver.max_residual() <= eps * 10.0);
        let h = lattice.min_spacing();
        for (i, v) in solver.values().iter().enumerate() {
            let exact = circle_udf(&lattice.node_position(i), 0.6);
            assert!((v - exact).abs() <= 2.0 * h);
        }
    }

    #[test]
    fn schedule_independence() {
        let (seeds, bbox) = circle_seeds(65);
        let speed = SpeedField::default();
        let run = |s| fim_solve_with(&seeds, &speed, &[65, 65], bbox, 1e-13, s).unwrap();
        let j = run(Schedule::Jacobi);
        let g = run(Schedule::GaussSeidel);
        let r = run(Schedule::GaussSeidelReversed);
        assert!(j.max_abs_diff(&g) <= 1e-9);
        assert!(j.max_abs_diff(&r) <= 1e-9);
    }

    #[test]
    fn three_dimensional_point_source() {
        let bbox = BoundingBox::centered_cube(1.0);
        let seeds = SeedSet::from_points(vec![Point::new3(0.0, 0.0, 0.0)]);
        let g = fim_solve(&seeds, &SpeedField::default(), &[21, 21, 21], bbox, 1e-9).unwrap();
        let h = g.spacing()[0];
        for i in 0..g.len() {
            let exact = g.node_position(i).norm();
            let v = g.values()[i];
            assert!(v >= exact - 1e-9 && v <= exact * 1.25 + 2.0 * h);
        }
    }

    #[test]
    fn rejects_empty_sources_and_bad_speed() {
        let bbox = BoundingBox::centered_square(1.0);
        assert!(fim_solve(&SeedSet::default(), &SpeedField::default(), &[5, 5], bbox, 1e-6).is_err());
        let seeds = SeedSet::from_points(vec![Point::new(0.0, 0.0)]);
        assert!(fim_solve(&seeds, &SpeedField::Uniform(0.0), &[5, 5], bbox, 1e-6).is_err());
    }
}
