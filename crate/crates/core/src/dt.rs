//! Boundary seeds and the vector distance transform.
//!
//! Seeds are sub-cell points where the linear interpolant of a sampled field
//! crosses zero. The transform propagates, for every node, the index of its
//! nearest seed with alternating forward and backward raster sweeps over the
//! full 8 (2D) or 26 (3D) neighbourhood, repeated until nothing changes.

use rayon::prelude::*;

use crate::error::{HfrepError, Result};
use crate::frep::FRepNode;
use crate::grid::{BoundingBox, Point, ScalarGrid};

/// Discretised boundary: world positions of the zero crossings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeedSet {
    pub points: Vec<Point>,
}

impl SeedSet {
    pub fn from_points(points: Vec<Point>) -> Self {
        SeedSet { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from `p` to the nearest seed, by exhaustive search.
    pub fn brute_force_distance(&self, p: &Point) -> f64 {
        self.points
            .iter()
            .map(|s| s.distance_sq(p))
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }
}

/// Inside means strictly positive.
#[inline]
pub(crate) fn crosses(a: f64, b: f64) -> bool {
    (a > 0.0) != (b > 0.0)
}

/// Parameter in `[0, 1]` where the segment from value `a` to `b` crosses 0.
#[inline]
pub(crate) fn crossing_parameter(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d == 0.0 {
        0.5
    } else {
        (a / d).clamp(0.0, 1.0)
    }
}

/// One seed per lattice edge whose end values change sign, placed where the
/// linear interpolant along the edge vanishes.
pub fn extract_seeds(g: &ScalarGrid) -> Result<SeedSet> {
    let dims = g.dims();
    let mut points = Vec::new();
    for idx in 0..g.len() {
        let ijk = g.coords(idx);
        let a = g.values()[idx];
        for axis in 0..g.dim() {
            if ijk[axis] + 1 >= dims[axis] {
                continue;
            }
            let mut n = ijk;
            n[axis] += 1;
            let b = g.get(n[0], n[1], n[2]);
            if crosses(a, b) {
                let t = crossing_parameter(a, b);
                let mut frac = [ijk[0] as f64, ijk[1] as f64, ijk[2] as f64];
                frac[axis] += t;
                points.push(g.grid_to_world(frac));
            }
        }
    }
    if points.is_empty() {
        return Err(HfrepError::EmptyBoundary);
    }
    Ok(SeedSet { points })
}

/// Edge-crossing seeds of `sampled` (which must be `frep` sampled on its
/// lattice) plus the exact nearest surface point of every node on a crossing
/// edge. The extra seeds make distances exact next to the boundary, where
/// the crossing points alone would leave gaps of up to half a cell.
pub fn surface_seeds(frep: &FRepNode, sampled: &ScalarGrid) -> Result<SeedSet> {
    let mut seeds = extract_seeds(sampled)?;
    let dims = sampled.dims();
    let mut band = vec![false; sampled.len()];
    for idx in 0..sampled.len() {
        let ijk = sampled.coords(idx);
        for axis in 0..sampled.dim() {
            if ijk[axis] + 1 < dims[axis] {
                let mut n = ijk;
                n[axis] += 1;
                let other = sampled.index(n[0], n[1], n[2]);
                if crosses(sampled.values()[idx], sampled.values()[other]) {
                    band[idx] = true;
                    band[other] = true;
                }
            }
        }
    }
    let spacing = sampled.spacing();
    let reach = 2.0 * spacing[..sampled.dim()].iter().map(|h| h * h).sum::<f64>().sqrt();
    let feet: Vec<Point> = (0..sampled.len())
        .into_par_iter()
        .filter(|&i| band[i])
        .filter_map(|i| frep.foot_point(&sampled.node_position(i), sampled.dim(), reach))
        .collect();
    seeds.points.extend(feet);
    Ok(seeds)
}

/// Nearest-seed assignment for every node of a lattice.
#[derive(Debug, Clone)]
pub struct VectorDtField {
    lattice: ScalarGrid,
    nearest: Vec<usize>,
    seeds: Vec<Point>,
}

impl VectorDtField {
    /// Vector from node `idx` to its recorded boundary point.
    pub fn offset(&self, idx: usize) -> Point {
        self.seeds[self.nearest[idx]] - self.lattice.node_position(idx)
    }

    pub fn nearest_seed(&self, idx: usize) -> usize {
        self.nearest[idx]
    }

    /// Unsigned distance field, `|offset|` per node.
    pub fn udf(&self) -> ScalarGrid {
        let values = (0..self.lattice.len()).map(|i| self.offset(i).norm()).collect();
        self.lattice.with_values(values)
    }

    /// Distances to the zero level of `frep` itself: within a few cells of
    /// the boundary, each node's recorded seed is polished into the exact
    /// nearest surface point. Elsewhere, and where polishing fails, the seed
    /// distance is kept.
    pub fn refined_udf(&self, frep: &FRepNode) -> ScalarGrid {
        let dim = self.lattice.dim();
        let h = self.lattice.min_spacing();
        let values = (0..self.lattice.len())
            .into_par_iter()
            .map(|i| {
                let p = self.lattice.node_position(i);
                let s = self.seeds[self.nearest[i]];
                let d0 = p.distance(&s);
                if d0 > POLISH_BAND * h {
                    return d0;
                }
                frep.foot_point_from(&p, &s, dim, d0 + h)
                    .map_or(d0, |f| d0.min(p.distance(&f)))
            })
            .collect();
        self.lattice.with_values(values)
    }
}

/// Width, in cells, of the band where [`VectorDtField::refined_udf`]
/// polishes distances.
const POLISH_BAND: f64 = 4.0;

/// Orders candidates by squared distance, then lexicographically by offset.
#[inline]
fn better(d2: f64, off: &Point, best_d2: f64, best_off: &Point) -> bool {
    if d2 != best_d2 {
        return d2 < best_d2;
    }
    for a in 0..3 {
        if off.0[a] != best_off.0[a] {
            return off.0[a] < best_off.0[a];
        }
    }
    false
}

pub fn vector_dt(seeds: &SeedSet, dims: &[usize], bbox: BoundingBox) -> Result<VectorDtField> {
    if seeds.is_empty() {
        return Err(HfrepError::EmptyBoundary);
    }
    let lattice = ScalarGrid::filled(dims, bbox, 0.0)?;
    let n = lattice.len();
    let d = lattice.dim();
    let ldims = lattice.dims();
    let pos: Vec<Point> = (0..n).map(|i| lattice.node_position(i)).collect();

    const NONE: usize = usize::MAX;
    let mut nearest = vec![NONE; n];
    let mut dist2 = vec![f64::INFINITY; n];

    let offer = |node: usize, s: usize, nearest: &mut [usize], dist2: &mut [f64]| -> bool {
        let off = seeds.points[s] - pos[node];
        let d2 = off.dot(&off);
        let take = nearest[node] == NONE || {
            let cur = seeds.points[nearest[node]] - pos[node];
            better(d2, &off, dist2[node], &cur)
        };
        if take {
            nearest[node] = s;
            dist2[node] = d2;
        }
        take
    };

    // every seed claims the corners of the cell that contains it
    for (s, p) in seeds.points.iter().enumerate() {
        let (cell, _) = lattice.locate(lattice.world_to_grid(p));
        for corner in 0..(1usize << d) {
            let mut ijk = cell;
            for a in 0..d {
                ijk[a] += (corner >> a) & 1;
            }
            offer(lattice.index(ijk[0], ijk[1], ijk[2]), s, &mut nearest, &mut dist2);
        }
    }

    // neighbour offsets split by raster order
    let mut before = Vec::new();
    let mut after = Vec::new();
    let span = |a: usize| if a < d { -1i64..=1 } else { 0..=0 };
    for dz in span(2) {
        for dy in span(1) {
            for dx in span(0) {
                let key = (dz, dy, dx);
                if key < (0, 0, 0) {
                    before.push([dx, dy, dz]);
                } else if key > (0, 0, 0) {
                    after.push([dx, dy, dz]);
                }
            }
        }
    }

    let neighbour = |idx: usize, o: &[i64; 3]| -> Option<usize> {
        let ijk = lattice.coords(idx);
        let mut q = [0usize; 3];
        for a in 0..3 {
            let v = ijk[a] as i64 + o[a];
            if v < 0 || v >= ldims[a] as i64 {
                return None;
            }
            q[a] = v as usize;
        }
        Some(lattice.index(q[0], q[1], q[2]))
    };

    for _ in 0..64 {
        let mut changed = false;
        for idx in 0..n {
            for o in &before {
                if let Some(nb) = neighbour(idx, o) {
                    if nearest[nb] != NONE && nearest[nb] != nearest[idx] {
                        changed |= offer(idx, nearest[nb], &mut nearest, &mut dist2);
                    }
                }
            }
        }
        for idx in (0..n).rev() {
            for o in &after {
                if let Some(nb) = neighbour(idx, o) {
                    if nearest[nb] != NONE && nearest[nb] != nearest[idx] {
                        changed |= offer(idx, nearest[nb], &mut nearest, &mut dist2);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    Ok(VectorDtField { lattice, nearest, seeds: seeds.points.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frep::{sample_frep, FRepNode, Primitive};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_box() -> BoundingBox {
        BoundingBox::new2([0.0, 0.0], [1.0, 1.0]).unwrap()
    }

    #[test]
    fn seed_on_single_edge() {
        let g = ScalarGrid::new(&[2, 2], unit_box(), vec![-1.0, 1.0, -1.0, 1.0]).unwrap();
        let s = extract_seeds(&g).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.points[0].x() - 0.5).abs() < 1e-15);

        let g = ScalarGrid::new(&[2, 2], unit_box(), vec![-1.0, 3.0, -1.0, 3.0]).unwrap();
        let s = extract_seeds(&g).unwrap();
        assert!((s.points[0].x() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        let g = ScalarGrid::filled(&[4, 4], unit_box(), 1.0).unwrap();
        assert!(matches!(extract_seeds(&g), Err(HfrepError::EmptyBoundary)));
        assert!(vector_dt(&SeedSet::default(), &[4, 4], unit_box()).is_err());
    }

    #[test]
    fn circle_seeds_lie_on_the_circle() {
        let c: FRepNode = Primitive::circle([0.0, 0.0], 0.5).unwrap().into();
        let g = sample_frep(&c, &[129, 129], BoundingBox::centered_square(1.0)).unwrap();
        let s = extract_seeds(&g).unwrap();
        assert!(s.len() > 100);
        for p in &s.points {
            assert!((p.norm() - 0.5).abs() < 1e-3);
        }
    }

    #[test]
    fn single_seed_and_line() {
        let bbox = BoundingBox::new2([0.0, 0.0], [10.0, 10.0]).unwrap();
        let seeds = SeedSet::from_points(vec![Point::new(0.0, 0.0)]);
        let f = vector_dt(&seeds, &[11, 11], bbox).unwrap().udf();
        assert!((f.get(3, 4, 0) - 5.0).abs() < 1e-12);

        let line = SeedSet::from_points((0..11).map(|j| Point::new(0.0, j as f64)).collect());
        let f = vector_dt(&line, &[11, 11], bbox).unwrap().udf();
        for j in 0..11 {
            assert!((f.get(5, j, 0) - 5.0).abs() < 1e-12);
        }
    }

    fn random_seeds(rng: &mut ChaCha8Rng, n: usize, bbox: &BoundingBox) -> SeedSet {
        SeedSet::from_points(
            (0..n)
                .map(|_| {
                    let mut p = [0.0; 3];
                    for a in 0..bbox.dim {
                        p[a] = rng.gen_range(bbox.min.0[a]..bbox.max.0[a]);
                    }
                    Point(p)
                })
                .collect(),
        )
    }

    #[test]
    fn matches_brute_force_2d() {
        let bbox = BoundingBox::centered_square(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let seeds = random_seeds(&mut rng, 200, &bbox);
            let f = vector_dt(&seeds, &[64, 64], bbox).unwrap().udf();
            let h = f.spacing()[0];
            for i in 0..f.len() {
                let exact = seeds.brute_force_distance(&f.node_position(i));
                assert!((f.values()[i] - exact).abs() <= 0.1 * h);
                assert!(f.values()[i] >= 0.0);
            }
        }
    }

    #[test]
    fn matches_brute_force_3d() {
        let bbox = BoundingBox::centered_cube(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let seeds = random_seeds(&mut rng, 60, &bbox);
        let f = vector_dt(&seeds, &[20, 20, 20], bbox).unwrap().udf();
        let h = f.spacing()[0];
        for i in 0..f.len() {
            let exact = seeds.brute_force_distance(&f.node_position(i));
            assert!((f.values()[i] - exact).abs() <= 0.1 * h);
        }
    }

    #[test]
    fn neighbour_lipschitz() {
        let bbox = BoundingBox::centered_square(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let seeds = random_seeds(&mut rng, 50, &bbox);
        let f = vector_dt(&seeds, &[48, 48], bbox).unwrap().udf();
        let h = f.spacing()[0];
        for j in 0..48 {
            for i in 0..47 {
                assert!((f.get(i, j, 0) - f.get(i + 1, j, 0)).abs() <= 2.0 * h);
                assert!((f.get(j, i, 0) - f.get(j, i + 1, 0)).abs() <= 2.0 * h);
            }
        }
    }
}
