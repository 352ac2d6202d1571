use std::collections::HashMap;
use std::fmt::Write;

use crate::dt::{crosses, crossing_parameter};
use crate::error::{invalid, HfrepError, Result};
use crate::grid::{Point, ScalarGrid};

/// Closed polyline; the last vertex connects back to the first. Outer
/// boundaries run counter-clockwise (interior on the left).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLoop {
    points: Vec<Point>,
}

impl BoundaryLoop {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < 3 {
            return Err(invalid("a boundary loop needs at least 3 vertices"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(invalid("boundary vertices must be finite"));
        }
        Ok(BoundaryLoop { points })
    }

    /// Regular `n`-gon of radius `r` about `c`, counter-clockwise.
    pub fn regular(n: usize, c: Point, r: f64) -> Result<Self> {
        let pts = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Point::new(c.x() + r * a.cos(), c.y() + r * a.sin())
            })
            .collect();
        Self::new(pts)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Length of edge `i` (from vertex `i` to `i + 1`).
    pub fn edge_length(&self, i: usize) -> f64 {
        let n = self.points.len();
        self.points[i].distance(&self.points[(i + 1) % n])
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.edge_length(i)).collect()
    }

    pub fn perimeter(&self) -> f64 {
        self.edge_lengths().iter().sum()
    }

    /// Shoelace area; positive for counter-clockwise loops.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (self.points[i], self.points[(i + 1) % n]);
                a.x() * b.y() - b.x() * a.y()
            })
            .sum::<f64>()
    }

    /// Winding-number containment (boundary points count as inside).
    pub fn contains(&self, q: &Point) -> bool {
        let n = self.points.len();
        let mut winding = 0i32;
        for i in 0..n {
            let (a, b) = (self.points[i], self.points[(i + 1) % n]);
            if segment_distance(q, &a, &b) < 1e-12 {
                return true;
            }
            let cross = (b.x() - a.x()) * (q.y() - a.y()) - (q.x() - a.x()) * (b.y() - a.y());
            if a.y() <= q.y() {
                if b.y() > q.y() && cross > 0.0 {
                    winding += 1;
                }
            } else if b.y() <= q.y() && cross < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }

    /// `n` points equally spaced by arc length, starting at vertex 0.
    pub fn resample(&self, n: usize) -> Result<Self> {
        let lens = self.edge_lengths();
        let total: f64 = lens.iter().sum();
        if total <= 0.0 {
            return Err(invalid("cannot resample a loop of zero length"));
        }
        let mut out = Vec::with_capacity(n);
        let (mut edge, mut start) = (0usize, 0.0f64);
        for k in 0..n {
            let s = total * k as f64 / n as f64;
            while edge + 1 < lens.len() && start + lens[edge] < s {
                start += lens[edge];
                edge += 1;
            }
            let t = if lens[edge] > 0.0 { ((s - start) / lens[edge]).clamp(0.0, 1.0) } else { 0.0 };
            let a = self.points[edge];
            let b = self.points[(edge + 1) % self.len()];
            out.push(a.lerp(&b, t));
        }
        Self::new(out)
    }

    /// One `x y` line per vertex.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            writeln!(s, "{:?} {:?}", p.x(), p.y()).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut pts = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let nums: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| HfrepError::Parse(format!("bad number '{t}'"))))
                .collect::<Result<_>>()?;
            if nums.len() != 2 {
                return Err(HfrepError::Parse(format!("expected 'x y', got '{line}'")));
            }
            pts.push(Point::new(nums[0], nums[1]));
        }
        Self::new(pts)
    }
}

pub(crate) fn segment_distance(q: &Point, a: &Point, b: &Point) -> f64 {
    let ab = *b - *a;
    let len2 = ab.dot(&ab);
    let t = if len2 > 0.0 { ((*q - *a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    q.distance(&a.lerp(b, t))
}

/// Edge of the lattice: lower node and axis.
type EdgeId = (usize, usize);

/// Traces the zero level of a 2D grid into closed loops with marching
/// squares. Outer boundaries come out counter-clockwise, holes clockwise.
/// Ambiguous cells are resolved by the average of their corners.
pub fn extract_boundary(g: &ScalarGrid) -> Result<Vec<BoundaryLoop>> {
    if g.dim() != 2 {
        return Err(invalid("boundary extraction is two-dimensional"));
    }
    let [nx, ny, _] = g.dims();
    let point_on = |e: EdgeId| -> Point {
        let (node, axis) = e;
        let [i, j, _] = g.coords(node);
        let a = g.values()[node];
        let b = if axis == 0 { g.get(i + 1, j, 0) } else { g.get(i, j + 1, 0) };
        let t = crossing_parameter(a, b);
        let mut frac = [i as f64, j as f64, 0.0];
        frac[axis] += t;
        g.grid_to_world(frac)
    };

    let mut next: HashMap<EdgeId, EdgeId> = HashMap::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let idx = [g.index(i, j, 0), g.index(i + 1, j, 0), g.index(i + 1, j + 1, 0), g.index(i, j + 1, 0)];
            let v = idx.map(|k| g.values()[k]);
            // edges in counter-clockwise order: bottom, right, top, left
            let edges: [EdgeId; 4] = [(idx[0], 0), (idx[1], 1), (idx[3], 0), (idx[0], 1)];
            let mut out_cross = Vec::new(); // inside -> outside
            let mut in_cross = Vec::new(); // outside -> inside
            for k in 0..4 {
                let (a, b) = (v[k], v[(k + 1) % 4]);
                if crosses(a, b) {
                    if a > 0.0 {
                        out_cross.push(k);
                    } else {
                        in_cross.push(k);
                    }
                }
            }
            if out_cross.is_empty() {
                continue;
            }
            let saddle = out_cross.len() == 2;
            let centre_inside = v.iter().sum::<f64>() / 4.0 > 0.0;
            for &k in &out_cross {
                // partner: next in-crossing going forward, unless an
                // outside centre splits the inside corners
                let partner = if saddle && !centre_inside {
                    (1..4).map(|s| (k + 4 - s) % 4).find(|e| in_cross.contains(e))
                } else {
                    (1..4).map(|s| (k + s) % 4).find(|e| in_cross.contains(e))
                }
                .expect("every out-crossing has an in-crossing");
                next.insert(edges[k], edges[partner]);
            }
        }
    }
    if next.is_empty() {
        return Err(HfrepError::EmptyBoundary);
    }

    let mut starts: Vec<EdgeId> = next.keys().copied().collect();
    starts.sort_unstable();
    let mut visited = std::collections::HashSet::new();
    let mut loops = Vec::new();
    let tol = 1e-12 * g.min_spacing();
    for s in starts {
        if visited.contains(&s) {
            continue;
        }
        let mut pts: Vec<Point> = Vec::new();
        let mut e = s;
        loop {
            visited.insert(e);
            let p = point_on(e);
            if pts.last().map_or(true, |l: &Point| l.distance(&p) > tol) {
                pts.push(p);
            }
            e = *next.get(&e).ok_or_else(|| {
                HfrepError::Precondition("zero level reaches the grid border; loop is open".into())
            })?;
            if e == s {
                break;
            }
        }
        if pts.len() > 1 && pts[0].distance(pts.last().unwrap()) <= tol {
            pts.pop();
        }
        if pts.len() >= 3 {
            loops.push(BoundaryLoop::new(pts)?);
        }
    }
    Ok(loops)
}

/// Loop enclosing the largest counter-clockwise area.
pub fn outer_loop(loops: &[BoundaryLoop]) -> Result<&BoundaryLoop> {
    loops
        .iter()
        .filter(|l| l.signed_area() > 0.0)
        .max_by(|a, b| a.signed_area().total_cmp(&b.signed_area()))
        .ok_or(HfrepError::EmptyBoundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frep::{sample_frep, BinaryOp, FRepNode, Primitive};
    use crate::grid::BoundingBox;

    fn grid_of(tree: &FRepNode, n: usize) -> ScalarGrid {
        sample_frep(tree, &[n, n], BoundingBox::centered_square(1.0)).unwrap()
    }

    #[test]
    fn circle_gives_one_ccw_loop_on_the_circle() {
        let c: FRepNode = Primitive::circle([0.0, 0.0], 0.5).unwrap().into();
        let loops = extract_boundary(&grid_of(&c, 129)).unwrap();
        assert_eq!(loops.len(), 1);
        assert!(loops[0].signed_area() > 0.0);
        for p in loops[0].points() {
            assert!((p.norm() - 0.5).abs() < 1e-3);
        }
        assert!(loops[0].edge_lengths().iter().all(|&l| l > 0.0));
    }

    #[test]
    fn two_circles_two_loops_and_holes_are_clockwise() {
        let a: FRepNode = Primitive::circle([-0.5, 0.0], 0.3).unwrap().into();
        let b: FRepNode = Primitive::circle([0.5, 0.0], 0.3).unwrap().into();
        let u = FRepNode::binary(BinaryOp::UnionR1, a, b).unwrap();
        assert_eq!(extract_boundary(&grid_of(&u, 101)).unwrap().len(), 2);

        let ring = FRepNode::binary(
            BinaryOp::SubtractR1,
            Primitive::circle([0.0, 0.0], 0.7).unwrap(),
            Primitive::circle([0.0, 0.0], 0.3).unwrap(),
        )
        .unwrap();
        let loops = extract_boundary(&grid_of(&ring, 101)).unwrap();
        assert_eq!(loops.len(), 2);
        let areas: Vec<f64> = loops.iter().map(|l| l.signed_area()).collect();
        assert!(areas.iter().any(|&a| a > 0.0) && areas.iter().any(|&a| a < 0.0));
        assert!((outer_loop(&loops).unwrap().signed_area() - std::f64::consts::PI * 0.49).abs() < 0.01);
    }

    #[test]
    fn square_has_four_axis_aligned_runs() {
        let sq: FRepNode = Primitive::rectangle([0.0, 0.0], [0.503, 0.503]).unwrap().into();
        let loops = extract_boundary(&grid_of(&sq, 65)).unwrap();
        assert_eq!(loops.len(), 1);
        let l = &loops[0];
        let n = l.len();
        let aligned: Vec<bool> = (0..n)
            .map(|i| {
                let (a, b) = (l.points()[i], l.points()[(i + 1) % n]);
                let (dx, dy) = ((a.x() - b.x()).abs(), (a.y() - b.y()).abs());
                dx < 0.05 * dy || dy < 0.05 * dx
            })
            .collect();
        // count maximal runs of aligned edges around the cycle
        let runs = (0..n).filter(|&i| aligned[i] && !aligned[(i + n - 1) % n]).count();
        assert_eq!(runs, 4);
    }

    #[test]
    fn empty_and_open_boundaries() {
        let g = ScalarGrid::filled(&[8, 8], BoundingBox::centered_square(1.0), 1.0).unwrap();
        assert!(matches!(extract_boundary(&g), Err(HfrepError::EmptyBoundary)));
        let half: FRepNode = Primitive::circle([1.0, 0.0], 0.5).unwrap().into();
        assert!(extract_boundary(&grid_of(&half, 33)).is_err());
    }

    #[test]
    fn resample_and_text_round_trip() {
        let l = BoundaryLoop::regular(10, Point::ORIGIN, 1.0).unwrap();
        let r = l.resample(40).unwrap();
        assert_eq!(r.len(), 40);
        let lens = r.edge_lengths();
        let mean = lens.iter().sum::<f64>() / 40.0;
        assert!(lens.iter().all(|x| (x - mean).abs() < 0.2 * mean));
        assert_eq!(BoundaryLoop::from_text(&r.to_text()).unwrap(), r);
        assert!(r.contains(&Point::new(0.1, 0.2)));
        assert!(!r.contains(&Point::new(1.1, 0.0)));
    }
}
