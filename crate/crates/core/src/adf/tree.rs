use std::collections::HashMap;
use std::fmt::Write;

use crate::dt::crosses;
use crate::error::{invalid, HfrepError, Result};
use crate::frep::FRepNode;
use crate::grid::{BoundingBox, Point};

pub(crate) const NO_CHILD: u32 = u32::MAX;

/// A square cell on the integer lattice of the finest level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    /// Lower-left corner in finest-level lattice units.
    pub origin: [u32; 2],
    /// Side length in lattice units (`2^(max_depth - depth)`).
    pub size: u32,
    pub depth: u8,
    /// Children in the order (lo,lo), (hi,lo), (lo,hi), (hi,hi).
    pub children: [u32; 4],
}

impl Cell {
    pub fn is_leaf(&self) -> bool {
        self.children[0] == NO_CHILD
    }
}

/// Directions of the vertex graph, `[-x, +x, -y, +y]`.
pub const DIRS: [(usize, i64); 4] = [(0, -1), (0, 1), (1, -1), (1, 1)];

/// Balanced quadtree refined towards the zero level of an FRep, plus the
/// vertex graph formed by leaf corners.
#[derive(Debug, Clone)]
pub struct AdfTree {
    bbox: BoundingBox,
    min_depth: u8,
    max_depth: u8,
    unit: [f64; 2],
    cells: Vec<Cell>,
    leaves: Vec<u32>,
    vertices: Vec<[u32; 2]>,
    vertex_index: HashMap<[u32; 2], u32>,
    /// Per vertex and direction: neighbour vertex and lattice distance.
    adjacency: Vec<[Option<(u32, u32)>; 4]>,
    /// Coarse leaf on whose edge interior a vertex sits, if any.
    hanging: Vec<Option<u32>>,
}

/// Tree statistics for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeStats {
    pub leaf_count: usize,
    pub vertex_count: usize,
    pub hanging_count: usize,
    /// Leaf count per depth, index = depth.
    pub depth_histogram: Vec<usize>,
    /// Node count of the uniform grid at the finest level.
    pub full_grid_nodes: usize,
}

impl TreeStats {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "leaves {}", self.leaf_count).unwrap();
        writeln!(s, "vertices {}", self.vertex_count).unwrap();
        writeln!(s, "hanging {}", self.hanging_count).unwrap();
        writeln!(s, "full_grid_nodes {}", self.full_grid_nodes).unwrap();
        writeln!(
            s,
            "vertex_ratio {:.6}",
            self.vertex_count as f64 / self.full_grid_nodes as f64
        )
        .unwrap();
        for (d, n) in self.depth_histogram.iter().enumerate() {
            if *n > 0 {
                writeln!(s, "depth {d} {n}").unwrap();
            }
        }
        s
    }
}

/// Samples per cell side used to detect the zero level inside a cell.
const PROBES: u32 = 5;

impl AdfTree {
    /// Builds the tree: every leaf reaches `min_depth`; a cell whose 5×5
    /// probe samples of `frep` change sign is split down to `max_depth`;
    /// finally edge-adjacent leaves are balanced to differ by at most one
    /// level.
    pub fn build(frep: &FRepNode, min_depth: u32, max_depth: u32, bbox: BoundingBox) -> Result<Self> {
        if !(1 <= min_depth && min_depth <= max_depth && max_depth <= 12) {
            return Err(invalid(format!(
                "depths must satisfy 1 <= min ({min_depth}) <= max ({max_depth}) <= 12"
            )));
        }
        if bbox.dim != 2 {
            return Err(invalid("adaptive trees are two-dimensional"));
        }
        let n = 1u32 << max_depth;
        let unit = [bbox.extent(0) / n as f64, bbox.extent(1) / n as f64];
        let mut tree = AdfTree {
            bbox,
            min_depth: min_depth as u8,
            max_depth: max_depth as u8,
            unit,
            cells: vec![Cell { origin: [0, 0], size: n, depth: 0, children: [NO_CHILD; 4] }],
            leaves: Vec::new(),
            vertices: Vec::new(),
            vertex_index: HashMap::new(),
            adjacency: Vec::new(),
            hanging: Vec::new(),
        };
        let mut stack = vec![0u32];
        while let Some(c) = stack.pop() {
            let cell = tree.cells[c as usize];
            let depth = cell.depth as u32;
            let refine = depth < min_depth || (depth < max_depth && tree.crosses_zero(frep, &cell));
            if refine {
                stack.extend(tree.split(c));
            }
        }
        tree.balance();
        tree.index_vertices();
        Ok(tree)
    }

    fn crosses_zero(&self, frep: &FRepNode, cell: &Cell) -> bool {
        let mut any_in = false;
        let mut any_out = false;
        for j in 0..PROBES {
            for i in 0..PROBES {
                let g = [
                    cell.origin[0] as f64 + cell.size as f64 * i as f64 / (PROBES - 1) as f64,
                    cell.origin[1] as f64 + cell.size as f64 * j as f64 / (PROBES - 1) as f64,
                ];
                let v = frep.eval(&self.lattice_to_world(g));
                if v > 0.0 {
                    any_in = true;
                } else {
                    any_out = true;
                }
                if any_in && any_out {
                    return true;
                }
            }
        }
        false
    }

    fn split(&mut self, c: u32) -> [u32; 4] {
        let cell = self.cells[c as usize];
        debug_assert!(cell.is_leaf() && cell.size >= 2);
        let half = cell.size / 2;
        let base = self.cells.len() as u32;
        for k in 0..4u32 {
            self.cells.push(Cell {
                origin: [cell.origin[0] + (k & 1) * half, cell.origin[1] + (k >> 1) * half],
                size: half,
                depth: cell.depth + 1,
                children: [NO_CHILD; 4],
            });
        }
        let kids = [base, base + 1, base + 2, base + 3];
        self.cells[c as usize].children = kids;
        kids
    }

    /// Leaf containing the lattice point `g`, or `None` outside the root.
    pub fn locate_lattice(&self, g: [f64; 2]) -> Option<u32> {
        let n = self.cells[0].size as f64;
        if !(0.0..=n).contains(&g[0]) || !(0.0..=n).contains(&g[1]) {
            return None;
        }
        let mut c = 0u32;
        loop {
            let cell = &self.cells[c as usize];
            if cell.is_leaf() {
                return Some(c);
            }
            let half = (cell.size / 2) as f64;
            let hx = (g[0] >= cell.origin[0] as f64 + half) as usize;
            let hy = (g[1] >= cell.origin[1] as f64 + half) as usize;
            c = cell.children[hx + 2 * hy];
        }
    }

    /// Leaf containing a world point.
    pub fn locate(&self, p: &Point) -> Result<u32> {
        if !self.bbox.contains(p) {
            return Err(HfrepError::Domain { point: p.0, what: "quadtree bounding box" });
        }
        let n = self.cells[0].size as f64;
        let g = self.world_to_lattice(p);
        let g = [g[0].clamp(0.0, n), g[1].clamp(0.0, n)];
        Ok(self.locate_lattice(g).expect("clamped point lies in the root"))
    }

    fn balance(&mut self) {
        loop {
            let mut to_split = Vec::new();
            let leaves = self.collect_leaves();
            for &l in &leaves {
                let cell = self.cells[l as usize];
                if cell.depth < 2 {
                    continue;
                }
                let (o, s) = ([cell.origin[0] as f64, cell.origin[1] as f64], cell.size as f64);
                let mid = [o[0] + s / 2.0, o[1] + s / 2.0];
                let probes = [
                    [o[0] - 0.5, mid[1]],
                    [o[0] + s + 0.5, mid[1]],
                    [mid[0], o[1] - 0.5],
                    [mid[0], o[1] + s + 0.5],
                ];
                for g in probes {
                    if let Some(nb) = self.locate_lattice(g) {
                        if self.cells[nb as usize].depth + 1 < cell.depth {
                            to_split.push(nb);
                        }
                    }
                }
            }
            if to_split.is_empty() {
                break;
            }
            to_split.sort_unstable();
            to_split.dedup();
            for c in to_split {
                if self.cells[c as usize].is_leaf() {
                    self.split(c);
                }
            }
        }
    }

    fn collect_leaves(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = vec![0u32];
        while let Some(c) = stack.pop() {
            let cell = &self.cells[c as usize];
            if cell.is_leaf() {
                out.push(c);
            } else {
                stack.extend(cell.children.iter().rev());
            }
        }
        out
    }

    fn index_vertices(&mut self) {
        self.leaves = self.collect_leaves();
        let mut corners: Vec<[u32; 2]> = Vec::with_capacity(self.leaves.len() * 4);
        for &l in &self.leaves {
            let c = self.cells[l as usize];
            let [x, y] = c.origin;
            let s = c.size;
            corners.extend([[x, y], [x + s, y], [x, y + s], [x + s, y + s]]);
        }
        // raster order: y major, x minor
        corners.sort_unstable_by_key(|v| (v[1], v[0]));
        corners.dedup();
        self.vertex_index = corners.iter().enumerate().map(|(i, v)| (*v, i as u32)).collect();
        self.vertices = corners;
        let nv = self.vertices.len();
        self.adjacency = vec![[None; 4]; nv];
        self.hanging = vec![None; nv];

        for li in 0..self.leaves.len() {
            let l = self.leaves[li];
            let c = self.cells[l as usize];
            let [x, y] = c.origin;
            let s = c.size;
            let edges = [
                ([x, y], [x + s, y]),
                ([x, y + s], [x + s, y + s]),
                ([x, y], [x, y + s]),
                ([x + s, y], [x + s, y + s]),
            ];
            for (a, b) in edges {
                let axis = if a[1] == b[1] { 0 } else { 1 };
                let ia = self.vertex_index[&a];
                let ib = self.vertex_index[&b];
                let m = [(a[0] + b[0]) / 2, (a[1] + b[1]) / 2];
                let mid = if s >= 2 { self.vertex_index.get(&m).copied() } else { None };
                match mid {
                    Some(im) => {
                        self.hanging[im as usize] = Some(l);
                        self.link(ia, im, axis, s / 2);
                        self.link(im, ib, axis, s / 2);
                    }
                    None => self.link(ia, ib, axis, s),
                }
            }
        }
    }

    fn link(&mut self, lo: u32, hi: u32, axis: usize, len: u32) {
        self.adjacency[lo as usize][2 * axis + 1] = Some((hi, len));
        self.adjacency[hi as usize][2 * axis] = Some((lo, len));
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn min_depth(&self) -> u32 {
        self.min_depth as u32
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth as u32
    }

    /// World size of one finest-level lattice unit per axis.
    pub fn unit(&self) -> [f64; 2] {
        self.unit
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, c: u32) -> &Cell {
        &self.cells[c as usize]
    }

    pub fn leaves(&self) -> &[u32] {
        &self.leaves
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_lattice(&self, v: u32) -> [u32; 2] {
        self.vertices[v as usize]
    }

    pub fn vertex_at(&self, g: [u32; 2]) -> Option<u32> {
        self.vertex_index.get(&g).copied()
    }

    pub fn vertex_position(&self, v: u32) -> Point {
        let [x, y] = self.vertices[v as usize];
        Point::new(
            self.bbox.min.0[0] + x as f64 * self.unit[0],
            self.bbox.min.0[1] + y as f64 * self.unit[1],
        )
    }

    /// Neighbour along direction `DIRS[dir]` with its world spacing.
    pub fn neighbour(&self, v: u32, dir: usize) -> Option<(u32, f64)> {
        self.adjacency[v as usize][dir].map(|(w, len)| (w, len as f64 * self.unit[dir / 2]))
    }

    /// Coarse leaf whose edge this vertex hangs on.
    pub fn hanging_on(&self, v: u32) -> Option<u32> {
        self.hanging[v as usize]
    }

    /// Smallest world spacing to any graph neighbour.
    pub fn local_spacing(&self, v: u32) -> f64 {
        (0..4)
            .filter_map(|d| self.neighbour(v, d).map(|n| n.1))
            .fold(f64::INFINITY, f64::min)
    }

    /// Corner vertices of a leaf in the order (0,0), (1,0), (0,1), (1,1).
    pub fn leaf_corners(&self, leaf: u32) -> [u32; 4] {
        let c = self.cells[leaf as usize];
        let [x, y] = c.origin;
        let s = c.size;
        [[x, y], [x + s, y], [x, y + s], [x + s, y + s]].map(|g| self.vertex_index[&g])
    }

    /// World-space rectangle of a cell.
    pub fn cell_rect(&self, c: u32) -> (Point, Point) {
        let cell = self.cells[c as usize];
        let lo = self.lattice_to_world([cell.origin[0] as f64, cell.origin[1] as f64]);
        let hi = self.lattice_to_world([
            (cell.origin[0] + cell.size) as f64,
            (cell.origin[1] + cell.size) as f64,
        ]);
        (lo, hi)
    }

    pub fn lattice_to_world(&self, g: [f64; 2]) -> Point {
        Point::new(
            self.bbox.min.0[0] + g[0] * self.unit[0],
            self.bbox.min.0[1] + g[1] * self.unit[1],
        )
    }

    pub fn world_to_lattice(&self, p: &Point) -> [f64; 2] {
        [
            (p.0[0] - self.bbox.min.0[0]) / self.unit[0],
            (p.0[1] - self.bbox.min.0[1]) / self.unit[1],
        ]
    }

    pub fn stats(&self) -> TreeStats {
        let mut hist = vec![0usize; self.max_depth as usize + 1];
        for &l in &self.leaves {
            hist[self.cells[l as usize].depth as usize] += 1;
        }
        let side = (1usize << self.max_depth) + 1;
        TreeStats {
            leaf_count: self.leaves.len(),
            vertex_count: self.vertices.len(),
            hanging_count: self.hanging.iter().filter(|h| h.is_some()).count(),
            depth_histogram: hist,
            full_grid_nodes: side * side,
        }
    }

    /// Leaves (other than `leaf`) sharing at least a corner with `leaf`.
    pub fn touching_leaves(&self, leaf: u32) -> Vec<u32> {
        let c = self.cells[leaf as usize];
        let (o, s) = ([c.origin[0] as f64, c.origin[1] as f64], c.size as f64);
        let mut out = Vec::new();
        // probe just outside every edge at a few positions and at the corners
        let ts = [-0.25, 0.25, 0.5, 0.75, 1.25];
        for t in ts {
            let along = [o[0] + t * s, o[1] + t * s];
            for g in [
                [along[0], o[1] - 0.25],
                [along[0], o[1] + s + 0.25],
                [o[0] - 0.25, along[1]],
                [o[0] + s + 0.25, along[1]],
            ] {
                if let Some(nb) = self.locate_lattice(g) {
                    if nb != leaf {
                        out.push(nb);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Sign changes of `frep` along graph edges (as linear crossing points
    /// and the nearest surface points of both edge ends) plus vertices where
    /// `|frep| < 1e-3 · diagonal`.
    pub fn zero_level_seeds(&self, frep: &FRepNode) -> Vec<Point> {
        let vals: Vec<f64> = (0..self.vertex_count() as u32)
            .map(|v| frep.eval(&self.vertex_position(v)))
            .collect();
        let tol = 1e-3 * self.bbox.diagonal();
        let mut seeds = Vec::new();
        for v in 0..self.vertex_count() as u32 {
            let a = vals[v as usize];
            let p = self.vertex_position(v);
            if a.abs() < tol {
                seeds.push(p);
            }
            for dir in [1, 3] {
                if let Some((w, _)) = self.neighbour(v, dir) {
                    let b = vals[w as usize];
                    if crosses(a, b) {
                        let q = self.vertex_position(w);
                        let t = crate::dt::crossing_parameter(a, b);
                        seeds.push(p.lerp(&q, t));
                        let reach = 2.0 * p.distance(&q);
                        seeds.extend(frep.foot_point(&p, 2, reach));
                        seeds.extend(frep.foot_point(&q, 2, reach));
                    }
                }
            }
        }
        seeds
    }
}
