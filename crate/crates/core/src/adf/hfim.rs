use super::tree::{AdfTree, DIRS};
use crate::dt::SeedSet;
use crate::eikonal::{default_eps, sentinel, FimSolver, Schedule, UpwindGraph};
use crate::error::{invalid, HfrepError, Result};

/// The quadtree vertex graph with unit speed.
pub struct TreeGraph<'a> {
    tree: &'a AdfTree,
}

impl<'a> TreeGraph<'a> {
    pub fn new(tree: &'a AdfTree) -> Self {
        TreeGraph { tree }
    }
}

impl UpwindGraph for TreeGraph<'_> {
    fn node_count(&self) -> usize {
        self.tree.vertex_count()
    }

    fn dim(&self) -> usize {
        2
    }

    #[inline]
    fn axis_neighbours(&self, node: usize, axis: usize) -> [Option<(usize, f64)>; 2] {
        let v = node as u32;
        let f = |dir: usize| self.tree.neighbour(v, dir).map(|(w, h)| (w as usize, h));
        debug_assert_eq!(DIRS[2 * axis].0, axis);
        [f(2 * axis), f(2 * axis + 1)]
    }

    fn speed(&self, _node: usize) -> f64 {
        1.0
    }
}

/// Vertices strictly closer than their local spacing to a seed, paired with
/// the exact distance to the nearest such seed.
pub fn tree_sources(tree: &AdfTree, seeds: &SeedSet) -> Result<Vec<(usize, f64)>> {
    let mut best = vec![f64::INFINITY; tree.vertex_count()];
    for s in &seeds.points {
        let leaf = tree.locate(s)?;
        let mut cells = tree.touching_leaves(leaf);
        cells.push(leaf);
        for c in cells {
            let cell = *tree.cell(c);
            let [x, y] = cell.origin;
            let sz = cell.size;
            let mut cand: Vec<u32> = tree.leaf_corners(c).to_vec();
            if sz >= 2 {
                let h = sz / 2;
                for g in [[x + h, y], [x + h, y + sz], [x, y + h], [x + sz, y + h]] {
                    cand.extend(tree.vertex_at(g));
                }
            }
            for v in cand {
                let d = tree.vertex_position(v).distance(s);
                if d < tree.local_spacing(v) && d < best[v as usize] {
                    best[v as usize] = d;
                }
            }
        }
    }
    Ok(best
        .into_iter()
        .enumerate()
        .filter(|(_, d)| d.is_finite())
        .collect())
}

/// Solves the eikonal equation on the tree's vertex graph. `eps` defaults to
/// `1e-6` of the finest spacing.
pub fn hfim_solve(tree: &AdfTree, seeds: &SeedSet, eps: Option<f64>) -> Result<Vec<f64>> {
    if seeds.is_empty() {
        return Err(HfrepError::EmptyBoundary);
    }
    let sources = tree_sources(tree, seeds)?;
    if sources.is_empty() {
        return Err(invalid("no tree vertex lies within one cell of a seed"));
    }
    let unit = tree.unit();
    let eps = eps.unwrap_or_else(|| default_eps(unit[0].min(unit[1])));
    let graph = TreeGraph::new(tree);
    let solver = FimSolver::new(&graph, &sources, sentinel(tree.bbox()), eps)?;
    Ok(solver.run(Schedule::Jacobi))
}
