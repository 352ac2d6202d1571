use super::tree::AdfTree;
use crate::cubic::bicubic_patch;
use crate::error::{invalid, Result};
use crate::grid::Point;

/// C¹ field over a quadtree: one bicubic Hermite patch per leaf, built from
/// shared per-vertex `[f, fx, fy, fxy]` data.
///
/// Derivatives at regular vertices come from non-uniform three-point
/// differences on the vertex graph. Hanging vertices instead take all four
/// quantities from the coarse leaf they sit on, which makes the fine-side
/// patches agree with the coarse patch along the whole interface.
#[derive(Debug, Clone)]
pub struct AdfField {
    tree: AdfTree,
    values: Vec<f64>,
    data: Vec<[f64; 4]>,
}

/// Non-uniform three-point derivative along one axis; one-sided at borders.
fn graph_derivative(tree: &AdfTree, vals: &[f64], v: u32, axis: usize) -> f64 {
    let f0 = vals[v as usize];
    let lo = tree.neighbour(v, 2 * axis);
    let hi = tree.neighbour(v, 2 * axis + 1);
    match (lo, hi) {
        (Some((a, hm)), Some((b, hp))) => {
            let (fa, fb) = (vals[a as usize], vals[b as usize]);
            ((fb - f0) * hm / hp + (f0 - fa) * hp / hm) / (hm + hp)
        }
        (Some((a, hm)), None) => (f0 - vals[a as usize]) / hm,
        (None, Some((b, hp))) => (vals[b as usize] - f0) / hp,
        (None, None) => 0.0,
    }
}

impl AdfField {
    /// Fits the patches to per-vertex values (one per tree vertex).
    pub fn fit(tree: AdfTree, values: Vec<f64>) -> Result<Self> {
        let nv = tree.vertex_count();
        if values.len() != nv {
            return Err(invalid(format!("expected {nv} vertex values, got {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("vertex values must be finite"));
        }
        let fx: Vec<f64> = (0..nv as u32).map(|v| graph_derivative(&tree, &values, v, 0)).collect();
        let fy: Vec<f64> = (0..nv as u32).map(|v| graph_derivative(&tree, &values, v, 1)).collect();
        let mut data: Vec<[f64; 4]> = (0..nv as u32)
            .map(|v| {
                let fxy = 0.5
                    * (graph_derivative(&tree, &fy, v, 0) + graph_derivative(&tree, &fx, v, 1));
                let i = v as usize;
                [values[i], fx[i], fy[i], fxy]
            })
            .collect();

        // coarser cells first: their corners may themselves hang on an even
        // coarser neighbour
        let mut hanging: Vec<(u8, u32, u32)> = (0..nv as u32)
            .filter_map(|v| tree.hanging_on(v).map(|c| (tree.cell(c).depth, v, c)))
            .collect();
        hanging.sort_unstable();
        for (_, v, c) in hanging {
            let p = tree.vertex_position(v);
            data[v as usize] = eval_leaf(&tree, &data, c, &p);
        }
        Ok(AdfField { tree, values, data })
    }

    pub fn tree(&self) -> &AdfTree {
        &self.tree
    }

    /// Vertex values the field was fitted to.
    pub fn vertex_values(&self) -> &[f64] {
        &self.values
    }

    /// `[f, fx, fy, fxy]` used at each vertex.
    pub fn vertex_data(&self) -> &[[f64; 4]] {
        &self.data
    }

    /// `[f, fx, fy, fxy]` of `leaf`'s patch at `p` (which may lie on the
    /// leaf's border or slightly outside).
    pub fn eval_in_leaf(&self, leaf: u32, p: &Point) -> [f64; 4] {
        eval_leaf(&self.tree, &self.data, leaf, p)
    }

    /// Bilinear blend of the raw corner values of `leaf`, with gradient.
    pub fn bilinear_in_leaf(&self, leaf: u32, p: &Point) -> [f64; 3] {
        let (lo, hi) = self.tree.cell_rect(leaf);
        let (sx, sy) = (hi.x() - lo.x(), hi.y() - lo.y());
        let u = (p.x() - lo.x()) / sx;
        let v = (p.y() - lo.y()) / sy;
        let c = self.tree.leaf_corners(leaf).map(|k| self.values[k as usize]);
        let val = c[0] * (1.0 - u) * (1.0 - v) + c[1] * u * (1.0 - v) + c[2] * (1.0 - u) * v + c[3] * u * v;
        let gx = ((c[1] - c[0]) * (1.0 - v) + (c[3] - c[2]) * v) / sx;
        let gy = ((c[2] - c[0]) * (1.0 - u) + (c[3] - c[1]) * u) / sy;
        [val, gx, gy]
    }

    /// Value of the C¹ field at `p`; outside the box is a domain error.
    pub fn eval(&self, p: &Point) -> Result<f64> {
        Ok(self.eval_with_gradient(p)?.0)
    }

    pub fn eval_with_gradient(&self, p: &Point) -> Result<(f64, [f64; 2])> {
        let leaf = self.tree.locate(p)?;
        let r = self.eval_in_leaf(leaf, p);
        Ok((r[0], [r[1], r[2]]))
    }

    /// Piecewise bilinear restoration from raw vertex values, for contrast.
    pub fn eval_bilinear(&self, p: &Point) -> Result<f64> {
        let leaf = self.tree.locate(p)?;
        Ok(self.bilinear_in_leaf(leaf, p)[0])
    }
}

fn eval_leaf(tree: &AdfTree, data: &[[f64; 4]], leaf: u32, p: &Point) -> [f64; 4] {
    let (lo, hi) = tree.cell_rect(leaf);
    let (sx, sy) = (hi.x() - lo.x(), hi.y() - lo.y());
    let u = (p.x() - lo.x()) / sx;
    let v = (p.y() - lo.y()) / sy;
    let corners = tree.leaf_corners(leaf).map(|k| data[k as usize]);
    bicubic_patch(&corners, sx, sy, u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frep::{FRepNode, Primitive};
    use crate::grid::BoundingBox;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tree() -> AdfTree {
        let c: FRepNode = Primitive::circle([0.1, 0.0], 0.45).unwrap().into();
        AdfTree::build(&c, 2, 6, BoundingBox::centered_square(1.0)).unwrap()
    }

    fn fit_fn(t: AdfTree, f: impl Fn(&Point) -> f64) -> AdfField {
        let vals = (0..t.vertex_count() as u32).map(|v| f(&t.vertex_position(v))).collect();
        AdfField::fit(t, vals).unwrap()
    }

    #[test]
    fn linear_precision() {
        let f = |p: &Point| 0.7 * p.x() - 0.2 * p.y() + 0.1;
        let field = fit_fn(tree(), f);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2000 {
            let p = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let (v, g) = field.eval_with_gradient(&p).unwrap();
            assert!((v - f(&p)).abs() <= 1e-10);
            assert!((g[0] - 0.7).abs() <= 1e-9 && (g[1] + 0.2).abs() <= 1e-9);
        }
        // cell centres
        for &l in field.tree().leaves() {
            let (lo, hi) = field.tree().cell_rect(l);
            let c = lo.lerp(&hi, 0.5);
            assert!((field.eval(&c).unwrap() - f(&c)).abs() <= 1e-10);
        }
    }

    #[test]
    fn reproduces_regular_vertex_values() {
        let f = |p: &Point| (3.0 * p.x()).sin() + p.y() * p.y();
        let field = fit_fn(tree(), f);
        for v in 0..field.tree().vertex_count() as u32 {
            if field.tree().hanging_on(v).is_some() {
                continue;
            }
            let p = field.tree().vertex_position(v);
            assert!((field.eval(&p).unwrap() - f(&p)).abs() <= 1e-12);
        }
    }

    #[test]
    fn interfaces_are_c1_and_bilinear_is_not() {
        let f = |p: &Point| (3.0 * p.x()).sin() * (2.0 * p.y()).cos() + p.norm();
        let field = fit_fn(tree(), f);
        let t = field.tree();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let (mut dv, mut dg, mut bg) = (0.0f64, 0.0f64, 0.0f64);
        let u = t.unit()[0];
        for _ in 0..5000 {
            let leaf = t.leaves()[rng.gen_range(0..t.leaves().len())];
            let (lo, hi) = t.cell_rect(leaf);
            let s: f64 = rng.gen_range(0.0..1.0);
            let (p, normal) = match rng.gen_range(0..4) {
                0 => (Point::new(lo.x(), lo.y() + s * (hi.y() - lo.y())), [-1.0, 0.0]),
                1 => (Point::new(hi.x(), lo.y() + s * (hi.y() - lo.y())), [1.0, 0.0]),
                2 => (Point::new(lo.x() + s * (hi.x() - lo.x()), lo.y()), [0.0, -1.0]),
                _ => (Point::new(lo.x() + s * (hi.x() - lo.x()), hi.y()), [0.0, 1.0]),
            };
            let q = Point::new(p.x() + 0.25 * u * normal[0], p.y() + 0.25 * u * normal[1]);
            let Ok(other) = t.locate(&q) else { continue };
            if !t.bbox().contains(&q) || other == leaf {
                continue;
            }
            let a = field.eval_in_leaf(leaf, &p);
            let b = field.eval_in_leaf(other, &p);
            dv = dv.max((a[0] - b[0]).abs());
            dg = dg.max((a[1] - b[1]).abs()).max((a[2] - b[2]).abs());
            let (la, lb) = (field.bilinear_in_leaf(leaf, &p), field.bilinear_in_leaf(other, &p));
            bg = bg.max((la[1] - lb[1]).abs()).max((la[2] - lb[2]).abs());
        }
        assert!(dv <= 1e-9, "value jump {dv}");
        assert!(dg <= 1e-6, "gradient jump {dg}");
        assert!(bg >= 100.0 * dg.max(1e-12), "bilinear {bg} vs {dg}");
    }

    #[test]
    fn rejects_wrong_length() {
        let t = tree();
        assert!(AdfField::fit(t, vec![0.0; 3]).is_err());
    }
}
