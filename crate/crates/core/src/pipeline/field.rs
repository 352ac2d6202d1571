use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::sigmoid::sigmoid_step;
use super::smooth::{smooth_udf_signed, SmoothUdf};
use crate::adf::{hfim_solve, AdfField, AdfTree, TreeStats};
use crate::dt::{surface_seeds, vector_dt, SeedSet};
use crate::eikonal::{default_eps, fim_solve, SpeedField};
use crate::error::{invalid, HfrepError, Result};
use crate::frep::{sample_frep, FRepNode};
use crate::grid::{BoundingBox, Point, ScalarGrid};
use crate::idf::{extract_boundary, outer_loop, IdfField};

/// How the unsigned distance is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Dt,
    Fim,
    HfimAdf,
    Idf,
}

impl FromStr for Route {
    type Err = HfrepError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dt" => Ok(Route::Dt),
            "fim" => Ok(Route::Fim),
            "hfim-adf" => Ok(Route::HfimAdf),
            "idf" => Ok(Route::Idf),
            _ => Err(invalid(format!("unknown route '{s}' (dt, fim, hfim-adf, idf)"))),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Dt => "dt",
            Route::Fim => "fim",
            Route::HfimAdf => "hfim-adf",
            Route::Idf => "idf",
        })
    }
}

/// Build parameters; unset values fall back to scale-relative defaults.
#[derive(Debug, Clone)]
pub struct HfrepParams {
    /// Lattice nodes per axis for the grid routes.
    pub res: usize,
    /// Sigmoid slope; defaults to `1e-4` of the box diagonal.
    pub slope: Option<f64>,
    pub min_depth: u32,
    pub max_depth: u32,
    /// Solver tolerance; defaults to `1e-6` of the finest spacing.
    pub eps: Option<f64>,
    /// IDF source point; defaults to the first boundary vertex.
    pub idf_source: Option<Point>,
    pub idf_modes: Option<usize>,
}

impl Default for HfrepParams {
    fn default() -> Self {
        HfrepParams {
            res: 257,
            slope: None,
            min_depth: 3,
            max_depth: 7,
            eps: None,
            idf_source: None,
            idf_modes: None,
        }
    }
}

/// The smooth unsigned part of a field.
#[derive(Debug, Clone)]
pub enum UdfPart {
    Grid(SmoothUdf),
    /// Patches fitted to signed distances, like a signed [`SmoothUdf`].
    Adf(AdfField),
    Idf(IdfField),
}

/// `sigmoid(F_FRep) × smooth UDF`: signed, distance-like and C¹ wherever
/// the FRep is.
#[derive(Debug, Clone)]
pub struct HfrepField {
    frep: FRepNode,
    udf: UdfPart,
    bbox: BoundingBox,
    slope: f64,
    range: f64,
}

impl HfrepField {
    /// Wraps an already computed distance grid.
    pub fn from_udf_grid(frep: FRepNode, udf: &ScalarGrid, slope: Option<f64>) -> Result<Self> {
        let bbox = *udf.bbox();
        let slope = resolve_slope(slope, &bbox)?;
        let signs = sample_frep(&frep, &udf.dims()[..bbox.dim], bbox)?;
        let smooth = smooth_udf_signed(udf, &signs)?;
        Ok(HfrepField { frep, udf: UdfPart::Grid(smooth), bbox, slope, range: 2.0 })
    }

    pub fn frep(&self) -> &FRepNode {
        &self.frep
    }

    pub fn udf_part(&self) -> &UdfPart {
        &self.udf
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn dim(&self) -> usize {
        self.bbox.dim
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    /// IDF fields carry no sign and are zero outside the boundary loop.
    pub fn is_interior_only(&self) -> bool {
        matches!(self.udf, UdfPart::Idf(_))
    }

    /// Spacing of the data the field was built from: the lattice spacing,
    /// or the finest tree cell.
    pub fn resolution(&self) -> f64 {
        match &self.udf {
            UdfPart::Grid(s) => s.grid().min_spacing(),
            UdfPart::Adf(a) => a.tree().unit()[0].min(a.tree().unit()[1]),
            UdfPart::Idf(f) => f.boundary().perimeter() / f.boundary().len() as f64,
        }
    }

    pub fn tree_stats(&self) -> Option<TreeStats> {
        match &self.udf {
            UdfPart::Adf(a) => Some(a.tree().stats()),
            _ => None,
        }
    }

    /// Smooth unsigned distance at `p`.
    pub fn udf(&self, p: &Point) -> Result<f64> {
        self.check(p)?;
        match &self.udf {
            UdfPart::Grid(s) => s.eval(p),
            UdfPart::Adf(a) => Ok(a.eval(p)?.abs()),
            UdfPart::Idf(f) => {
                if f.boundary().contains(p) {
                    f.eval(p)
                } else {
                    Ok(0.0)
                }
            }
        }
    }

    /// Field value at `p`; outside the box is a domain error.
    pub fn eval(&self, p: &Point) -> Result<f64> {
        let d = self.udf(p)?;
        if self.is_interior_only() {
            return Ok(d);
        }
        Ok(sigmoid_step(self.frep.eval(p), self.slope, self.range) * d)
    }

    /// Samples the field on a lattice over its own box.
    pub fn sample(&self, dims: &[usize]) -> Result<ScalarGrid> {
        let lattice = ScalarGrid::filled(dims, self.bbox, 0.0)?;
        let values = (0..lattice.len())
            .into_par_iter()
            .map(|i| self.eval(&lattice.node_position(i)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(lattice.with_values(values))
    }

    fn check(&self, p: &Point) -> Result<()> {
        if self.bbox.contains(p) {
            Ok(())
        } else {
            Err(HfrepError::Domain { point: p.0, what: "field bounding box" })
        }
    }
}

fn resolve_slope(slope: Option<f64>, bbox: &BoundingBox) -> Result<f64> {
    let s = slope.unwrap_or(1e-4 * bbox.diagonal());
    if s > 0.0 && s.is_finite() {
        Ok(s)
    } else {
        Err(invalid(format!("sigmoid slope must be positive, got {s}")))
    }
}

/// Runs zero-level extraction, the chosen distance route, smoothing and sign
/// restoration.
pub fn hfrep_build(frep: &FRepNode, bbox: BoundingBox, route: Route, params: &HfrepParams) -> Result<HfrepField> {
    let slope = resolve_slope(params.slope, &bbox)?;
    let dims = vec![params.res; bbox.dim];
    if matches!(route, Route::HfimAdf | Route::Idf) && bbox.dim != 2 {
        return Err(invalid(format!("route {route} is two-dimensional")));
    }
    if matches!(route, Route::Dt | Route::Fim | Route::Idf) && params.res < 3 {
        return Err(invalid("resolution must be at least 3 nodes per axis"));
    }
    let udf = match route {
        Route::Dt | Route::Fim => {
            let sampled = sample_frep(frep, &dims, bbox)?;
            let seeds = surface_seeds(frep, &sampled)?;
            let g = if route == Route::Dt {
                vector_dt(&seeds, &dims, bbox)?.refined_udf(frep)
            } else {
                let eps = params.eps.unwrap_or_else(|| default_eps(sampled.min_spacing()));
                fim_solve(&seeds, &SpeedField::default(), &dims, bbox, eps)?
            };
            UdfPart::Grid(smooth_udf_signed(&g, &sampled)?)
        }
        Route::HfimAdf => {
            let tree = AdfTree::build(frep, params.min_depth, params.max_depth, bbox)?;
            let seeds = SeedSet::from_points(tree.zero_level_seeds(frep));
            let d = hfim_solve(&tree, &seeds, params.eps)?;
            let signed = (0..tree.vertex_count() as u32)
                .map(|v| if frep.eval(&tree.vertex_position(v)) > 0.0 { d[v as usize] } else { -d[v as usize] })
                .collect();
            UdfPart::Adf(AdfField::fit(tree, signed)?)
        }
        Route::Idf => {
            let sampled = sample_frep(frep, &dims, bbox)?;
            let loops = extract_boundary(&sampled)?;
            let outer = outer_loop(&loops)?;
            let source = params.idf_source.unwrap_or(outer.points()[0]);
            UdfPart::Idf(IdfField::new(outer, source, params.idf_modes)?)
        }
    };
    Ok(HfrepField { frep: frep.clone(), udf, bbox, slope, range: 2.0 })
}

/// Where [`sampled_lipschitz`] draws its samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Everywhere,
    /// Only where the FRep is non-positive: the space a sphere-tracing ray
    /// marches through before its first hit.
    Exterior,
}

/// Largest gradient norm seen over `samples` seeded random points of
/// `region`, by central differences with step `delta` (by default the
/// field's own lattice spacing).
pub fn sampled_lipschitz(
    field: &HfrepField,
    samples: usize,
    delta: Option<f64>,
    region: Region,
    seed: u64,
) -> Result<f64> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    let bbox = *field.bbox();
    let d = bbox.dim;
    let delta = delta.unwrap_or_else(|| field.resolution());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Point> = Vec::with_capacity(samples);
    let mut tries = 0usize;
    while pts.len() < samples && tries < 100 * samples {
        tries += 1;
        let mut c = [0.0; 3];
        for (a, v) in c.iter_mut().enumerate().take(d) {
            *v = rng.gen_range(bbox.min.0[a] + delta..bbox.max.0[a] - delta);
        }
        let p = Point(c);
        if region == Region::Everywhere || field.frep().eval(&p) <= 0.0 {
            pts.push(p);
        }
    }
    let norms = pts
        .par_iter()
        .map(|p| {
            let mut sq = 0.0;
            for a in 0..d {
                let (mut lo, mut hi) = (*p, *p);
                lo.0[a] -= delta;
                hi.0[a] += delta;
                let g = (field.eval(&hi)? - field.eval(&lo)?) / (2.0 * delta);
                sq += g * g;
            }
            Ok(sq.sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(norms.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frep::{model, BinaryOp, Primitive};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn circle() -> FRepNode {
        Primitive::circle([0.0, 0.0], 0.5).unwrap().into()
    }

    fn square() -> BoundingBox {
        BoundingBox::centered_square(1.0)
    }

    fn params(res: usize) -> HfrepParams {
        HfrepParams { res, ..Default::default() }
    }

    #[test]
    fn routes_parse_and_print() {
        for r in ["dt", "fim", "hfim-adf", "idf"] {
            assert_eq!(r.parse::<Route>().unwrap().to_string(), r);
        }
        assert!("bfs".parse::<Route>().is_err());
    }

    #[test]
    fn circle_field_is_signed_distance() {
        for route in [Route::Dt, Route::Fim] {
            let f = hfrep_build(&circle(), square(), route, &params(129)).unwrap();
            let h = 2.0 / 128.0;
            let mut rng = ChaCha8Rng::seed_from_u64(50);
            for _ in 0..3000 {
                let p = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let sdf = 0.5 - p.norm();
                let v = f.eval(&p).unwrap();
                assert!((v - sdf).abs() <= 2.0 * h, "{route} at {p:?}: {v} vs {sdf}");
                assert!(v.abs() <= f.udf(&p).unwrap());
            }
        }
    }

    #[test]
    fn saturation_inside_and_outside() {
        let f = hfrep_build(&circle(), square(), Route::Dt, &params(65)).unwrap();
        let inside = Point::new(0.1, 0.05);
        let outside = Point::new(0.9, -0.8);
        let (ui, uo) = (f.udf(&inside).unwrap(), f.udf(&outside).unwrap());
        assert!(((f.eval(&inside).unwrap() - ui) / ui).abs() <= 1e-6);
        assert!(((f.eval(&outside).unwrap() + uo) / uo).abs() <= 1e-6);
        assert!(matches!(f.eval(&Point::new(1.2, 0.0)), Err(HfrepError::Domain { .. })));
    }

    #[test]
    fn zero_level_values_are_small() {
        let f = hfrep_build(&circle(), square(), Route::Fim, &params(129)).unwrap();
        let h = 2.0 / 128.0;
        for k in 0..360 {
            let a = (k as f64).to_radians();
            let p = Point::new(0.5 * a.cos(), 0.5 * a.sin());
            assert!(f.eval(&p).unwrap().abs() <= 2.0 * h);
        }
    }

    #[test]
    fn star_sign_agreement() {
        let m = model("star").unwrap();
        let f = hfrep_build(&m.tree, m.bbox, Route::Dt, &params(129)).unwrap();
        let g = sample_frep(&m.tree, &[200, 200], m.bbox).unwrap();
        let scale = g.values().iter().fold(0.0f64, |a, b| a.max(b.abs()));
        for i in 0..g.len() {
            let fr = g.values()[i];
            if fr.abs() > 10.0 * f.slope() * scale {
                let v = f.eval(&g.node_position(i)).unwrap();
                assert_eq!(v > 0.0, fr > 0.0, "node {i}");
            }
        }
    }

    #[test]
    fn rv_tree_gives_c1_field() {
        // two overlapping discs joined by an rv union: finite-difference
        // gradients stay continuous across the interior
        let tree = FRepNode::binary(
            BinaryOp::UnionRv(2),
            Primitive::circle([-0.2, 0.0], 0.45).unwrap(),
            Primitive::circle([0.25, 0.0], 0.4).unwrap(),
        )
        .unwrap();
        let f = hfrep_build(&tree, square(), Route::Dt, &params(129)).unwrap();
        let grad = |p: Point| {
            let e = 1e-6;
            let fx = (f.eval(&Point::new(p.x() + e, p.y())).unwrap() - f.eval(&Point::new(p.x() - e, p.y())).unwrap()) / (2.0 * e);
            let fy = (f.eval(&Point::new(p.x(), p.y() + e)).unwrap() - f.eval(&Point::new(p.x(), p.y() - e)).unwrap()) / (2.0 * e);
            [fx, fy]
        };
        // straddle vertical lines away from the medial axis
        let mut worst = 0.0f64;
        for k in 0..200 {
            let y = -0.8 + 1.6 * k as f64 / 199.0;
            let (a, b) = (grad(Point::new(0.9 - 1e-5, y)), grad(Point::new(0.9 + 1e-5, y)));
            worst = worst.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
        }
        assert!(worst <= 1e-3, "{worst}");
    }

    #[test]
    fn adf_and_idf_routes() {
        let p = HfrepParams { min_depth: 3, max_depth: 6, res: 65, ..Default::default() };
        let f = hfrep_build(&circle(), square(), Route::HfimAdf, &p).unwrap();
        let stats = f.tree_stats().unwrap();
        assert!(stats.vertex_count < stats.full_grid_nodes);
        assert!((f.eval(&Point::new(0.0, 0.2)).unwrap() - 0.3).abs() <= 2.0 / 8.0);
        assert!((f.eval(&Point::new(0.8, 0.0)).unwrap() + 0.3).abs() <= 2.0 / 8.0);

        let f = hfrep_build(&circle(), square(), Route::Idf, &p).unwrap();
        assert!(f.is_interior_only());
        assert_eq!(f.eval(&Point::new(0.9, 0.9)).unwrap(), 0.0);
        assert!(f.eval(&Point::new(0.1, 0.1)).unwrap() > 0.0);

        let sphere: FRepNode = Primitive::sphere([0.0; 3], 0.5).unwrap().into();
        let cube = BoundingBox::centered_cube(1.0);
        assert!(hfrep_build(&sphere, cube, Route::HfimAdf, &p).is_err());
        assert!(hfrep_build(&sphere, cube, Route::Idf, &p).is_err());
    }

    #[test]
    fn sphere_is_nearly_one_lipschitz() {
        let sphere: FRepNode = Primitive::sphere([0.0; 3], 0.6).unwrap().into();
        let f = hfrep_build(&sphere, BoundingBox::centered_cube(1.0), Route::Dt, &params(40)).unwrap();
        let l = sampled_lipschitz(&f, 4000, None, Region::Everywhere, 3).unwrap();
        assert!(l <= 1.1, "{l}");
        assert!(sampled_lipschitz(&f, 4000, None, Region::Exterior, 3).unwrap() <= l + 1e-12);
    }

    #[test]
    fn bad_slope_rejected() {
        let p = HfrepParams { slope: Some(0.0), res: 17, ..Default::default() };
        assert!(hfrep_build(&circle(), square(), Route::Dt, &p).is_err());
    }
}
