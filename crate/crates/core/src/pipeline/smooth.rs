use crate::cubic::CubicGrid;
use crate::error::{invalid, HfrepError, Result};
use crate::grid::{Point, ScalarGrid};

/// C¹ interpolant of a sampled unsigned distance.
///
/// Built either directly on the distances, or, when node signs are known,
/// on the signed distance with the absolute value taken on evaluation. The
/// signed distance is smooth across the zero level where the unsigned one
/// has a kink, so the second form follows the boundary to spline accuracy
/// instead of rounding it off.
#[derive(Debug, Clone)]
pub struct SmoothUdf {
    source: ScalarGrid,
    spline: CubicGrid,
    signed: bool,
}

fn check_udf(g: &ScalarGrid) -> Result<()> {
    if let Some(i) = g.values().iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(HfrepError::Precondition(format!(
            "distance grid node {i} holds {}; values must be finite and non-negative",
            g.values()[i]
        )));
    }
    Ok(())
}

/// Catmull–Rom spline through the distances; any negative or non-finite
/// node is a precondition error.
pub fn smooth_udf(g: &ScalarGrid) -> Result<SmoothUdf> {
    check_udf(g)?;
    Ok(SmoothUdf { source: g.clone(), spline: CubicGrid::new(g.clone()), signed: false })
}

/// Like [`smooth_udf`], but the spline runs through `sign(s) · g` where `s`
/// is a sign source on the same lattice (positive inside).
pub fn smooth_udf_signed(g: &ScalarGrid, sign_source: &ScalarGrid) -> Result<SmoothUdf> {
    check_udf(g)?;
    if !g.same_lattice(sign_source) {
        return Err(invalid("sign source must share the distance lattice"));
    }
    let signed: Vec<f64> = g
        .values()
        .iter()
        .zip(sign_source.values())
        .map(|(&d, &s)| if s > 0.0 { d } else { -d })
        .collect();
    Ok(SmoothUdf { source: g.clone(), spline: CubicGrid::new(g.with_values(signed)), signed: true })
}

impl SmoothUdf {
    pub fn grid(&self) -> &ScalarGrid {
        &self.source
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    /// The spline itself: signed distance or raw distance.
    pub fn raw(&self, p: &Point) -> Result<f64> {
        self.spline.eval(p)
    }

    pub fn eval(&self, p: &Point) -> Result<f64> {
        let v = self.raw(p)?;
        Ok(if self.signed { v.abs() } else { v })
    }

    pub fn eval_with_gradient(&self, p: &Point) -> Result<(f64, [f64; 3])> {
        let (v, g) = self.spline.eval_with_gradient(p)?;
        if self.signed && v < 0.0 {
            return Ok((-v, g.map(|x| -x)));
        }
        Ok((v, g))
    }

    /// Smallest value over `sub` evaluations per cell and axis. Values below
    /// zero are zeros the data does not have.
    pub fn dense_minimum(&self, sub: usize) -> f64 {
        let g = &self.source;
        let dims = g.dims();
        let steps: Vec<usize> = (0..3).map(|a| if a < g.dim() { (dims[a] - 1) * sub + 1 } else { 1 }).collect();
        let mut lo = f64::INFINITY;
        for k in 0..steps[2] {
            for j in 0..steps[1] {
                for i in 0..steps[0] {
                    let frac = [i as f64 / sub as f64, j as f64 / sub as f64, k as f64 / sub as f64];
                    if let Ok(v) = self.eval(&g.grid_to_world(frac)) {
                        lo = lo.min(v);
                    }
                }
            }
        }
        lo
    }
}
