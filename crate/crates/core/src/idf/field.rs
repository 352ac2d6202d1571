use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::boundary::BoundaryLoop;
use super::mvc::mvc_weights;
use super::spectral::{boundary_laplacian, spectral_decompose, SpectralBasis};
use crate::error::{invalid, Result};
use crate::grid::{BoundingBox, Point, ScalarGrid};

/// Loops longer than this are resampled by arc length before decomposition.
pub const MAX_LOOP_VERTICES: usize = 256;
/// Upper bound on the number of eigenpairs kept.
pub const MAX_MODES: usize = 64;

/// Interior distance from a source point.
///
/// Every point inside the loop is mapped into the boundary's diffusion
/// embedding by its mean value coordinates; the field is the Euclidean
/// distance between the images of the point and of the source. On the
/// boundary this is exactly the diffusion distance between vertices.
#[derive(Debug, Clone)]
pub struct IdfField {
    boundary: BoundaryLoop,
    basis: SpectralBasis,
    /// Vertex embeddings, one row per boundary vertex.
    embedding: DMatrix<f64>,
    source: Point,
    source_image: DVector<f64>,
}

impl IdfField {
    /// Builds the field for `source` (inside or on the loop). `modes` defaults
    /// to `min(64, n)`.
    pub fn new(boundary: &BoundaryLoop, source: Point, modes: Option<usize>) -> Result<Self> {
        let boundary = if boundary.len() > MAX_LOOP_VERTICES {
            boundary.resample(MAX_LOOP_VERTICES)?
        } else {
            boundary.clone()
        };
        let n = boundary.len();
        let m = modes.unwrap_or(MAX_MODES.min(n));
        if m < 2 {
            return Err(invalid("at least two modes are needed for a diffusion embedding"));
        }
        let basis = spectral_decompose(&boundary_laplacian(&boundary)?, m.min(n))?;
        let rows: Vec<f64> = (0..n).flat_map(|i| basis.embedding(i)).collect();
        let embedding = DMatrix::from_row_slice(n, basis.mode_count() - 1, &rows);
        let w = DVector::from_vec(mvc_weights(&boundary, &source)?);
        let source_image = embedding.tr_mul(&w);
        Ok(IdfField { boundary, basis, embedding, source, source_image })
    }

    pub fn boundary(&self) -> &BoundaryLoop {
        &self.boundary
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    pub fn source(&self) -> Point {
        self.source
    }

    /// Field value at `q`; outside the loop is a domain error.
    pub fn eval(&self, q: &Point) -> Result<f64> {
        let w = DVector::from_vec(mvc_weights(&self.boundary, q)?);
        Ok((self.embedding.tr_mul(&w) - &self.source_image).norm())
    }

    /// Samples the field on a 2D lattice, writing 0 outside the loop.
    pub fn sample(&self, dims: &[usize], bbox: BoundingBox) -> Result<ScalarGrid> {
        let lattice = ScalarGrid::filled(dims, bbox, 0.0)?;
        let values = (0..lattice.len())
            .into_par_iter()
            .map(|i| {
                let p = lattice.node_position(i);
                if self.boundary.contains(&p) {
                    self.eval(&p)
                } else {
                    Ok(0.0)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(lattice.with_values(values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(n_per_edge: usize) -> BoundaryLoop {
        let corners: Vec<Point> = (0..10)
            .map(|k| {
                let a = std::f64::consts::PI * k as f64 / 5.0 + 0.5 * std::f64::consts::PI;
                let r = if k % 2 == 0 { 0.9 } else { 0.4 };
                Point::new(r * a.cos(), r * a.sin())
            })
            .collect();
        let pts = (0..10)
            .flat_map(|k| {
                let (a, b) = (corners[k], corners[(k + 1) % 10]);
                (0..n_per_edge).map(move |s| a.lerp(&b, s as f64 / n_per_edge as f64))
            })
            .collect();
        BoundaryLoop::new(pts).unwrap()
    }

    #[test]
    fn boundary_values_are_diffusion_distances() {
        let l = star(8);
        let src = l.points()[0];
        let f = IdfField::new(&l, src, None).unwrap();
        for i in 0..l.len() {
            let d = f.basis().diffusion_distance(0, i);
            assert!((f.eval(&l.points()[i]).unwrap() - d).abs() < 1e-12);
        }
        assert!(f.eval(&src).unwrap().abs() < 1e-15);
    }

    #[test]
    fn long_loops_are_resampled() {
        let f = IdfField::new(&star(40), Point::ORIGIN, None).unwrap();
        assert_eq!(f.boundary().len(), MAX_LOOP_VERTICES);
        assert_eq!(f.basis().mode_count(), MAX_MODES);
    }

    #[test]
    fn interior_field_is_smooth_on_star() {
        let l = star(12);
        let f = IdfField::new(&l, Point::ORIGIN, None).unwrap();
        let g = f.sample(&[129, 129], BoundingBox::centered_square(1.0)).unwrap();
        assert!(g.all_finite());
        let h = g.spacing()[0];
        let scale = g.values().iter().fold(0.0f64, |a, &b| a.max(b));
        assert!(scale > 0.0);
        // among nodes whose 3×3 neighbourhood is inside, no neighbour
        // difference exceeds a fixed multiple of the mean one
        let mut diffs = Vec::new();
        for j in 1..128 {
            for i in 1..128 {
                let inside = (0..9).all(|k| l.contains(&g.node_position(g.index(i + k % 3 - 1, j + k / 3 - 1, 0))));
                if inside {
                    diffs.push((g.get(i + 1, j, 0) - g.get(i, j, 0)).abs());
                    diffs.push((g.get(i, j + 1, 0) - g.get(i, j, 0)).abs());
                }
            }
        }
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let max = diffs.iter().fold(0.0f64, |a, &b| a.max(b));
        assert!(max <= 10.0 * mean.max(1e-3 * scale * h), "max {max} mean {mean}");
        assert_eq!(g.get(0, 0, 0), 0.0);
    }

    #[test]
    fn outside_source_rejected() {
        assert!(IdfField::new(&star(4), Point::new(0.95, 0.95), None).is_err());
    }
}
