use super::boundary::{segment_distance, BoundaryLoop};
use crate::error::{HfrepError, Result};
use crate::grid::Point;

/// Points this close to the boundary take the boundary limit of the weights.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Mean value coordinates of `q` with respect to the loop's vertices.
///
/// The weights sum to one and reproduce linear functions. On the boundary
/// they degenerate to linear interpolation along the containing edge (or a
/// unit weight at a vertex). Points outside the loop are a domain error.
pub fn mvc_weights(l: &BoundaryLoop, q: &Point) -> Result<Vec<f64>> {
    let pts = l.points();
    let n = pts.len();
    let mut w = vec![0.0; n];

    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        if segment_distance(q, &a, &b) <= BOUNDARY_TOLERANCE {
            let len = a.distance(&b);
            let t = if len > 0.0 { (q.distance(&a) / len).clamp(0.0, 1.0) } else { 0.0 };
            w[i] += 1.0 - t;
            w[(i + 1) % n] += t;
            return Ok(w);
        }
    }
    if !l.contains(q) {
        return Err(HfrepError::Domain { point: q.0, what: "boundary loop interior" });
    }

    let s: Vec<Point> = pts.iter().map(|p| *p - *q).collect();
    let r: Vec<f64> = s.iter().map(|v| v.norm()).collect();
    // tan(α_i / 2) for the angle subtended by edge i
    let tan_half: Vec<f64> = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            let cross = s[i].x() * s[j].y() - s[i].y() * s[j].x();
            let dot = s[i].dot(&s[j]);
            cross / (r[i] * r[j] + dot)
        })
        .collect();
    let mut total = 0.0;
    for i in 0..n {
        w[i] = (tan_half[(i + n - 1) % n] + tan_half[i]) / r[i];
        total += w[i];
    }
    for v in &mut w {
        *v /= total;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn star() -> BoundaryLoop {
        let pts = (0..10)
            .map(|k| {
                let a = std::f64::consts::PI * k as f64 / 5.0;
                let r = if k % 2 == 0 { 1.0 } else { 0.45 };
                Point::new(r * a.cos(), r * a.sin())
            })
            .collect();
        BoundaryLoop::new(pts).unwrap()
    }

    #[test]
    fn partition_of_unity_and_linear_precision() {
        let l = star();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut tested = 0;
        while tested < 500 {
            let q = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if !l.contains(&q) {
                continue;
            }
            tested += 1;
            let w = mvc_weights(&l, &q).unwrap();
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let x: f64 = w.iter().zip(l.points()).map(|(a, p)| a * p.x()).sum();
            let y: f64 = w.iter().zip(l.points()).map(|(a, p)| a * p.y()).sum();
            assert!((x - q.x()).abs() < 1e-10 && (y - q.y()).abs() < 1e-10);
        }
    }

    #[test]
    fn boundary_limits() {
        let l = star();
        let p = l.points();
        let w = mvc_weights(&l, &p[3]).unwrap();
        assert!((w[3] - 1.0).abs() < 1e-15);
        let mid = p[4].lerp(&p[5], 0.25);
        let w = mvc_weights(&l, &mid).unwrap();
        assert!((w[4] - 0.75).abs() < 1e-12 && (w[5] - 0.25).abs() < 1e-12);
        // approaching a vertex from inside
        let inward = p[0] * (1.0 - 1e-6);
        assert!(mvc_weights(&l, &inward).unwrap()[0] > 0.999);
    }

    #[test]
    fn outside_is_domain_error() {
        assert!(matches!(
            mvc_weights(&star(), &Point::new(2.0, 0.0)),
            Err(HfrepError::Domain { .. })
        ));
    }
}
