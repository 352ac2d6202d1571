//! CPU sphere tracing of 3D fields that are positive inside.

use rayon::prelude::*;

use super::image::{to_rgb8, FieldImage};
use crate::error::{invalid, HfrepError, Result};
use crate::grid::{BoundingBox, Point};
use crate::pipeline::{sampled_lipschitz, HfrepField, Region};

pub const HIT_EPS: f64 = 1e-4;
pub const MAX_STEPS: usize = 256;

/// Pinhole camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub eye: Point,
    pub target: Point,
    pub up: Point,
    /// Vertical field of view in degrees.
    pub fov_y: f64,
}

impl Camera {
    pub fn looking_at(eye: Point, target: Point) -> Self {
        Camera { eye, target, up: Point::new3(0.0, 1.0, 0.0), fov_y: 40.0 }
    }

    /// Oblique view of a box from outside it.
    pub fn default_for(bbox: &BoundingBox) -> Self {
        let c = bbox.center();
        let r = 0.5 * bbox.diagonal();
        Camera::looking_at(c + Point::new3(0.55, 0.45, -1.0).normalized() * (1.5 * r), c)
    }

    /// Unit ray direction through pixel `(x, row)`.
    pub fn ray(&self, x: usize, row: usize, width: usize, height: usize) -> Point {
        let fwd = (self.target - self.eye).normalized();
        let right = fwd.cross(&self.up).normalized() * -1.0;
        let up = right.cross(&fwd) * -1.0;
        let half = (0.5 * self.fov_y).to_radians().tan();
        let aspect = width as f64 / height as f64;
        let u = (2.0 * (x as f64 + 0.5) / width as f64 - 1.0) * half * aspect;
        let v = (1.0 - 2.0 * (row as f64 + 0.5) / height as f64) * half;
        (fwd + right * u + up * v).normalized()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceParams {
    pub width: usize,
    pub height: usize,
    /// Largest accepted sampled gradient norm over the exterior.
    pub max_lipschitz: f64,
    pub lipschitz_samples: usize,
    pub seed: u64,
    pub background: [f64; 3],
    pub albedo: [f64; 3],
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            width: 256,
            height: 256,
            max_lipschitz: 1.1,
            lipschitz_samples: 4000,
            seed: 0,
            background: [0.08, 0.08, 0.11],
            albedo: [0.92, 0.78, 0.45],
        }
    }
}

/// Entry and exit parameters of a ray through a box.
fn ray_box(bbox: &BoundingBox, o: &Point, d: &Point) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (0.0f64, f64::INFINITY);
    for a in 0..3 {
        if d.0[a] == 0.0 {
            if o.0[a] < bbox.min.0[a] || o.0[a] > bbox.max.0[a] {
                return None;
            }
            continue;
        }
        let (mut a0, mut a1) = ((bbox.min.0[a] - o.0[a]) / d.0[a], (bbox.max.0[a] - o.0[a]) / d.0[a]);
        if a0 > a1 {
            std::mem::swap(&mut a0, &mut a1);
        }
        t0 = t0.max(a0);
        t1 = t1.min(a1);
    }
    (t0 <= t1).then_some((t0, t1))
}

fn shrunk(bbox: &BoundingBox) -> BoundingBox {
    let e = 1e-9 * bbox.diagonal();
    let mut b = *bbox;
    for a in 0..3 {
        b.min.0[a] += e;
        b.max.0[a] -= e;
    }
    b
}

/// Marches one ray with steps of `|value| / max(1, lipschitz)`. Returns the
/// ray parameter of the hit, refined by bisection when a step lands inside.
pub fn trace_ray<F>(f: &F, bbox: &BoundingBox, origin: &Point, dir: &Point, lipschitz: f64) -> Result<Option<f64>>
where
    F: Fn(&Point) -> Result<f64>,
{
    let Some((t0, t1)) = ray_box(&shrunk(bbox), origin, dir) else {
        return Ok(None);
    };
    let at = |t: f64| *origin + *dir * t;
    let scale = lipschitz.max(1.0);
    let (mut prev, mut t) = (t0, t0);
    for _ in 0..MAX_STEPS {
        let v = f(&at(t))?;
        if v.abs() < HIT_EPS {
            return Ok(Some(t));
        }
        if v > 0.0 {
            if t == t0 {
                return Ok(Some(t));
            }
            let (mut lo, mut hi) = (prev, t);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let m = f(&at(mid))?;
                if m.abs() < HIT_EPS * 1e-3 {
                    return Ok(Some(mid));
                }
                if m > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev = t;
        t += -v / scale;
        if t > t1 {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Refuses fields whose sampled exterior gradient norm exceeds the limit,
/// then traces every pixel. The returned constant is the sampled bound.
pub fn sphere_trace(field: &HfrepField, camera: &Camera, params: &TraceParams) -> Result<(FieldImage, f64)> {
    if field.dim() != 3 {
        return Err(invalid("sphere tracing needs a 3D field"));
    }
    if params.width == 0 || params.height == 0 {
        return Err(invalid("image must not be empty"));
    }
    let lip = sampled_lipschitz(field, params.lipschitz_samples, None, Region::Exterior, params.seed)?;
    if lip > params.max_lipschitz {
        return Err(HfrepError::Lipschitz { norm: lip, limit: params.max_lipschitz });
    }
    let eval = |p: &Point| field.eval(p);
    let bbox = *field.bbox();
    let light = (camera.eye - camera.target).normalized();
    let h = 0.5 * field.resolution();
    let inner = shrunk(&bbox);
    let pixels = (0..params.width * params.height)
        .into_par_iter()
        .map(|idx| {
            let dir = camera.ray(idx % params.width, idx / params.width, params.width, params.height);
            let Some(t) = trace_ray(&eval, &bbox, &camera.eye, &dir, lip)? else {
                return Ok(to_rgb8(params.background));
            };
            let p = camera.eye + dir * t;
            let mut grad = Point::ORIGIN;
            for a in 0..3 {
                let (mut lo, mut hi) = (p, p);
                lo.0[a] = (lo.0[a] - h).max(inner.min.0[a]);
                hi.0[a] = (hi.0[a] + h).min(inner.max.0[a]);
                grad.0[a] = (field.eval(&hi)? - field.eval(&lo)?) / (hi.0[a] - lo.0[a]);
            }
            // the field grows inward, so the outward normal is -∇
            let n = grad.normalized() * -1.0;
            let shade = 0.15 + 0.85 * n.dot(&light).max(0.0);
            Ok(to_rgb8(params.albedo.map(|c| c * shade)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((FieldImage::new(params.width, params.height, pixels)?, lip))
}
