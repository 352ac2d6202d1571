//! Field rendering: blue ramp for negative values, yellow ramp for positive
//! ones, a black band of total width one isoline step around zero, and
//! darkened isolines at every multiple of the step.

use rayon::prelude::*;

use super::image::{to_rgb8, FieldImage};
use crate::error::{invalid, Result};
use crate::grid::{BoundingBox, Point, ScalarGrid};

const BLUE: ([f64; 3], [f64; 3]) = ([0.08, 0.16, 0.55], [0.72, 0.84, 1.0]);
const YELLOW: ([f64; 3], [f64; 3]) = ([0.55, 0.45, 0.0], [1.0, 1.0, 0.55]);
// near-black, but keeping the sign readable from the pixel
const BAND_NEG: [u8; 3] = [0, 0, 24];
const BAND_POS: [u8; 3] = [24, 20, 0];
const ISO_SHADE: f64 = 0.45;

/// Sign read back from a rendered pixel: `Some(true)` for the positive
/// (yellow) side, `Some(false)` for the negative (blue) side.
pub fn pixel_sign(rgb: [u8; 3]) -> Option<bool> {
    match rgb[2].cmp(&rgb[0]) {
        std::cmp::Ordering::Greater => Some(false),
        std::cmp::Ordering::Less => Some(true),
        std::cmp::Ordering::Equal => None,
    }
}

/// Pixel centre values plus the `(w+1)×(h+1)` pixel corner values, both in
/// image order (top row first).
struct Samples {
    width: usize,
    height: usize,
    centre: Vec<f64>,
    corner: Vec<f64>,
}

fn straddles(lo: f64, hi: f64, step: f64) -> bool {
    hi > lo && (lo / step).ceil() <= (hi / step).floor()
}

fn lerp(c: ([f64; 3], [f64; 3]), t: f64) -> [f64; 3] {
    std::array::from_fn(|k| c.0[k] + (c.1[k] - c.0[k]) * t)
}

fn compose(s: &Samples, step: f64) -> (FieldImage, Vec<bool>) {
    let neg_max = s.centre.iter().fold(0.0f64, |m, v| m.max(-v));
    let pos_max = s.centre.iter().fold(0.0f64, |m, v| m.max(*v));
    let cw = s.width + 1;
    let (pixels, iso): (Vec<[u8; 3]>, Vec<bool>) = (0..s.width * s.height)
        .into_par_iter()
        .map(|idx| {
            let (x, row) = (idx % s.width, idx / s.width);
            let v = s.centre[idx];
            let corners = [row * cw + x, row * cw + x + 1, (row + 1) * cw + x, (row + 1) * cw + x + 1];
            let (lo, hi) = corners.iter().fold((v, v), |(lo, hi), &c| (lo.min(s.corner[c]), hi.max(s.corner[c])));
            let iso = straddles(lo, hi, step);
            if v.abs() < 0.5 * step {
                return (if v < 0.0 { BAND_NEG } else { BAND_POS }, iso);
            }
            let mut c = if v < 0.0 { lerp(BLUE, -v / neg_max) } else { lerp(YELLOW, v / pos_max) };
            if iso {
                c = c.map(|x| x * ISO_SHADE);
            }
            (to_rgb8(c), iso)
        })
        .unzip();
    (FieldImage::new(s.width, s.height, pixels).expect("pixel count"), iso)
}

fn check_step(step: f64) -> Result<()> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("isoline step must be positive, got {step}")))
    }
}

/// Renders a 2D grid with one pixel per node. Pixel corners take the mean
/// of the surrounding nodes.
pub fn render_grid(g: &ScalarGrid, step: f64) -> Result<FieldImage> {
    Ok(render_grid_with_isolines(g, step)?.0)
}

/// [`render_grid`] plus the isoline pixel mask.
pub fn render_grid_with_isolines(g: &ScalarGrid, step: f64) -> Result<(FieldImage, Vec<bool>)> {
    check_step(step)?;
    if g.dim() != 2 {
        return Err(invalid("only 2D grids can be rendered"));
    }
    let [w, h, _] = g.dims();
    let node = |i: usize, row: usize| g.get(i, h - 1 - row, 0);
    let centre: Vec<f64> = (0..w * h).map(|idx| node(idx % w, idx / w)).collect();
    let corner: Vec<f64> = (0..(w + 1) * (h + 1))
        .map(|idx| {
            let (cx, cy) = (idx % (w + 1), idx / (w + 1));
            let xs = [cx.saturating_sub(1), cx.min(w - 1)];
            let ys = [cy.saturating_sub(1), cy.min(h - 1)];
            0.25 * (node(xs[0], ys[0]) + node(xs[1], ys[0]) + node(xs[0], ys[1]) + node(xs[1], ys[1]))
        })
        .collect();
    Ok(compose(&Samples { width: w, height: h, centre, corner }, step))
}

/// Renders any 2D field evaluator over `bbox`. Evaluation errors render
/// as zero.
pub fn render_fn<F>(f: F, bbox: &BoundingBox, width: usize, height: usize, step: f64) -> Result<FieldImage>
where
    F: Fn(&Point) -> Result<f64> + Sync,
{
    Ok(render_fn_with_isolines(f, bbox, width, height, step)?.0)
}

pub fn render_fn_with_isolines<F>(
    f: F,
    bbox: &BoundingBox,
    width: usize,
    height: usize,
    step: f64,
) -> Result<(FieldImage, Vec<bool>)>
where
    F: Fn(&Point) -> Result<f64> + Sync,
{
    check_step(step)?;
    if width == 0 || height == 0 || bbox.dim != 2 {
        return Err(invalid("rendering needs a 2D box and a non-empty image"));
    }
    let (sx, sy) = (bbox.extent(0) / width as f64, bbox.extent(1) / height as f64);
    // image position (x right, row down) in pixel units to world
    let world = |u: f64, r: f64| {
        let p = Point::new(bbox.min.x() + u * sx, bbox.max.y() - r * sy);
        // corners on the far edges land exactly on the box
        Point::new(p.x().min(bbox.max.x()), p.y().max(bbox.min.y()))
    };
    let eval = |p: Point| f(&p).unwrap_or(0.0);
    let centre: Vec<f64> = (0..width * height)
        .into_par_iter()
        .map(|idx| eval(world((idx % width) as f64 + 0.5, (idx / width) as f64 + 0.5)))
        .collect();
    let corner: Vec<f64> = (0..(width + 1) * (height + 1))
        .into_par_iter()
        .map(|idx| eval(world((idx % (width + 1)) as f64, (idx / (width + 1)) as f64)))
        .collect();
    Ok(compose(&Samples { width, height, centre, corner }, step))
}

/// Isoline pixels with exactly one isoline pixel among their 8 neighbours:
/// loose ends. Closed, unbroken isolines have none away from the image edge.
pub fn isoline_endpoints(mask: &[bool], width: usize, height: usize) -> usize {
    let mut ends = 0;
    for row in 1..height.saturating_sub(1) {
        for x in 1..width - 1 {
            if !mask[row * width + x] {
                continue;
            }
            let mut n = 0;
            for dy in [-1i64, 0, 1] {
                for dx in [-1i64, 0, 1] {
                    if (dx, dy) != (0, 0) {
                        let (xx, yy) = ((x as i64 + dx) as usize, (row as i64 + dy) as usize);
                        n += mask[yy * width + xx] as usize;
                    }
                }
            }
            ends += (n == 1) as usize;
        }
    }
    ends
}
