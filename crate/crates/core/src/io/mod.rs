//! Field files, images, renderers and the sphere tracer.

mod hfrf;
mod image;
mod render;
mod trace;

pub use hfrf::{decode_hfrf, encode_hfrf, read_hfrf, write_hfrf, MAGIC, VERSION};
pub use image::FieldImage;
pub use render::{
    isoline_endpoints, pixel_sign, render_fn, render_fn_with_isolines, render_grid, render_grid_with_isolines,
};
pub use trace::{sphere_trace, trace_ray, Camera, TraceParams, HIT_EPS, MAX_STEPS};
