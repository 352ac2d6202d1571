//! Interior distance fields: the boundary of a 2D shape is traced into
//! closed loops, its graph Laplacian is decomposed, and points inside are
//! placed in the boundary's diffusion embedding with mean value coordinates.

mod boundary;
mod field;
mod mvc;
mod spectral;

pub use boundary::{extract_boundary, outer_loop, BoundaryLoop};
pub use field::{IdfField, MAX_LOOP_VERTICES, MAX_MODES};
pub use mvc::{mvc_weights, BOUNDARY_TOLERANCE};
pub use spectral::{boundary_laplacian, spectral_decompose, SpectralBasis, RESIDUAL_LIMIT};
