//! From an FRep tree to the signed HFRep field: distance route, C¹
//! smoothing and sigmoid sign restoration.

mod field;
mod sigmoid;
mod smooth;

pub use field::{hfrep_build, sampled_lipschitz, HfrepField, HfrepParams, Region, Route, UdfPart};
pub use sigmoid::sigmoid_step;
pub use smooth::{smooth_udf, smooth_udf_signed, SmoothUdf};
