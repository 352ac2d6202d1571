//! Adaptive distance fields on a balanced quadtree: boundary-driven
//! subdivision, the eikonal solve on the tree's vertex graph, and C¹
//! restoration of the field with one bicubic Hermite patch per leaf.

mod hfim;
mod patch;
mod tree;

pub use hfim::{hfim_solve, tree_sources, TreeGraph};
pub use patch::AdfField;
pub use tree::{AdfTree, Cell, TreeStats, DIRS};
