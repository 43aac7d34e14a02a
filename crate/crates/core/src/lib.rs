//! Numerical machinery for edge-colouring models and graphons: partition
//! functions, cut-type seminorms, the greedy weak-regularity decomposition,
//! and quotient pseudometrics under finite or sampled orthogonal groups.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod graphon;
pub mod hilbert;
pub mod orbit;
pub mod regularity;
pub mod tolerance;
pub mod vertex_model;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
