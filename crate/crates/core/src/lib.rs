//! Deciding and constructing one-bend extensions of a polygonal outer face
//! drawing for biconnected outerplanar graphs, with exact rational geometry.

pub mod geometry_core;
pub mod visibility;
pub mod instance_model;
pub mod extension_solver;
pub mod verifier;
pub mod cli_io;
