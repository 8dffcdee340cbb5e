//! Discrete 2-modulus of connecting path families on planar networks, the
//! non-crossing decomposition of the harmonic current flow, rectangle tilings
//! and refinement studies on orthodiagonal maps.

pub mod error;
pub mod geometry;
pub mod network;

pub use error::*;
pub use geometry::Point;
pub use network::{paths_cross, BelowOracle, DirectedEdge, Edge, Path, PlaneNetwork, Vertex, Violation};
pub mod dirichlet;
pub mod modulus;
pub mod ncms;
pub mod ortho;
pub mod tiling;
pub mod convergence;
pub mod random;
