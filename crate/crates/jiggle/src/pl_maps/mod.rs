//! Piecewise smooth and piecewise linear maps on polyhedra.

mod distance;
mod io;
mod map;
mod ops;
mod piece;
mod registry;

pub use distance::{c0_c1_distance, c0_c1_distance_sampled, SAMPLES_PER_EDGE};
pub use io::{ComplexSource, MapJson};
pub use map::{PiecewiseMap, TAU_GEOM};
pub use ops::{interpolate, join_map, linearize, linearize_relative, Weighting};
pub use piece::{AffinePiece, BlendPiece, Piece};
pub use registry::{SmoothFn, SmoothSpec};

pub(crate) use distance::{barycentric_grid, combine, piece_distance};
pub(crate) use map::barycenter;
