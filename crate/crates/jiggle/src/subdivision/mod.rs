//! Crystalline subdivision and its relatives.
//!
//! Every vertex produced here carries an exact [`BaryKey`] over the vertices
//! of the root complex, so coincident points are identified exactly and
//! shapes can be compared without floating point tolerances.

mod cone;
mod crystalline;
mod generalized;
mod key;
mod models;
mod nice_cover;

pub use cone::cone_off;
pub use crystalline::crystalline_subdivide;
pub use generalized::{generalized_subdivide, max_cone_pieces, required_level, CellKind, GeneralizedSubdivision};
pub use key::BaryKey;
pub use models::{catalog_level, model_simplices, shape_key, ModelCatalog, ModelSimplex, ShapeKey};
pub use nice_cover::{nice_cover, NiceCover};

pub(crate) use crystalline::refine;
