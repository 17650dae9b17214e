//! First order relations as oracles over jets.
//!
//! A relation is queried through [`RelationOracle`]: a margin that
//! certifies a ball of jets inside the relation, and a fiber perturbation
//! that moves the slope of a jet by less than `ε` into the relation.

mod builtin;
mod config;
mod distribution;
mod genpos;
mod jet;
mod oracle;

pub use builtin::{
    contact3d_relation, curl, maxrank_relation, rotation_generator, transversality_relation,
    verygenpos_relation, AllOf, Contact3d, MaxRank, Transverse, VeryGenPos,
};
pub use config::{RelationConfig, RelationKind, RelationSet};
pub use distribution::{Distribution, DistributionSpec};
pub use genpos::{verify_general_position, FaceMargin, GeneralPositionReport};
pub use jet::{jet_of_affine, linear_extension, Chart, Jet1};
pub use oracle::{
    certify_jets, elementary_directions, generic_directions, sweep, Certification, RelationOracle,
    MARGIN_FLOOR, SWEEP_STEPS, THETA,
};
