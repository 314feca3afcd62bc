//! Bieberbach groups given by rational affine generators: holonomy,
//! translation lattice, torsion-freeness, holonomy averaging of forms, and a
//! catalog of small flat-manifold groups.

mod affine;
mod catalog;
mod group;
pub(crate) mod lattice;

pub use affine::{compose, AffineMap};
pub use catalog::{catalog, catalog_names};
pub use group::{
    analyze, holonomy, is_invariant, is_torsion_free, theta_average, translation_lattice, BieberbachGroup,
    CheckedGroup, HolonomyGroup, DEFAULT_MAX_ORDER,
};
