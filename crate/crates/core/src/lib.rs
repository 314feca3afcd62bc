//! Exact constructions realizing flat manifolds as cusp cross-sections of
//! arithmetic hyperbolic orbifolds.
//!
//! A flat manifold enters as a Bieberbach group presented by rational affine
//! generators ([`bieberbach`]). Invariant flat metrics are carried as exact
//! rational Gram matrices and approximated from arbitrary real targets
//! ([`shapes`]). Each arithmetic shape embeds into the orthogonal group of
//! the Lorentzian form `B_K ⊕ diag(1, −1)` as a group fixing a null vector
//! ([`lorentz`]), and a prime certifying a torsion-free congruence subgroup
//! that contains the unipotent part is produced by [`selberg`]. The
//! [`density`] harness drives the whole pipeline over random targets.

pub mod bieberbach;
pub mod density;
pub mod error;
pub mod exactlin;
pub mod json;
pub mod lorentz;
pub mod selberg;
pub mod shapes;

pub use error::{Error, Result};
