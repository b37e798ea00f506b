//! Numerical toolkit for weighted (scaled) projections, subspace angles,
//! compatibility constants and Riesz-frame diagnostics in finite-dimensional
//! complex inner-product spaces.
//!
//! The crate is organized around a handful of identities connecting three
//! kinds of objects:
//!
//! * oblique projections that are selfadjoint for a weighted inner product
//!   (the block construction and the norm-minimal distinguished member),
//! * convex-hull decompositions of weighted projections over invertible
//!   square subsystems, together with the enumeration identities tying the
//!   supremum of weighted-projection norms to minimal singular values of
//!   basis row subsets,
//! * frame bounds of subfamilies of a frame and the uniform lower bound
//!   characterizing Riesz frames via angles between the analysis nullspace
//!   and coordinate subspaces.
//!
//! Everything is exact enumeration plus seeded sampling at desk scale; the
//! `cli` module exposes the same operations as a batch front-end.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod frames;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod oblique;
pub mod subspace;

pub use bounds::{
    bental_teboulle, complex_cone_duality, enum_cap, enumerate_ja, equi2_check, m_i,
    semidefinite_limit_check, stewart_oleary, truncation_growth, BoundReport, DualityReport,
    Equi2Report, GrowthPoint, HullDecomposition, HullMember, IndexSet, SamplingConfig, TailRule,
};
pub use error::{Error, Result};
pub use frames::{
    frame_bounds, nullspace_tail_experiment, riesz_compatibility_equivalence, riesz_constant,
    subset_bounds, FrameBounds, FrameSystem, RieszEquivalenceReport, TailPoint,
};
pub use linalg::{
    numerical_rank, operator_norm, orthonormal_range, pinv, reduced_min_modulus, svd, SvdResult,
    Tolerance,
};
pub use matrix::{ComplexMatrix, Scalar};
pub use oblique::{
    compatibility, compression_check, distinguished_projection, distinguished_projection_diag,
    ljance_ptak_norm, projection_family, weighted_projection, CompatibilityReport, DiagonalWeight,
    ObliqueProjection, WeightKind,
};
pub use subspace::{
    alternating_projection_error, angle_pair, dixmier_cos, friedrichs_cos, friedrichs_sin,
    intersect, orthogonal_projector, position_pprime, AnglePair, Subspace, INTERSECTION_TOL,
};
