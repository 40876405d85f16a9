//! Flexible polyhedral suspensions: parameterization, coordinate
//! construction, flexion analysis, and invariant validation for the five
//! families of flexible dipyramid-like polyhedra.
//!
//! The pipeline runs parameters -> cap metric -> embedding -> flexion:
//!
//! - [`parameterization`] expands an independent parameter set into a full
//!   cap metric ([`CapGeometry`]), either by symmetric edge-length expansion
//!   or by the recursive angle completion of the axial sub-types.
//! - [`construction`] builds coordinates ([`Embedding`]) at a value of the
//!   flexion variable, one folding ([`DihedralIdentifier`]) at a time.
//! - [`flexion`] differentiates the construction, tests flexibility, finds
//!   flexion ranges and enumerates the flexible foldings.
//! - [`validation`] checks the invariants every flexible suspension obeys:
//!   zero oriented volume, constant total mean curvature, solid-angle pair
//!   sums, and the sub-type dihedral relations.
//! - [`fixtures`] carries the published example tables used as regression
//!   oracles throughout.

pub mod construction;
pub mod error;
pub mod fixtures;
pub mod flexion;
pub mod geometry;
pub mod parameterization;
pub mod types;
pub mod validation;

pub use construction::{
    construct, construct_folding, normalize_to_model, place_initial_faces, symmetric_completion,
    symmetric_masks,
    DihedralIdentifier, Embedding, CLOSURE_TOL,
};
pub use error::{ConstructError, FlexError, GeometryError, ParamError};
pub use fixtures::{catalog, CompletionFixture, EdgeFixture, FixtureCatalog, SeedFixture};
pub use flexion::{
    continuity_adjust, derivative_state, enumerate_foldings, enumerate_foldings_exhaustive,
    find_flexion_range, flexibility_of, flexibility_test, flexible_dis_axial, sweep_states,
    FlexState, FlexionRange, RangeForm, FLEX_TOL,
};
pub use geometry::{Mat3, Vec3};
pub use parameterization::{
    check_folding_constraints, complete_octahedron, complete_suspension, expand_type12,
    partial_construction_filter, FoldingReport,
};
pub use types::{CapGeometry, ParamData, ParameterSet, SubType};
pub use validation::{
    dihedral_relations, oriented_volume, range_grid, solid_angle, solid_angle_pairs, solid_angles,
    total_mean_curvature, validate_full, RelationReport, ValidationReport, ValidationSeries,
};
