//! Finite-dimensional computations around unitary cocycles on k-skeletons:
//! skeleton and factorisation-rule validation, cubical 2-cocycles, the unitary
//! cocycle identity, K-theory of 2-graphs via Smith normal form, and paths of
//! cocycles.

pub mod error;
pub mod homotopy;
pub mod kgraph;
pub mod ktheory;
pub mod linalg;
pub mod report;
pub mod skeleton;
pub mod unitary_cocycle;

pub use error::{Error, Result};
pub use homotopy::{
    check_path, conjugation_path, geodesic_path, path_search, residual_gradient, CocyclePath,
    FailureReport, PathCheck, PathFile, PathSearchConfig, SearchOutcome,
};
pub use kgraph::{
    collect_factorisations, enumerate_factorisations, validate_cubical_cocycle,
    validate_factorisation, CubicalCocycle, EnumerationOptions, EnumerationStatus,
    EnumerationSummary, FactorisationRule,
};
pub use ktheory::{
    cokernel, evans_maps, kernel_basis, ktheory_2graph, smith_normal_form, subquotient,
    AbelianGroup, IntMatrix, KGroups, SmithDecomposition,
};
pub use linalg::CMatrix;
pub use report::{ValidationReport, Violation};
pub use skeleton::{adjacency_matrix, two_color_paths, validate_skeleton, BlockKey, Color, Skeleton};
pub use unitary_cocycle::{
    assemble_block, cocycle_residual, flip_cocycle, from_kgraph, gauge_transform, is_cocycle,
    residual_report, Gauge, ResidualReport, UnitaryCocycle,
};
