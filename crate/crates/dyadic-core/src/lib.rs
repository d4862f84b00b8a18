//! Dyadic measure trees and exact simplicial homology for binary feature data.
//!
//! A dataset of items with `n` binary features is a counting measure on the
//! leaves of a depth-`n` binary tree: at level `i` the tree splits on the
//! `i`-th feature (bit 0 = left). The measure is encoded by one *product
//! coefficient* per node — the normalized left/right mass imbalance — and can
//! be reconstructed exactly from those coefficients. The support of the
//! measure induces nerve-style simplicial complexes whose betti numbers
//! summarize which feature combinations co-occur; these are computed by exact
//! integer linear algebra (no floating point anywhere in the pipeline).
//!
//! Modules:
//! - [`sample`]: parsing and aggregation of feature data (violation tables,
//!   raw 0/1 vectors), feature ordering, histograms and coverage reports.
//! - [`measure`]: the sparse dyadic measure tree, product coefficients, the
//!   product-formula evaluator and reconstructor, Haar-like functions.
//! - [`complexes`]: the nerve complexes N(μ), N₀(μ), N₁(μ) of a measure's
//!   support, represented by maximal faces.
//! - [`homology`]: closure, boundary matrices, betti numbers and optional
//!   torsion via fraction-free elimination and Smith normal form.
//! - [`permute`]: the feature-permutation action on measures, coefficient
//!   recomputation, and orbit averaging (invariant measures).
//! - [`tree_measure`]: the generalization to arbitrary trees carrying a
//!   positive reference measure ν and a non-negative measure μ.
//! - [`daywheel`]: deterministic SVG rendering of a coefficient tree as
//!   concentric rings of sectors.
//!
//! All masses and coefficients are arbitrary-precision rationals
//! ([`num_rational::BigRational`]); every identity the library promises is an
//! exact equality, and the tests check it as such.

pub mod complexes;
pub mod daywheel;
pub mod homology;
pub mod measure;
pub mod permute;
pub mod ratio;
pub mod sample;
pub mod tree_measure;

#[cfg(test)]
pub(crate) mod testutil;

pub use complexes::{maximalize, nerve_one, nerve_pairs, nerve_zero, Face, MaximalFaceSet};
pub use daywheel::{render_daywheel, DaywheelSpec};
pub use homology::{
    betti_numbers, betti_numbers_with_torsion, boundary_matrix, closure, connected_components,
    BettiVector, BoundaryMatrix, SimplicialComplex,
};
pub use measure::{
    build_tree, product_formula_eval, reconstruct_tree, unit_interval_embedding, DyadicMeasureTree,
    DyadicPath, HaarFunction,
};
pub use permute::{orbit_average, permute_paths, recompute_coefficients, FeaturePermutation};
pub use ratio::Rational;
pub use sample::{
    merge_samples, order_features, parse_feature_vectors, parse_violation_table,
    top_pattern_report, violation_histogram, FeatureOrder, FeatureSample,
};
pub use tree_measure::TreeStructuredMeasure;
