//! Shared fixtures for the crate's unit tests.

use crate::measure::{build_tree, DyadicMeasureTree};
use crate::sample::{FeatureOrder, FeatureSample, SampleRow};

/// Build a sample from `(pattern, count)` pairs without ceremony.
pub(crate) fn sample_of(n_features: usize, rows: &[(&[usize], u64)]) -> FeatureSample {
    let rows = rows
        .iter()
        .map(|(pattern, count)| SampleRow {
            pattern: pattern.iter().copied().collect(),
            count: *count,
        })
        .collect();
    FeatureSample::new(n_features, rows, "fixture").unwrap()
}

/// The 8-item, 2-feature toy sample used across the docs and tests:
/// leaf masses 00→3, 01→1, 10→2, 11→2.
pub(crate) fn toy_sample() -> FeatureSample {
    sample_of(2, &[(&[1, 2], 3), (&[1], 1), (&[2], 2), (&[], 2)])
}

/// The toy sample's tree under the identity order.
pub(crate) fn toy_tree() -> DyadicMeasureTree {
    build_tree(&toy_sample(), &FeatureOrder::identity(2)).unwrap()
}
