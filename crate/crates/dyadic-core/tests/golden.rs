//! Byte-stable rendering checks against committed golden files.
//!
//! Regenerate with `REGEN_GOLDEN=1 cargo test -p dyadic-core --test golden`
//! after an intentional rendering change, and review the diff.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use dyadic_core::daywheel::{render_daywheel, DaywheelSpec};
use dyadic_core::measure::build_tree;
use dyadic_core::sample::{FeatureOrder, FeatureSample, SampleRow};

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check(name: &str, produced: &str) {
    let path = golden_path(name);
    if std::env::var_os("REGEN_GOLDEN").is_some() {
        fs::write(&path, produced).expect("write golden");
    }
    let want = fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("golden file {} missing", path.display()));
    assert_eq!(produced, want, "{name} drifted from its golden copy");
}

fn pat(ids: &[usize]) -> BTreeSet<usize> {
    ids.iter().copied().collect()
}

/// Two features; leaf masses 3, 1, 2, 2 across 00, 01, 10, 11.
fn toy_tree() -> dyadic_core::measure::DyadicMeasureTree {
    let sample = FeatureSample::new(
        2,
        vec![
            SampleRow { pattern: pat(&[1, 2]), count: 3 },
            SampleRow { pattern: pat(&[1]), count: 1 },
            SampleRow { pattern: pat(&[2]), count: 2 },
            SampleRow { pattern: pat(&[]), count: 2 },
        ],
        "toy",
    )
    .unwrap();
    build_tree(&sample, &FeatureOrder::identity(2)).unwrap()
}

#[test]
fn toy_daywheel_matches_golden() {
    let spec = DaywheelSpec { levels: 2, radius_px: 100.0, ..DaywheelSpec::default() };
    let svg = render_daywheel(&toy_tree(), &spec).unwrap();
    check("toy_daywheel.svg", &svg);
}
