//! Cross-checks of the bundled corpus against its published summary values.
//!
//! Each check prints one `MATCH`/`MISMATCH` line.  Only the source-2 column
//! and the worked example's face list are hard checks: those are clean
//! goldens, so a mismatch there means the data or the pipeline regressed
//! and fails the run.  Everything else — the composite and sources 3-5 —
//! is reported with both sides but never fails the run, because the source
//! tables carry visible transcription artifacts and the published composite
//! summaries demonstrably disagree with a verbatim merge of them.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use dyadic_core::complexes::{nerve_zero, MaximalFaceSet};
use dyadic_core::homology::{betti_numbers, closure};
use dyadic_core::measure::build_tree;
use dyadic_core::ratio::rat;
use dyadic_core::sample::{
    histogram_row, merge_samples, order_features, parse_violation_table, top_pattern_report,
    FeatureSample,
};

use crate::{print_warnings, read_file, CliError};

const N_FEATURES: usize = 30;
const SOURCE_FILES: [&str; 4] = ["source2.csv", "source3.csv", "source4.csv", "source5.csv"];

/// Published violation histogram: one row per violation count 1..=10,
/// columns composite then sources 2..5.
const HISTOGRAM: [[u64; 5]; 10] = [
    [2487, 385, 797, 465, 840],
    [742, 83, 267, 145, 247],
    [255, 26, 98, 52, 79],
    [156, 14, 56, 40, 46],
    [165, 15, 49, 43, 58],
    [91, 6, 31, 37, 17],
    [18, 1, 6, 7, 4],
    [7, 1, 3, 0, 3],
    [1, 0, 0, 0, 1],
    [2, 0, 2, 0, 0],
];
const TOTALS: [u64; 5] = [3924, 531, 1309, 789, 1295];
/// Published count of distinct composite feature vectors.
const DISTINCT_COMPOSITE: usize = 219;
/// Published count of constraints never violated in the composite.
const NEVER_VIOLATED: usize = 5;

/// Published Betti numbers of each source's violation nerve (composite
/// first); row lengths follow the published table.
const BETTI: [&[usize]; 5] = [
    &[2, 2, 7, 0, 0, 0, 0, 0, 0, 0],
    &[4, 2, 0, 0, 0, 0, 0, 0],
    &[2, 8, 3, 0, 0, 0, 0, 0, 0, 0],
    &[2, 1, 2, 0, 0, 0, 0],
    &[1, 2, 0, 0, 0, 0, 0, 0, 0],
];
/// Published Betti numbers of the worked-example face list.
const EXAMPLE_BETTI: [usize; 4] = [4, 1, 2, 0];

type TopRows = &'static [(&'static [usize], u32)];

/// Published top-pattern rows (violated constraints, percentage) at 50%
/// coverage, composite first.
const TOP50: [TopRows; 5] = [
    &[(&[1], 41), (&[4], 6), (&[2], 4)],
    &[(&[1], 48), (&[4], 14)],
    &[(&[1], 38), (&[7], 5), (&[12], 5), (&[1, 12], 4)],
    &[(&[1], 32), (&[6], 15), (&[1, 6], 8)],
    &[(&[1], 46), (&[4], 7)],
];
/// Published top-pattern rows at 60% coverage, composite first.
const TOP60: [TopRows; 5] = [
    &[(&[1], 41), (&[4], 6), (&[2], 4), (&[6], 3), (&[7], 3), (&[2, 3, 5, 8, 11], 3)],
    &[(&[1], 48), (&[4], 14)],
    &[(&[1], 38), (&[7], 5), (&[12], 5), (&[1, 12], 4), (&[2], 4), (&[13], 4), (&[4], 3)],
    &[(&[1], 32), (&[6], 15), (&[1, 6], 8), (&[4], 6)],
    &[(&[1], 46), (&[4], 7), (&[2], 4), (&[1, 4], 3), (&[7], 3)],
];

struct Check {
    hard: bool,
    pass: bool,
    line: String,
}

struct Checks(Vec<Check>);

impl Checks {
    fn record(&mut self, hard: bool, pass: bool, name: &str, detail: String) {
        let line = if pass {
            format!("MATCH {name} ({detail})")
        } else {
            format!("MISMATCH {name}: {detail}")
        };
        self.0.push(Check { hard, pass, line });
    }

    /// Equality check printing both sides on mismatch.
    fn compare<T: PartialEq, F: Fn(&T) -> String>(
        &mut self,
        hard: bool,
        name: &str,
        computed: &T,
        published: &T,
        show: F,
    ) {
        let pass = computed == published;
        let detail = if pass {
            show(computed)
        } else {
            format!("computed {} published {}", show(computed), show(published))
        };
        self.record(hard, pass, name, detail);
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn show_rows(rows: &[(Vec<usize>, u32)]) -> String {
    rows.iter()
        .map(|(pattern, pct)| {
            let ids = pattern.iter().map(usize::to_string).collect::<Vec<_>>().join(";");
            format!("{ids}:{pct}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn computed_top_rows(sample: &FeatureSample, percent: i64) -> Result<Vec<(Vec<usize>, u32)>, CliError> {
    let rows = top_pattern_report(sample, &rat(percent, 100))?;
    Ok(rows
        .into_iter()
        .map(|r| (r.pattern.iter().copied().collect(), r.percent))
        .collect())
}

fn published_top_rows(rows: TopRows) -> Vec<(Vec<usize>, u32)> {
    rows.iter().map(|(pattern, pct)| (pattern.to_vec(), *pct)).collect()
}

fn betti_of(sample: &FeatureSample) -> Result<Vec<usize>, CliError> {
    let tree = build_tree(sample, &order_features(sample)?)?;
    let nerve = nerve_zero(&tree)?;
    if nerve.is_empty() {
        return Err(CliError::EmptyComplex);
    }
    Ok(betti_numbers(&closure(&nerve)).betti)
}

fn load_table(dir: &Path, name: &str) -> Result<FeatureSample, CliError> {
    let path = dir.join(name);
    let text = read_file(&path)?;
    let label = name.trim_end_matches(".csv").to_string();
    let parsed = parse_violation_table(&text, &label)?;
    print_warnings(&path, &parsed.warnings);
    Ok(parsed.sample)
}

pub(crate) fn cmd_validate(dir: &Path, out: &mut impl Write) -> Result<(), CliError> {
    let sources: Vec<FeatureSample> =
        SOURCE_FILES.iter().map(|f| load_table(dir, f)).collect::<Result<_, _>>()?;
    let composite = merge_samples(&sources)?;
    // Samples in published column order: composite, then sources 2..5.
    let all: Vec<(&str, &FeatureSample)> = std::iter::once(("composite", &composite))
        .chain(SOURCE_FILES.iter().map(|f| f.trim_end_matches(".csv")).zip(&sources))
        .collect();

    let mut checks = Checks(Vec::new());
    // Hard checks are reserved for the source-2 column (published column 1).
    let hard_col = |col: usize| col == 1;

    for (col, (name, sample)) in all.iter().enumerate() {
        checks.compare(
            hard_col(col),
            &format!("{name} total"),
            &sample.total(),
            &TOTALS[col],
            u64::to_string,
        );
        let hist = histogram_row(sample, HISTOGRAM.len());
        let published: Vec<u64> = HISTOGRAM.iter().map(|row| row[col]).collect();
        checks.compare(hard_col(col), &format!("{name} histogram"), &hist, &published, |h| {
            join(h.iter())
        });
    }

    // Distinct composite vectors and never-violated constraints: the
    // corpus disagrees with the published counts, so both stay soft.
    checks.compare(
        false,
        "composite distinct vectors",
        &composite.rows().len(),
        &DISTINCT_COMPOSITE,
        usize::to_string,
    );
    let violated: BTreeSet<usize> =
        composite.rows().iter().flat_map(|r| r.pattern.iter().copied()).collect();
    let never: Vec<usize> = (1..=N_FEATURES).filter(|i| !violated.contains(i)).collect();
    {
        let pass = never.len() == NEVER_VIOLATED;
        let detail = if pass {
            format!("{}", never.len())
        } else {
            format!("computed {} ({}) published {}", never.len(), join(never.iter()), NEVER_VIOLATED)
        };
        checks.record(false, pass, "never-violated constraints", detail);
    }

    // Betti numbers of the violation nerves: sources 3-5 reproduce their
    // published rows, the composite does not; only source 2 is a golden.
    for (col, (name, sample)) in all.iter().enumerate() {
        let computed = betti_of(sample)?;
        let published = BETTI[col].to_vec();
        checks.compare(hard_col(col), &format!("{name} betti"), &computed, &published, |b| {
            join(b.iter())
        });
    }

    // Top-pattern tables at 50% and 60% coverage.  Sources 2-4 match the
    // published rows; source 5 and the composite differ (the published
    // source-5 rows follow a different constraint numbering).
    for (coverage, table) in [(50, &TOP50), (60, &TOP60)] {
        for (col, (name, sample)) in all.iter().enumerate() {
            let computed = computed_top_rows(sample, coverage)?;
            let published = published_top_rows(table[col]);
            checks.compare(
                hard_col(col),
                &format!("{name} top-{coverage}% patterns"),
                &computed,
                &published,
                |r| show_rows(r),
            );
        }
    }

    // The published face list for source 2 must agree with the nerve
    // computed from the source-2 table, maximal faces and closures alike.
    let faces_text = read_file(&dir.join("source2_faces.txt"))?;
    let published_faces = MaximalFaceSet::parse_face_lines(&faces_text)?;
    let tree2 = build_tree(&sources[0], &order_features(&sources[0])?)?;
    let computed_faces = nerve_zero(&tree2)?;
    {
        let pass = published_faces == computed_faces;
        let detail = if pass {
            format!("{} maximal faces, closure {} faces", computed_faces.len(), closure(&computed_faces).total_faces())
        } else {
            format!("computed {} maximal faces, published {}", computed_faces.len(), published_faces.len())
        };
        checks.record(true, pass, "source2 nerve face list", detail);
    }

    // The worked example's face list must reproduce its published Betti row.
    let example_text = read_file(&dir.join("example_faces.txt"))?;
    let example_faces = MaximalFaceSet::parse_face_lines(&example_text)?;
    if example_faces.is_empty() {
        return Err(CliError::EmptyComplex);
    }
    let example_betti = betti_numbers(&closure(&example_faces)).betti;
    checks.compare(true, "example betti", &example_betti, &EXAMPLE_BETTI.to_vec(), |b| join(b.iter()));

    for check in &checks.0 {
        writeln!(out, "{}", check.line)?;
    }
    let total = checks.0.len();
    let mismatches = checks.0.iter().filter(|c| !c.pass).count();
    let hard = checks.0.iter().filter(|c| !c.pass && c.hard).count();
    writeln!(out, "checks {total} match {} mismatch {mismatches} hard-mismatch {hard}", total - mismatches)?;
    if hard > 0 {
        return Err(CliError::ValidationFailed { hard });
    }
    Ok(())
}
