//! Command-line plumbing: wiring ingestion, measure trees, nerve
//! complexes, homology, reports, and figures into subcommands.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data problems
//! (parse failures, inconsistent inputs, failed validation).

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use dyadic_core::complexes::{nerve_one, nerve_pairs, nerve_zero, ComplexError, MaximalFaceSet};
use dyadic_core::daywheel::{render_daywheel, DaywheelError, DaywheelSpec};
use dyadic_core::homology::{
    betti_numbers, betti_numbers_with_torsion, closure, format_betti_report,
};
use dyadic_core::measure::{build_tree, write_coefficient_dump, DyadicMeasureTree, MeasureError};
use dyadic_core::permute::{
    orbit_average_bounded, recompute_coefficients, FeaturePermutation, PermuteError,
};
use dyadic_core::ratio::{format_rational, rat};
use dyadic_core::sample::{
    histogram_row, merge_samples, order_features, parse_feature_vectors, parse_violation_table,
    top_pattern_report, FeatureOrder, FeatureSample, IngestError, ParseWarning,
};
use dyadic_core::tree_measure::{parse_tree_text, verify_lemma, TreeMeasureError};

pub mod validate;

/// Exact measures and homology for binary feature data.
#[derive(Debug, Parser)]
#[command(name = "dyadic", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IngestEmit {
    /// One summary line per sample.
    Summary,
    /// Canonical violation-table lines.
    Table,
    /// Expanded 0/1 feature-vector lines.
    Vectors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComplexKind {
    /// Nerve over violated features (bit 0).
    Zero,
    /// Nerve over satisfied features (bit 1).
    One,
    /// Nerve over (feature, bit) pairs.
    Pairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PermuteEmit {
    /// Coefficient dump of the permuted tree.
    Coeffs,
    /// `path mass` lines of the permuted leaves.
    Leaves,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse violation tables or feature-vector files and re-emit them.
    Ingest {
        /// Input files.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Inputs are 0/1 feature-vector lines instead of violation tables.
        #[arg(long)]
        vectors: bool,
        /// Merge all inputs into one sample before emitting.
        #[arg(long)]
        merge: bool,
        /// Output form.
        #[arg(long, value_enum, default_value = "summary")]
        emit: IngestEmit,
    },
    /// Build the measure tree and dump its product coefficients.
    Coeffs {
        file: PathBuf,
        #[arg(long)]
        vectors: bool,
        /// Explicit feature order (whitespace-separated indices); the
        /// default orders features by descending violation count.
        #[arg(long)]
        order_file: Option<PathBuf>,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Betti numbers of a sample's nerve complex or of an explicit face list.
    Betti {
        file: PathBuf,
        #[arg(long, conflicts_with = "faces")]
        vectors: bool,
        /// Input is a face list (one face of vertex ids per line).
        #[arg(long)]
        faces: bool,
        /// Which nerve to build from a sample input.
        #[arg(long, value_enum, default_value = "zero")]
        complex: ComplexKind,
        /// Also report torsion (invariant factors > 1).
        #[arg(long)]
        torsion: bool,
    },
    /// Render the daywheel SVG of a sample's measure tree.
    Daywheel {
        file: PathBuf,
        #[arg(long)]
        vectors: bool,
        #[arg(long)]
        order_file: Option<PathBuf>,
        /// Rings to draw.
        #[arg(long, default_value_t = 12)]
        levels: usize,
        /// Outer radius in pixels.
        #[arg(long, default_value_t = 360.0)]
        radius: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Permute feature positions and recompute, or average over a group.
    Permute {
        file: PathBuf,
        #[arg(long)]
        vectors: bool,
        #[arg(long)]
        order_file: Option<PathBuf>,
        /// Permutation in cycle notation, e.g. "(1 2)(5 7 9)"; repeatable.
        /// Without --average the cycles compose left to right.
        #[arg(long = "cycles", required = true)]
        cycles: Vec<String>,
        /// Orbit-average over the group generated by the cycles.
        #[arg(long)]
        average: bool,
        /// Group-size bound for --average.
        #[arg(long, default_value_t = 10_080)]
        bound: usize,
        #[arg(long, value_enum, default_value = "coeffs")]
        emit: PermuteEmit,
    },
    /// Violation histograms and top-pattern coverage reports.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        vectors: bool,
        #[arg(long)]
        merge: bool,
        /// Coverage percentage for the top-pattern report.
        #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u32).range(1..=100))]
        coverage: u32,
    },
    /// Cross-check the bundled corpus against its published summary values.
    Validate {
        /// Corpus directory.
        #[arg(long, default_value = "data")]
        data: PathBuf,
    },
    /// Verify the representation-lemma invariants on a general tree file.
    TreeLemma {
        file: PathBuf,
        /// Treat the upper coefficient bound as strict.
        #[arg(long)]
        strict_upper: bool,
    },
}

/// Errors that terminate a subcommand (exit code 2).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error(transparent)]
    Output(#[from] std::io::Error),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Permute(#[from] PermuteError),
    #[error(transparent)]
    TreeMeasure(#[from] TreeMeasureError),
    #[error(transparent)]
    Daywheel(#[from] DaywheelError),
    #[error("empty complex (no faces)")]
    EmptyComplex,
    #[error("{path}: order file must list each feature index exactly once")]
    BadOrderFile { path: String },
    #[error("validation failed: {hard} hard mismatch(es)")]
    ValidationFailed { hard: usize },
    #[error("tree violates {failed} lemma check(s)")]
    LemmaFailed { failed: usize },
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successes; everything else is usage.
            let code =
                if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                    0
                } else {
                    1
                };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    match execute(cli, &mut stdout.lock()) {
        Ok(()) => 0,
        // A closed pipe (e.g. `| head`) is not our error; exit quietly.
        Err(CliError::Output(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

/// Run one parsed command, writing its output to `out`.
pub fn execute(cli: Cli, out: &mut impl Write) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest { files, vectors, merge, emit } => cmd_ingest(&files, vectors, merge, emit, out),
        Command::Coeffs { file, vectors, order_file, out: dest } => {
            cmd_coeffs(&file, vectors, order_file.as_deref(), dest.as_deref(), out)
        }
        Command::Betti { file, vectors, faces, complex, torsion } => {
            cmd_betti(&file, vectors, faces, complex, torsion, out)
        }
        Command::Daywheel { file, vectors, order_file, levels, radius, out: dest } => {
            cmd_daywheel(&file, vectors, order_file.as_deref(), levels, radius, dest.as_deref(), out)
        }
        Command::Permute { file, vectors, order_file, cycles, average, bound, emit } => {
            cmd_permute(&file, vectors, order_file.as_deref(), &cycles, average, bound, emit, out)
        }
        Command::Report { files, vectors, merge, coverage } => {
            cmd_report(&files, vectors, merge, coverage, out)
        }
        Command::Validate { data } => validate::cmd_validate(&data, out),
        Command::TreeLemma { file, strict_upper } => cmd_tree_lemma(&file, strict_upper, out),
    }
}

// --- shared input helpers -------------------------------------------------

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|source| CliError::File { path: path.display().to_string(), source })
}

fn file_label(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn print_warnings(path: &Path, warnings: &[ParseWarning]) {
    for w in warnings {
        eprintln!("warning {}: {w}", path.display());
    }
}

/// Load one sample from a violation table (default) or vector file.
fn load_sample(path: &Path, vectors: bool) -> Result<FeatureSample, CliError> {
    let text = read_file(path)?;
    let label = file_label(path);
    if vectors {
        Ok(parse_feature_vectors(&text, &label)?)
    } else {
        let parsed = parse_violation_table(&text, &label)?;
        print_warnings(path, &parsed.warnings);
        Ok(parsed.sample)
    }
}

fn load_samples(paths: &[PathBuf], vectors: bool, merge: bool) -> Result<Vec<FeatureSample>, CliError> {
    let samples: Vec<FeatureSample> =
        paths.iter().map(|p| load_sample(p, vectors)).collect::<Result<_, _>>()?;
    if merge && samples.len() > 1 {
        Ok(vec![merge_samples(&samples)?])
    } else {
        Ok(samples)
    }
}

/// An explicit order file: feature indices separated by whitespace.
fn load_order(path: &Path, n_features: usize) -> Result<FeatureOrder, CliError> {
    let text = read_file(path)?;
    let indices: Result<Vec<usize>, _> = text.split_whitespace().map(str::parse).collect();
    let Ok(perm) = indices else {
        return Err(CliError::BadOrderFile { path: path.display().to_string() });
    };
    if perm.len() != n_features {
        return Err(CliError::BadOrderFile { path: path.display().to_string() });
    }
    FeatureOrder::new(perm, path.display().to_string())
        .map_err(|_| CliError::BadOrderFile { path: path.display().to_string() })
}

/// Build a sample's tree under the explicit or derived order.
fn tree_of(sample: &FeatureSample, order_file: Option<&Path>) -> Result<DyadicMeasureTree, CliError> {
    let order = match order_file {
        Some(path) => load_order(path, sample.n_features())?,
        None => order_features(sample)?,
    };
    Ok(build_tree(sample, &order)?)
}

fn write_output(dest: Option<&Path>, text: &str, out: &mut impl Write) -> Result<(), CliError> {
    match dest {
        Some(path) => fs::write(path, text)
            .map_err(|source| CliError::File { path: path.display().to_string(), source }),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

/// `;`-joined pattern ids; `-` for the empty pattern.
fn fmt_pattern(pattern: &BTreeSet<usize>) -> String {
    if pattern.is_empty() {
        "-".to_string()
    } else {
        pattern.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
    }
}

// --- subcommands ----------------------------------------------------------

fn cmd_ingest(
    files: &[PathBuf],
    vectors: bool,
    merge: bool,
    emit: IngestEmit,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let samples = load_samples(files, vectors, merge)?;
    for sample in &samples {
        match emit {
            IngestEmit::Summary => writeln!(
                out,
                "{}: n_features={} rows={} total={}",
                sample.label(),
                sample.n_features(),
                sample.rows().len(),
                sample.total()
            )?,
            IngestEmit::Table => out.write_all(sample.to_violation_table().as_bytes())?,
            IngestEmit::Vectors => out.write_all(sample.to_vector_lines().as_bytes())?,
        }
    }
    Ok(())
}

fn cmd_coeffs(
    file: &Path,
    vectors: bool,
    order_file: Option<&Path>,
    dest: Option<&Path>,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let sample = load_sample(file, vectors)?;
    let tree = tree_of(&sample, order_file)?;
    write_output(dest, &write_coefficient_dump(&tree), out)
}

fn cmd_betti(
    file: &Path,
    vectors: bool,
    faces: bool,
    complex: ComplexKind,
    torsion: bool,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let maximal: MaximalFaceSet = if faces {
        MaximalFaceSet::parse_face_lines(&read_file(file)?)?
    } else {
        let sample = load_sample(file, vectors)?;
        let tree = tree_of(&sample, None)?;
        match complex {
            ComplexKind::Zero => nerve_zero(&tree)?,
            ComplexKind::One => nerve_one(&tree)?,
            ComplexKind::Pairs => nerve_pairs(&tree)?,
        }
    };
    if maximal.is_empty() {
        return Err(CliError::EmptyComplex);
    }
    let complex = closure(&maximal);
    let betti = if torsion { betti_numbers_with_torsion(&complex) } else { betti_numbers(&complex) };
    out.write_all(format_betti_report(&betti).as_bytes())?;
    Ok(())
}

fn cmd_daywheel(
    file: &Path,
    vectors: bool,
    order_file: Option<&Path>,
    levels: usize,
    radius: f64,
    dest: Option<&Path>,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let sample = load_sample(file, vectors)?;
    let tree = tree_of(&sample, order_file)?;
    let spec = DaywheelSpec { levels, radius_px: radius, ..DaywheelSpec::default() };
    write_output(dest, &render_daywheel(&tree, &spec)?, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_permute(
    file: &Path,
    vectors: bool,
    order_file: Option<&Path>,
    cycles: &[String],
    average: bool,
    bound: usize,
    emit: PermuteEmit,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let sample = load_sample(file, vectors)?;
    let tree = tree_of(&sample, order_file)?;
    let n = tree.maxscale();
    let parsed: Vec<FeaturePermutation> = cycles
        .iter()
        .map(|c| FeaturePermutation::parse(c, n))
        .collect::<Result<_, _>>()
        .map_err(CliError::Permute)?;
    let result = if average {
        orbit_average_bounded(&tree, &parsed, bound)?
    } else {
        // Compose left to right: the first --cycles acts first.
        let mut g = FeaturePermutation::identity(n);
        for step in &parsed {
            g = step.compose(&g)?;
        }
        recompute_coefficients(&tree, &g)?
    };
    match emit {
        PermuteEmit::Coeffs => out.write_all(write_coefficient_dump(&result).as_bytes())?,
        PermuteEmit::Leaves => {
            for (path, mass) in result.leaves() {
                writeln!(out, "{path} {}", format_rational(&mass))?;
            }
        }
    }
    Ok(())
}

fn cmd_report(
    files: &[PathBuf],
    vectors: bool,
    merge: bool,
    coverage: u32,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let samples = load_samples(files, vectors, merge)?;
    for sample in &samples {
        let max_k = sample
            .rows()
            .iter()
            .map(|r| r.pattern.len())
            .max()
            .unwrap_or(0)
            .max(10);
        writeln!(out, "# {} histogram", sample.label())?;
        writeln!(out, "violations,count")?;
        for (k, count) in histogram_row(sample, max_k).iter().enumerate() {
            writeln!(out, "{},{}", k + 1, count)?;
        }
        writeln!(out, "# {} top patterns ({coverage}% coverage)", sample.label())?;
        writeln!(out, "pattern,count,percent")?;
        let rows = top_pattern_report(sample, &rat(i64::from(coverage), 100))?;
        for row in rows {
            writeln!(out, "{},{},{}", fmt_pattern(&row.pattern), row.count, row.percent)?;
        }
    }
    Ok(())
}

fn cmd_tree_lemma(file: &Path, strict_upper: bool, out: &mut impl Write) -> Result<(), CliError> {
    let tree = parse_tree_text(&read_file(file)?)?;
    let report = verify_lemma(&tree, strict_upper);
    writeln!(out, "nodes {}", report.nodes)?;
    let checks = [
        ("mu-path-formula", report.mu_path_ok),
        ("nu-path-formula", report.nu_path_ok),
        ("orthogonality", report.orthogonality_ok),
        ("lower-bounds", report.lower_bounds_ok),
        ("upper-bounds", report.upper_bounds_ok),
    ];
    let mut failed = 0;
    for (name, ok) in checks {
        writeln!(out, "{} {name}", if ok { "ok" } else { "FAIL" })?;
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::LemmaFailed { failed });
    }
    Ok(())
}

// Re-exported for integration tests.
pub use dyadic_core;
