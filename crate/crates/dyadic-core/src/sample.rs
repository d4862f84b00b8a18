//! Samples of binary feature data: parsing, ordering, merging, reporting.
//!
//! A [`FeatureSample`] is a multiset of binary feature vectors stored as
//! (pattern, count) rows, where the *pattern* is the set of 1-based feature
//! indices holding value 0 (in the data-quality reading: the constraints an
//! item violates). Two input formats are supported — a count-annotated
//! violation table and raw per-item 0/1 vectors — plus the summary outputs
//! built from them: violation histograms and coverage reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::ratio::Rational;

/// One aggregated row of a sample: a violation pattern and its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRow {
    /// 1-based feature indices with value 0 ("violated"). May be empty.
    pub pattern: BTreeSet<usize>,
    /// Number of items carrying exactly this pattern. Strictly positive.
    pub count: u64,
}

/// A multiset of binary feature vectors with integer multiplicities.
///
/// Invariants (enforced at construction): every pattern index lies in
/// `[1, n_features]`, patterns are pairwise distinct, counts are positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSample {
    n_features: usize,
    rows: Vec<SampleRow>,
    label: String,
}

/// A processing order for features: a bijection on `[1, n_features]`.
#[derive(Debug, Clone)]
pub struct FeatureOrder {
    /// `perm[k-1]` is the feature examined at level `k` of the tree.
    perm: Vec<usize>,
    /// Where the order came from (free text, e.g. "identity").
    pub provenance: String,
}

// Provenance is annotation, not identity: orders compare by permutation.
impl PartialEq for FeatureOrder {
    fn eq(&self, other: &Self) -> bool {
        self.perm == other.perm
    }
}

impl Eq for FeatureOrder {}

/// A non-fatal problem noticed while parsing (the row was still usable).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    /// 1-based line number in the input text.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// A parsed violation table: the sample plus any per-row warnings.
#[derive(Debug, Clone)]
pub struct ParsedTable {
    pub sample: FeatureSample,
    pub warnings: Vec<ParseWarning>,
}

/// Errors from parsing or combining samples.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum IngestError {
    #[error("line {line}: malformed count `{text}` (need a positive integer)")]
    MalformedCount { line: usize, text: String },
    #[error("line {line}: malformed pattern `{text}`")]
    MalformedPattern { line: usize, text: String },
    #[error("line {line}: feature index {index} out of range [1, {n_features}]")]
    IndexOutOfRange { line: usize, index: usize, n_features: usize },
    #[error("line {line}: duplicate pattern {pattern:?} (rows must be distinct)")]
    DuplicatePattern { line: usize, pattern: Vec<usize> },
    #[error("line {line}: expected {expected} fields, got {got}")]
    WrongFieldCount { line: usize, expected: &'static str, got: usize },
    #[error("line {line}: vector length {got} differs from {expected}")]
    RaggedVector { line: usize, expected: usize, got: usize },
    #[error("line {line}: character `{ch}` is not 0 or 1")]
    NotBinary { line: usize, ch: char },
    #[error("input has no data rows")]
    EmptyInput,
    #[error("cannot infer the feature count (no indices and no binary ids)")]
    UnknownWidth,
    #[error("pattern index {index} exceeds n_features = {n_features}")]
    BadPatternIndex { index: usize, n_features: usize },
    #[error("n_features must be positive")]
    ZeroWidth,
    #[error("merge requires at least one sample")]
    NothingToMerge,
    #[error("mismatched n_features: {left} vs {right}")]
    MixedWidths { left: usize, right: usize },
    #[error("reference sample is empty")]
    EmptyReference,
    #[error("order must be a permutation of [1, {n_features}]")]
    NotAPermutation { n_features: usize },
    #[error("coverage must satisfy 0 < c <= 1")]
    CoverageOutOfRange,
}

impl FeatureSample {
    /// Build a sample, checking every invariant.
    pub fn new(
        n_features: usize,
        rows: Vec<SampleRow>,
        label: impl Into<String>,
    ) -> Result<Self, IngestError> {
        if n_features == 0 {
            return Err(IngestError::ZeroWidth);
        }
        let mut seen: BTreeSet<&BTreeSet<usize>> = BTreeSet::new();
        for (i, row) in rows.iter().enumerate() {
            if row.count == 0 {
                return Err(IngestError::MalformedCount { line: i + 1, text: "0".into() });
            }
            for &idx in &row.pattern {
                if idx == 0 || idx > n_features {
                    return Err(IngestError::BadPatternIndex { index: idx, n_features });
                }
            }
            if !seen.insert(&row.pattern) {
                return Err(IngestError::DuplicatePattern {
                    line: i + 1,
                    pattern: row.pattern.iter().copied().collect(),
                });
            }
        }
        Ok(FeatureSample { n_features, rows, label: label.into() })
    }

    /// An empty sample (no rows) over `n_features` features.
    pub fn empty(n_features: usize, label: impl Into<String>) -> Result<Self, IngestError> {
        Self::new(n_features, Vec::new(), label)
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn rows(&self) -> &[SampleRow] {
        &self.rows
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Total item count (sum of row counts).
    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum()
    }

    /// The set of distinct patterns, as owned sorted index vectors.
    pub fn patterns(&self) -> BTreeSet<Vec<usize>> {
        self.rows.iter().map(|r| r.pattern.iter().copied().collect()).collect()
    }

    /// The 0/1 vector of one pattern: character `i` is feature `i+1`'s value.
    pub fn vector_string(&self, pattern: &BTreeSet<usize>) -> String {
        (1..=self.n_features).map(|i| if pattern.contains(&i) { '0' } else { '1' }).collect()
    }

    /// Expand back to one 0/1 line per item (inverse of [`parse_feature_vectors`]).
    pub fn to_vector_lines(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let line = self.vector_string(&row.pattern);
            for _ in 0..row.count {
                out.push_str(&line);
                out.push('\n');
            }
        }
        out
    }

    /// Write the canonical violation-table form: `count,idx1;idx2;...` lines.
    pub fn to_violation_table(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let ids: Vec<String> = row.pattern.iter().map(|i| i.to_string()).collect();
            out.push_str(&format!("{},{}\n", row.count, ids.join(";")));
        }
        out
    }
}

impl FeatureOrder {
    /// Validate that `perm` is a bijection on `[1, len]`.
    pub fn new(perm: Vec<usize>, provenance: impl Into<String>) -> Result<Self, IngestError> {
        let n = perm.len();
        let mut seen = vec![false; n + 1];
        for &p in &perm {
            if p == 0 || p > n || seen[p] {
                return Err(IngestError::NotAPermutation { n_features: n });
            }
            seen[p] = true;
        }
        Ok(FeatureOrder { perm, provenance: provenance.into() })
    }

    /// The order 1, 2, ..., n.
    pub fn identity(n: usize) -> Self {
        FeatureOrder { perm: (1..=n).collect(), provenance: "identity".into() }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// The feature examined at tree level `k` (1-based).
    pub fn feature_at(&self, k: usize) -> usize {
        self.perm[k - 1]
    }

    /// The level (1-based) at which `feature` is examined.
    pub fn position_of(&self, feature: usize) -> usize {
        // Orders are short; a scan keeps the type to one field.
        self.perm.iter().position(|&p| p == feature).expect("feature not in order") + 1
    }
}

/// Parse a count-annotated violation table.
///
/// Lines look like `count,idx1;idx2;...` with an optional third column
/// holding the redundant binary id of the pattern; `#` starts a comment.
/// The feature count is inferred as the largest index or binary-id width
/// seen. When a binary id disagrees with the index list, the list wins and a
/// warning is recorded for the row.
pub fn parse_violation_table(text: &str, label: &str) -> Result<ParsedTable, IngestError> {
    struct RawRow {
        line: usize,
        count: u64,
        pattern: BTreeSet<usize>,
        binary: Option<String>,
    }

    let mut raw: Vec<RawRow> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(IngestError::WrongFieldCount {
                line: lineno,
                expected: "2 or 3",
                got: fields.len(),
            });
        }
        let count: u64 = fields[0]
            .trim()
            .parse()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| IngestError::MalformedCount {
                line: lineno,
                text: fields[0].trim().to_string(),
            })?;
        let mut pattern = BTreeSet::new();
        let list = fields[1].trim();
        if !list.is_empty() {
            for tok in list.split(';') {
                let idx: usize = tok.trim().parse().map_err(|_| IngestError::MalformedPattern {
                    line: lineno,
                    text: list.to_string(),
                })?;
                if idx == 0 {
                    return Err(IngestError::MalformedPattern {
                        line: lineno,
                        text: "index 0 (indices are 1-based)".to_string(),
                    });
                }
                if !pattern.insert(idx) {
                    return Err(IngestError::MalformedPattern {
                        line: lineno,
                        text: format!("repeated index {idx}"),
                    });
                }
            }
        }
        let binary = match fields.get(2) {
            Some(b) if !b.trim().is_empty() => Some(b.trim().to_string()),
            _ => None,
        };
        raw.push(RawRow { line: lineno, count, pattern, binary });
    }
    if raw.is_empty() {
        return Err(IngestError::EmptyInput);
    }

    // Width: the largest index mentioned, or the widest well-formed binary id.
    let mut n_features = 0usize;
    for row in &raw {
        if let Some(&max) = row.pattern.iter().next_back() {
            n_features = n_features.max(max);
        }
        if let Some(b) = &row.binary {
            if b.chars().all(|c| c == '0' || c == '1') {
                n_features = n_features.max(b.len());
            }
        }
    }
    if n_features == 0 {
        return Err(IngestError::UnknownWidth);
    }

    let mut warnings = Vec::new();
    let mut rows = Vec::with_capacity(raw.len());
    for row in &raw {
        if let Some(&max) = row.pattern.iter().next_back() {
            if max > n_features {
                return Err(IngestError::IndexOutOfRange { line: row.line, index: max, n_features });
            }
        }
        if let Some(b) = &row.binary {
            if !b.chars().all(|c| c == '0' || c == '1') {
                warnings.push(ParseWarning {
                    line: row.line,
                    message: format!("binary id `{b}` is not a 0/1 string; index list kept"),
                });
            } else if b.len() != n_features {
                warnings.push(ParseWarning {
                    line: row.line,
                    message: format!(
                        "binary id has length {} (expected {n_features}); index list kept",
                        b.len()
                    ),
                });
            } else {
                let from_binary: BTreeSet<usize> = b
                    .char_indices()
                    .filter(|&(_, c)| c == '0')
                    .map(|(i, _)| i + 1)
                    .collect();
                if from_binary != row.pattern {
                    warnings.push(ParseWarning {
                        line: row.line,
                        message: format!(
                            "binary id decodes to {:?}, index list says {:?}; index list kept",
                            from_binary.iter().collect::<Vec<_>>(),
                            row.pattern.iter().collect::<Vec<_>>()
                        ),
                    });
                }
            }
        }
    }
    for row in raw {
        rows.push(SampleRow { pattern: row.pattern, count: row.count });
    }
    // FeatureSample::new reports duplicates by row position, not input line;
    // re-map to the original line number for a usable message.
    let lines: Vec<usize> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, _)| i + 1)
        .collect();
    let sample = FeatureSample::new(n_features, rows, label).map_err(|e| match e {
        IngestError::DuplicatePattern { line, pattern } => IngestError::DuplicatePattern {
            line: lines.get(line - 1).copied().unwrap_or(line),
            pattern,
        },
        other => other,
    })?;
    Ok(ParsedTable { sample, warnings })
}

/// Parse raw per-item vectors: one {0,1}-string per line, all the same length.
///
/// Identical lines aggregate into a single (pattern, count) row; the pattern
/// holds the positions with character '0'.
pub fn parse_feature_vectors(text: &str, label: &str) -> Result<FeatureSample, IngestError> {
    let mut n_features: Option<usize> = None;
    let mut counts: BTreeMap<BTreeSet<usize>, u64> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match n_features {
            None => n_features = Some(line.len()),
            Some(n) if n != line.len() => {
                return Err(IngestError::RaggedVector { line: lineno, expected: n, got: line.len() })
            }
            _ => {}
        }
        let mut pattern = BTreeSet::new();
        for (i, ch) in line.char_indices() {
            match ch {
                '1' => {}
                '0' => {
                    pattern.insert(i + 1);
                }
                ch => return Err(IngestError::NotBinary { line: lineno, ch }),
            }
        }
        *counts.entry(pattern).or_insert(0) += 1;
    }
    let n_features = n_features.ok_or(IngestError::EmptyInput)?;
    let rows = counts.into_iter().map(|(pattern, count)| SampleRow { pattern, count }).collect();
    FeatureSample::new(n_features, rows, label)
}

/// Order features by descending total violation count, ties by ascending
/// index. The count of feature `i` is the sum of counts of rows whose
/// pattern contains `i`.
pub fn order_features(reference: &FeatureSample) -> Result<FeatureOrder, IngestError> {
    if reference.is_empty() {
        return Err(IngestError::EmptyReference);
    }
    let n = reference.n_features();
    let mut totals = vec![0u64; n + 1];
    for row in reference.rows() {
        for &i in &row.pattern {
            totals[i] += row.count;
        }
    }
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.sort_by_key(|&i| (std::cmp::Reverse(totals[i]), i));
    FeatureOrder::new(perm, format!("descending violations of {}", reference.label()))
}

/// Merge samples by summing the counts of identical patterns.
pub fn merge_samples(samples: &[FeatureSample]) -> Result<FeatureSample, IngestError> {
    let first = samples.first().ok_or(IngestError::NothingToMerge)?;
    let n = first.n_features();
    let mut counts: BTreeMap<BTreeSet<usize>, u64> = BTreeMap::new();
    for s in samples {
        if s.n_features() != n {
            return Err(IngestError::MixedWidths { left: n, right: s.n_features() });
        }
        for row in s.rows() {
            *counts.entry(row.pattern.clone()).or_insert(0) += row.count;
        }
    }
    let label = samples.iter().map(FeatureSample::label).collect::<Vec<_>>().join("+");
    let rows = counts.into_iter().map(|(pattern, count)| SampleRow { pattern, count }).collect();
    FeatureSample::new(n, rows, label)
}

/// Histogram of total count by pattern cardinality. Only observed
/// cardinalities appear; see [`histogram_row`] for a padded view.
pub fn violation_histogram(sample: &FeatureSample) -> BTreeMap<usize, u64> {
    let mut bins = BTreeMap::new();
    for row in sample.rows() {
        *bins.entry(row.pattern.len()).or_insert(0) += row.count;
    }
    bins
}

/// The histogram as a fixed-width row over bins `1..=max_k` (absent bins 0).
pub fn histogram_row(sample: &FeatureSample, max_k: usize) -> Vec<u64> {
    let bins = violation_histogram(sample);
    (1..=max_k).map(|k| bins.get(&k).copied().unwrap_or(0)).collect()
}

/// One line of a coverage report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub pattern: BTreeSet<usize>,
    pub count: u64,
    /// `round(100 * count / total)`, half away from zero.
    pub percent: u32,
}

/// The most frequent patterns covering at least `coverage` of the total.
///
/// Rows are sorted by descending count (ties by ascending pattern); the
/// result is the shortest prefix whose cumulative count reaches
/// `coverage * total`.
pub fn top_pattern_report(
    sample: &FeatureSample,
    coverage: &Rational,
) -> Result<Vec<ReportRow>, IngestError> {
    use num_traits::Zero;
    let zero = Rational::zero();
    let one = Rational::from_integer(BigInt::from(1));
    if *coverage <= zero || *coverage > one {
        return Err(IngestError::CoverageOutOfRange);
    }
    let total = sample.total();
    if total == 0 {
        return Ok(Vec::new());
    }
    let mut rows: Vec<&SampleRow> = sample.rows().iter().collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.pattern.cmp(&b.pattern)));
    let mut out = Vec::new();
    let mut cumulative: u64 = 0;
    let threshold_num = coverage.numer() * BigInt::from(total);
    for row in rows {
        cumulative += row.count;
        out.push(ReportRow {
            pattern: row.pattern.clone(),
            count: row.count,
            percent: percent_of(row.count, total),
        });
        if BigInt::from(cumulative) * coverage.denom() >= threshold_num {
            break;
        }
    }
    Ok(out)
}

/// `round(100 * count / total)`, rounding half away from zero.
pub fn percent_of(count: u64, total: u64) -> u32 {
    debug_assert!(total > 0);
    ((200 * count as u128 + total as u128) / (2 * total as u128)) as u32
}
