//! Sparse dyadic measure trees and the product-coefficient representation.
//!
//! A sample over `n` binary features induces a counting measure on the leaves
//! of a depth-`n` binary tree: level `k` splits on the `k`-th feature of the
//! chosen order, bit 0 to the left (a violated constraint walks left). Each
//! node stores its exact rational mass and its *product coefficient*
//!
//! ```text
//! a = (mass(left) - mass(right)) / mass(node)      (0 on zero-mass nodes)
//! ```
//!
//! The measure factors through the edge weights `(1 + a)/2` (left) and
//! `(1 - a)/2` (right), so the mass of any node is the total mass times the
//! product of edge factors along its path; [`product_formula_eval`] computes
//! it that way and [`reconstruct_tree`] rebuilds a whole tree from nothing
//! but coefficients and total mass. Only nodes with nonzero mass are stored:
//! an absent path has mass 0 and coefficient 0 by convention.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratio::{parse_rational, rat_int, Rational};
use crate::sample::{FeatureOrder, FeatureSample};

/// A root-to-node path in the binary tree: a finite bit sequence.
///
/// The empty path is the root. Paths order lexicographically ("0" < "00" <
/// "01" < "1"), which matches the string form used in dump files.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DyadicPath {
    bits: Vec<u8>,
}

impl DyadicPath {
    /// The empty path (the root, level 0).
    pub fn root() -> Self {
        DyadicPath { bits: Vec::new() }
    }

    /// Build from a slice of bits; anything but 0/1 is rejected.
    pub fn from_bits(bits: &[u8]) -> Result<Self, MeasureError> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(MeasureError::BadBit(b));
        }
        Ok(DyadicPath { bits: bits.to_vec() })
    }

    /// Parse a string of '0'/'1' characters ("" is the root).
    pub fn parse(s: &str) -> Result<Self, MeasureError> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => return Err(MeasureError::BadPathChar(ch)),
            }
        }
        Ok(DyadicPath { bits })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// The node's level (= number of bits).
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_root(&self) -> bool {
        self.bits.is_empty()
    }

    /// The bit at 1-based position `k`.
    pub fn bit(&self, k: usize) -> u8 {
        self.bits[k - 1]
    }

    /// The child reached by `bit` (0 = left, 1 = right).
    pub fn child(&self, bit: u8) -> Self {
        debug_assert!(bit <= 1);
        let mut bits = self.bits.clone();
        bits.push(bit);
        DyadicPath { bits }
    }

    /// The parent path, or `None` at the root.
    pub fn parent(&self) -> Option<Self> {
        if self.bits.is_empty() {
            None
        } else {
            Some(DyadicPath { bits: self.bits[..self.bits.len() - 1].to_vec() })
        }
    }

    /// Does `self` start with `prefix`?
    pub fn starts_with(&self, prefix: &DyadicPath) -> bool {
        self.bits.len() >= prefix.bits.len() && self.bits[..prefix.bits.len()] == prefix.bits[..]
    }
}

impl fmt::Display for DyadicPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// The dyadic interval `[i/2^j, (i+1)/2^j)` of a path: returns `(i, 2^j)`
/// with `j` the path length and `i` the path bits read as a binary integer.
pub fn unit_interval_embedding(path: &DyadicPath) -> (BigUint, BigUint) {
    let mut i = BigUint::zero();
    for &b in path.bits() {
        i = (i << 1) + BigUint::from(b);
    }
    (i, BigUint::one() << path.len())
}

/// Mass and product coefficient of one stored node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeData {
    pub mass: Rational,
    pub coeff: Rational,
}

/// A sparse dyadic measure tree: stored nodes all carry nonzero mass.
#[derive(Debug, Clone)]
pub struct DyadicMeasureTree {
    maxscale: usize,
    order: FeatureOrder,
    label: String,
    nodes: BTreeMap<DyadicPath, NodeData>,
    total: Rational,
}

/// A Haar-like function attached to a node: +1 on the left-child subtree,
/// −1 on the right-child subtree, 0 outside the node's subtree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaarFunction {
    pub node: DyadicPath,
}

impl HaarFunction {
    /// Evaluate at a point (a path strictly deeper than the node).
    pub fn value(&self, point: &DyadicPath) -> Result<i8, MeasureError> {
        if point.len() < self.node.len() + 1 {
            return Err(MeasureError::PointTooShort {
                point: point.len(),
                need: self.node.len() + 1,
            });
        }
        if !point.starts_with(&self.node) {
            return Ok(0);
        }
        Ok(if point.bit(self.node.len() + 1) == 0 { 1 } else { -1 })
    }
}

/// Errors from building, evaluating, or serializing measure trees.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error("path bit {0} is not 0 or 1")]
    BadBit(u8),
    #[error("path character `{0}` is not 0 or 1")]
    BadPathChar(char),
    #[error("order has {order_len} entries but the sample has {n_features} features")]
    MismatchedOrder { order_len: usize, n_features: usize },
    #[error("maxscale must be positive")]
    ZeroMaxscale,
    #[error("scale {scale} out of range [0, {maxscale}]")]
    ScaleOutOfRange { scale: usize, maxscale: usize },
    #[error("path of length {path} exceeds maxscale {maxscale}")]
    PathTooLong { path: usize, maxscale: usize },
    #[error("point at level {point} is shorter than node level + 1 = {need}")]
    PointTooShort { point: usize, need: usize },
    #[error("leaf path `{0}` has length {1}, expected maxscale {2}")]
    WrongLeafLength(String, usize, usize),
    #[error("negative mass at `{0}`")]
    NegativeMass(String),
    #[error("coefficient at `{0}` lies outside [-1, 1]")]
    CoefficientOutOfRange(String),
    #[error("negative total mass")]
    NegativeTotal,
    #[error("node `{0}` has zero mass")]
    ZeroMassNode(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("dump is not valid JSON: {0}")]
    DumpSyntax(String),
    #[error("dump field `{field}`: {problem}")]
    DumpValue { field: String, problem: String },
}

impl DyadicMeasureTree {
    pub fn maxscale(&self) -> usize {
        self.maxscale
    }

    pub fn order(&self) -> &FeatureOrder {
        &self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Total mass (= root mass; 0 for the empty measure).
    pub fn total(&self) -> &Rational {
        &self.total
    }

    /// All stored nodes, keyed by path in lexicographic order.
    pub fn nodes(&self) -> &BTreeMap<DyadicPath, NodeData> {
        &self.nodes
    }

    /// Mass of an arbitrary path (0 when the node is not stored).
    pub fn mass(&self, path: &DyadicPath) -> Rational {
        self.nodes.get(path).map_or_else(Rational::zero, |n| n.mass.clone())
    }

    /// Product coefficient of an arbitrary path (0 when not stored).
    pub fn coeff(&self, path: &DyadicPath) -> Rational {
        self.nodes.get(path).map_or_else(Rational::zero, |n| n.coeff.clone())
    }

    /// The product coefficients of all stored non-leaf nodes.
    pub fn coefficients(&self) -> BTreeMap<DyadicPath, Rational> {
        self.nodes
            .iter()
            .filter(|(p, _)| p.len() < self.maxscale)
            .map(|(p, n)| (p.clone(), n.coeff.clone()))
            .collect()
    }

    /// The leaf masses (level-`maxscale` stored nodes).
    pub fn leaves(&self) -> BTreeMap<DyadicPath, Rational> {
        self.nodes
            .iter()
            .filter(|(p, _)| p.len() == self.maxscale)
            .map(|(p, n)| (p.clone(), n.mass.clone()))
            .collect()
    }
}

/// Build the measure tree of a sample under a feature order.
///
/// The leaf of a pattern has bit 0 at level `k` exactly when the pattern
/// contains the feature examined at level `k`.
pub fn build_tree(
    sample: &FeatureSample,
    order: &FeatureOrder,
) -> Result<DyadicMeasureTree, MeasureError> {
    if order.len() != sample.n_features() {
        return Err(MeasureError::MismatchedOrder {
            order_len: order.len(),
            n_features: sample.n_features(),
        });
    }
    let maxscale = sample.n_features();
    let mut leaves: BTreeMap<DyadicPath, Rational> = BTreeMap::new();
    for row in sample.rows() {
        let bits: Vec<u8> = (1..=maxscale)
            .map(|k| if row.pattern.contains(&order.feature_at(k)) { 0 } else { 1 })
            .collect();
        let path = DyadicPath { bits };
        // Distinct patterns map to distinct leaves, but only under injective
        // orders — which FeatureOrder guarantees — so plain insert is safe.
        leaves.insert(path, rat_int(row.count as i64));
    }
    build_from_leaves(leaves, maxscale, order.clone(), sample.label())
}

/// Build a tree directly from a map of leaf masses (paths of full length).
///
/// Zero masses are dropped (sparsity); negative masses are an error.
pub fn build_from_leaves(
    leaves: BTreeMap<DyadicPath, Rational>,
    maxscale: usize,
    order: FeatureOrder,
    label: impl Into<String>,
) -> Result<DyadicMeasureTree, MeasureError> {
    if maxscale == 0 {
        return Err(MeasureError::ZeroMaxscale);
    }
    let mut nodes: BTreeMap<DyadicPath, NodeData> = BTreeMap::new();
    let zero = Rational::zero();
    let mut total = Rational::zero();
    for (path, mass) in leaves {
        if path.len() != maxscale {
            return Err(MeasureError::WrongLeafLength(path.to_string(), path.len(), maxscale));
        }
        if mass.is_negative() {
            return Err(MeasureError::NegativeMass(path.to_string()));
        }
        if mass == zero {
            continue;
        }
        total += &mass;
        // Add the leaf mass to the leaf and every ancestor.
        let mut cursor = Some(path);
        while let Some(p) = cursor {
            let parent = p.parent();
            let entry = nodes
                .entry(p)
                .or_insert_with(|| NodeData { mass: Rational::zero(), coeff: Rational::zero() });
            entry.mass += &mass;
            cursor = parent;
        }
    }
    // Coefficients: normalized left/right imbalance at each stored non-leaf.
    let paths: Vec<DyadicPath> = nodes.keys().cloned().collect();
    for p in paths {
        if p.len() == maxscale {
            continue;
        }
        let left = nodes.get(&p.child(0)).map_or_else(Rational::zero, |n| n.mass.clone());
        let right = nodes.get(&p.child(1)).map_or_else(Rational::zero, |n| n.mass.clone());
        let mass = nodes[&p].mass.clone();
        nodes.get_mut(&p).unwrap().coeff = (left - right) / mass;
    }
    Ok(DyadicMeasureTree { maxscale, order, label: label.into(), nodes, total })
}

/// Evaluate the product formula at a path: total mass times the edge factors
/// `(1 + a)/2` (0-step) or `(1 - a)/2` (1-step) of the ancestors walked
/// through. Equals the stored mass exactly.
pub fn product_formula_eval(
    tree: &DyadicMeasureTree,
    path: &DyadicPath,
) -> Result<Rational, MeasureError> {
    if path.len() > tree.maxscale {
        return Err(MeasureError::PathTooLong { path: path.len(), maxscale: tree.maxscale });
    }
    let one = Rational::one();
    let two = rat_int(2);
    let mut mass = tree.total.clone();
    let mut node = DyadicPath::root();
    for k in 1..=path.len() {
        let a = tree.coeff(&node);
        let factor = match path.bit(k) {
            0 => (&one + &a) / &two,
            _ => (&one - &a) / &two,
        };
        mass *= factor;
        node = node.child(path.bit(k));
    }
    Ok(mass)
}

/// Rebuild a tree from product coefficients and a total mass.
///
/// Masses are defined top-down by the edge factors; nodes that come out with
/// zero mass are not stored (so supplied coefficients at such paths are
/// ignored — the zero-mass convention fixes them at 0). The feature order of
/// the result is the identity.
pub fn reconstruct_tree(
    coeffs: &BTreeMap<DyadicPath, Rational>,
    total: &Rational,
    maxscale: usize,
) -> Result<DyadicMeasureTree, MeasureError> {
    if maxscale == 0 {
        return Err(MeasureError::ZeroMaxscale);
    }
    if total.is_negative() {
        return Err(MeasureError::NegativeTotal);
    }
    let one = Rational::one();
    for (path, a) in coeffs {
        if a.abs() > one {
            return Err(MeasureError::CoefficientOutOfRange(path.to_string()));
        }
    }
    let mut nodes: BTreeMap<DyadicPath, NodeData> = BTreeMap::new();
    let zero = Rational::zero();
    let two = rat_int(2);
    if *total != zero {
        // Depth-first expansion of the nonzero-mass part of the tree.
        let mut stack = vec![(DyadicPath::root(), total.clone())];
        while let Some((path, mass)) = stack.pop() {
            if path.len() < maxscale {
                let a = coeffs.get(&path).cloned().unwrap_or_else(Rational::zero);
                let left = &mass * (&one + &a) / &two;
                let right = &mass * (&one - &a) / &two;
                if left != zero {
                    stack.push((path.child(0), left));
                }
                if right != zero {
                    stack.push((path.child(1), right));
                }
                nodes.insert(path, NodeData { mass, coeff: a });
            } else {
                nodes.insert(path, NodeData { mass, coeff: Rational::zero() });
            }
        }
    }
    Ok(DyadicMeasureTree {
        maxscale,
        order: FeatureOrder::identity(maxscale),
        label: "reconstructed".into(),
        nodes,
        total: total.clone(),
    })
}

/// All stored (nonzero-mass) paths at one scale.
pub fn support(
    tree: &DyadicMeasureTree,
    scale: usize,
) -> Result<BTreeSet<DyadicPath>, MeasureError> {
    if scale > tree.maxscale {
        return Err(MeasureError::ScaleOutOfRange { scale, maxscale: tree.maxscale });
    }
    Ok(tree.nodes.keys().filter(|p| p.len() == scale).cloned().collect())
}

/// The skew of a node as a difference of conditional probabilities:
/// `Pr(left | node) - Pr(right | node)`. Verified against the stored
/// coefficient before returning.
pub fn conditional_skew(
    tree: &DyadicMeasureTree,
    node: &DyadicPath,
) -> Result<Rational, MeasureError> {
    let mass = tree.mass(node);
    if mass == Rational::zero() {
        return Err(MeasureError::ZeroMassNode(node.to_string()));
    }
    let skew = (tree.mass(&node.child(0)) - tree.mass(&node.child(1))) / &mass;
    let stored = tree.coeff(node);
    if skew != stored {
        return Err(MeasureError::Inconsistent(format!(
            "skew {} != stored coefficient {} at `{}`",
            skew, stored, node
        )));
    }
    Ok(skew)
}

// --- coefficient dump ----------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DumpNode {
    mass: String,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct DumpFile {
    label: String,
    maxscale: usize,
    total: String,
    feature_order: Vec<usize>,
    nodes: BTreeMap<String, DumpNode>,
}

fn dump_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Serialize a tree as the JSON coefficient dump: metadata plus one entry
/// per stored node, paths sorted lexicographically, rationals as `p/q`.
pub fn write_coefficient_dump(tree: &DyadicMeasureTree) -> String {
    let file = DumpFile {
        label: tree.label().to_string(),
        maxscale: tree.maxscale(),
        total: dump_rational(tree.total()),
        feature_order: tree.order().perm().to_vec(),
        nodes: tree
            .nodes()
            .iter()
            .map(|(p, n)| {
                (p.to_string(), DumpNode {
                    mass: dump_rational(&n.mass),
                    coeff: dump_rational(&n.coeff),
                })
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("dump serialization cannot fail");
    out.push('\n');
    out
}

/// Parse a coefficient dump back into a tree (inverse of
/// [`write_coefficient_dump`]). The tree is rebuilt from the leaf masses and
/// verified against the dumped interior values.
pub fn parse_coefficient_dump(text: &str) -> Result<DyadicMeasureTree, MeasureError> {
    let file: DumpFile =
        serde_json::from_str(text).map_err(|e| MeasureError::DumpSyntax(e.to_string()))?;
    let total = parse_rational(&file.total).map_err(|e| MeasureError::DumpValue {
        field: "total".into(),
        problem: e.to_string(),
    })?;
    let order = FeatureOrder::new(file.feature_order.clone(), "from dump").map_err(|e| {
        MeasureError::DumpValue { field: "feature_order".into(), problem: e.to_string() }
    })?;
    let mut leaves = BTreeMap::new();
    for (path, node) in &file.nodes {
        let p = DyadicPath::parse(path)?;
        if p.len() == file.maxscale {
            let mass = parse_rational(&node.mass).map_err(|e| MeasureError::DumpValue {
                field: format!("nodes.{path}.mass"),
                problem: e.to_string(),
            })?;
            leaves.insert(p, mass);
        }
    }
    let tree = build_from_leaves(leaves, file.maxscale, order, file.label.clone())?;
    // The interior of a dump is redundant; trust nothing, check everything.
    if *tree.total() != total {
        return Err(MeasureError::Inconsistent(format!(
            "dump total {} != sum of leaf masses {}",
            file.total,
            dump_rational(tree.total())
        )));
    }
    for (path, node) in &file.nodes {
        let p = DyadicPath::parse(path)?;
        let mass = parse_rational(&node.mass).map_err(|e| MeasureError::DumpValue {
            field: format!("nodes.{path}.mass"),
            problem: e.to_string(),
        })?;
        let coeff = parse_rational(&node.coeff).map_err(|e| MeasureError::DumpValue {
            field: format!("nodes.{path}.coeff"),
            problem: e.to_string(),
        })?;
        if tree.mass(&p) != mass || tree.coeff(&p) != coeff {
            return Err(MeasureError::Inconsistent(format!(
                "dumped node `{path}` disagrees with the tree rebuilt from its leaves"
            )));
        }
    }
    if file.nodes.len() != tree.nodes().len() {
        return Err(MeasureError::Inconsistent(
            "dump stores a different node set than the rebuilt tree".into(),
        ));
    }
    Ok(tree)
}
