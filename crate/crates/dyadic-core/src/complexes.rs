//! Nerve-style simplicial complexes of a measure's support.
//!
//! The leaves of a measure tree record which feature/value combinations
//! actually occur. Three complexes summarize that support:
//!
//! - `N`: vertices are (feature, bit) pairs; each support leaf contributes
//!   the face of all its assignments.
//! - `N₀`: vertices are the features taking value 0 somewhere; each leaf
//!   contributes the set of features at 0 on its path.
//! - `N₁`: the mirror with value 1.
//!
//! Every subset of an occurring combination also occurs (measure
//! monotonicity), so each complex is determined by the *maximal* candidate
//! faces; a [`MaximalFaceSet`] stores exactly those, and full closures are
//! materialized only for homology.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::measure::{support, DyadicMeasureTree};

/// A face: a nonempty, strictly ascending tuple of integer vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    vertices: Vec<usize>,
}

/// Errors from face or complex construction.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("a face must have at least one vertex")]
    EmptyFace,
    #[error("face vertices must be strictly ascending (got {0:?})")]
    NotAscending(Vec<usize>),
    #[error("line {line}: `{text}` is not a space-separated list of integers")]
    BadFaceLine { line: usize, text: String },
    #[error("the measure is empty (total mass 0)")]
    EmptyMeasure,
}

impl Face {
    /// Build a face, requiring strictly ascending vertices.
    pub fn new(vertices: Vec<usize>) -> Result<Self, ComplexError> {
        if vertices.is_empty() {
            return Err(ComplexError::EmptyFace);
        }
        if !vertices.windows(2).all(|w| w[0] < w[1]) {
            return Err(ComplexError::NotAscending(vertices));
        }
        Ok(Face { vertices })
    }

    /// Build a face from any collection of vertices (sorted, deduplicated).
    pub fn from_set(vertices: impl IntoIterator<Item = usize>) -> Result<Self, ComplexError> {
        let set: BTreeSet<usize> = vertices.into_iter().collect();
        Face::new(set.into_iter().collect())
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Number of vertices (dimension + 1).
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: faces are nonempty
    }

    /// The face's dimension (vertices − 1).
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Is `self` a (non-strict) subset of `other`?
    pub fn subset_of(&self, other: &Face) -> bool {
        // Both sides are ascending; a linear merge-scan suffices.
        let mut it = other.vertices.iter();
        'outer: for v in &self.vertices {
            for w in it.by_ref() {
                if w == v {
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// The subface omitting the `k`-th smallest vertex (0-based).
    pub fn omit(&self, k: usize) -> Option<Face> {
        if self.vertices.len() <= 1 {
            return None;
        }
        let mut v = self.vertices.clone();
        v.remove(k);
        Some(Face { vertices: v })
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.vertices {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// An antichain of faces: no member contains another. Determines a
/// simplicial complex as the union of its members' power sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalFaceSet {
    faces: BTreeSet<Face>,
}

impl MaximalFaceSet {
    /// The empty complex.
    pub fn empty() -> Self {
        MaximalFaceSet { faces: BTreeSet::new() }
    }

    pub fn faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter()
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// All vertices appearing in some face.
    pub fn vertex_set(&self) -> BTreeSet<usize> {
        self.faces.iter().flat_map(|f| f.vertices().iter().copied()).collect()
    }

    /// Serialize as the face-list file format: one face per line, ascending
    /// space-separated vertices, lines sorted lexicographically.
    pub fn to_face_lines(&self) -> String {
        // BTreeSet<Face> already iterates in lexicographic vertex order.
        let mut out = String::new();
        for face in &self.faces {
            out.push_str(&face.to_string());
            out.push('\n');
        }
        out
    }

    /// Parse a face-list file: one face per line, space-separated integers;
    /// `#` starts a comment. Faces are maximalized.
    pub fn parse_face_lines(text: &str) -> Result<Self, ComplexError> {
        let mut faces = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vertices: Result<Vec<usize>, _> =
                line.split_whitespace().map(str::parse).collect();
            match vertices {
                Ok(v) => faces.push(Face::from_set(v)?),
                Err(_) => {
                    return Err(ComplexError::BadFaceLine {
                        line: lineno + 1,
                        text: line.to_string(),
                    })
                }
            }
        }
        Ok(maximalize(faces))
    }
}

/// Reduce a family of faces to its maximal members (subset-maximal
/// antichain). The union of closures is unchanged.
pub fn maximalize(faces: impl IntoIterator<Item = Face>) -> MaximalFaceSet {
    let distinct: BTreeSet<Face> = faces.into_iter().collect();
    let keep: BTreeSet<Face> = distinct
        .iter()
        .filter(|f| !distinct.iter().any(|g| g.len() > f.len() && f.subset_of(g)))
        .cloned()
        .collect();
    MaximalFaceSet { faces: keep }
}

/// Candidate faces, one per support leaf, mapped by `project` (returning the
/// face's vertex set; empty candidates are dropped).
fn leaf_candidates(
    tree: &DyadicMeasureTree,
    project: impl Fn(&[u8]) -> Vec<usize>,
) -> Result<Vec<Face>, ComplexError> {
    use num_traits::Zero;
    if tree.total().is_zero() {
        return Err(ComplexError::EmptyMeasure);
    }
    let leaves = support(tree, tree.maxscale()).expect("maxscale is always a valid scale");
    let mut faces = Vec::new();
    for leaf in leaves {
        let vertices = project(leaf.bits());
        if !vertices.is_empty() {
            faces.push(Face::from_set(vertices)?);
        }
    }
    Ok(faces)
}

/// Serialize a (feature, bit) vertex as an integer: `2 * feature - 1 + bit`.
/// Odd numbers are value-0 vertices, even numbers value-1, and the ordering
/// of pairs (feature, then bit) is preserved.
pub fn pair_vertex(feature: usize, bit: u8) -> usize {
    2 * feature - 1 + bit as usize
}

/// Decode [`pair_vertex`]: the (feature, bit) behind an integer vertex.
pub fn vertex_pair(vertex: usize) -> (usize, u8) {
    if vertex % 2 == 1 {
        (vertex.div_ceil(2), 0)
    } else {
        (vertex / 2, 1)
    }
}

/// The full nerve `N`: one candidate face per support leaf, containing the
/// pair vertex of every (feature, observed bit) on that leaf's path.
///
/// All candidates have exactly `maxscale` vertices, so distinct candidates
/// are automatically incomparable.
pub fn nerve_pairs(tree: &DyadicMeasureTree) -> Result<MaximalFaceSet, ComplexError> {
    let order = tree.order().clone();
    let candidates = leaf_candidates(tree, move |bits| {
        bits.iter()
            .enumerate()
            .map(|(i, &b)| pair_vertex(order.feature_at(i + 1), b))
            .collect()
    })?;
    Ok(maximalize(candidates))
}

/// The zero-nerve `N₀`: each support leaf contributes the set of features
/// taking value 0 on it (its violation pattern). Leaves with no zeros
/// contribute nothing; all mass on the all-1 leaf yields the empty complex.
pub fn nerve_zero(tree: &DyadicMeasureTree) -> Result<MaximalFaceSet, ComplexError> {
    nerve_bit(tree, 0)
}

/// The one-nerve `N₁`: mirror of [`nerve_zero`] for value 1.
pub fn nerve_one(tree: &DyadicMeasureTree) -> Result<MaximalFaceSet, ComplexError> {
    nerve_bit(tree, 1)
}

fn nerve_bit(tree: &DyadicMeasureTree, bit: u8) -> Result<MaximalFaceSet, ComplexError> {
    let order = tree.order().clone();
    let candidates = leaf_candidates(tree, move |bits| {
        bits.iter()
            .enumerate()
            .filter(|&(_, &b)| b == bit)
            .map(|(i, _)| order.feature_at(i + 1))
            .collect()
    })?;
    Ok(maximalize(candidates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{betti_numbers, closure};
    use crate::measure::build_tree;
    use crate::sample::{parse_feature_vectors, FeatureOrder};
    use crate::testutil::{sample_of, toy_tree};

    fn face(v: &[usize]) -> Face {
        Face::new(v.to_vec()).unwrap()
    }

    #[test]
    fn face_validation() {
        assert!(Face::new(vec![]).is_err());
        assert!(Face::new(vec![2, 1]).is_err());
        assert!(Face::new(vec![1, 1]).is_err());
        assert_eq!(Face::from_set([3, 1, 3]).unwrap(), face(&[1, 3]));
    }

    #[test]
    fn subset_scan() {
        assert!(face(&[2, 5]).subset_of(&face(&[1, 2, 5, 9])));
        assert!(!face(&[2, 6]).subset_of(&face(&[1, 2, 5, 9])));
        assert!(face(&[4]).subset_of(&face(&[4])));
    }

    #[test]
    fn maximalize_drops_contained_faces() {
        let out = maximalize([face(&[1]), face(&[1, 2])]);
        assert_eq!(out.faces().cloned().collect::<Vec<_>>(), vec![face(&[1, 2])]);

        let out = maximalize([face(&[1, 2]), face(&[3, 4])]);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn maximalize_deduplicates() {
        let out = maximalize([face(&[1, 2]), face(&[1, 2])]);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn pair_vertex_round_trip_and_order() {
        assert_eq!(pair_vertex(1, 0), 1);
        assert_eq!(pair_vertex(1, 1), 2);
        assert_eq!(pair_vertex(2, 0), 3);
        for v in 1..=20 {
            let (f, b) = vertex_pair(v);
            assert_eq!(pair_vertex(f, b), v);
        }
    }

    #[test]
    fn toy_nerve_pairs_has_four_leaf_faces() {
        let n = nerve_pairs(&toy_tree()).unwrap();
        let expect: BTreeSet<Face> = [
            face(&[pair_vertex(1, 0), pair_vertex(2, 0)]),
            face(&[pair_vertex(1, 0), pair_vertex(2, 1)]),
            face(&[pair_vertex(1, 1), pair_vertex(2, 0)]),
            face(&[pair_vertex(1, 1), pair_vertex(2, 1)]),
        ]
        .into_iter()
        .collect();
        assert_eq!(n.faces().cloned().collect::<BTreeSet<_>>(), expect);
    }

    #[test]
    fn single_leaf_measure_gives_one_pair_face() {
        let s = sample_of(2, &[(&[1, 2], 5)]);
        let tree = build_tree(&s, &FeatureOrder::identity(2)).unwrap();
        let n = nerve_pairs(&tree).unwrap();
        assert_eq!(
            n.faces().cloned().collect::<Vec<_>>(),
            vec![face(&[pair_vertex(1, 0), pair_vertex(2, 0)])]
        );
    }

    #[test]
    fn textbook_nerve_of_three_sets() {
        // Sets S1 = {a,b,c}, S2 = {b,c,d}, S3 = {a,e} as five items with three
        // membership features (value 0 = member). The nerve of the sets is the
        // closure of N0's maximal faces.
        let text = "010\n001\n001\n101\n110";
        let s = parse_feature_vectors(text, "sets").unwrap();
        let tree = build_tree(&s, &FeatureOrder::identity(3)).unwrap();
        let n0 = nerve_zero(&tree).unwrap();
        let complex = closure(&n0);
        let all: BTreeSet<Face> = complex.faces().cloned().collect();
        let expect: BTreeSet<Face> =
            [face(&[1]), face(&[2]), face(&[3]), face(&[1, 2]), face(&[1, 3])]
                .into_iter()
                .collect();
        assert_eq!(all, expect);
    }

    #[test]
    fn toy_nerve_zero_and_one() {
        let tree = toy_tree();
        let n0 = nerve_zero(&tree).unwrap();
        assert_eq!(n0.faces().cloned().collect::<Vec<_>>(), vec![face(&[1, 2])]);
        let n1 = nerve_one(&tree).unwrap();
        assert_eq!(n1.faces().cloned().collect::<Vec<_>>(), vec![face(&[1, 2])]);
    }

    #[test]
    fn all_ones_mass_gives_empty_zero_nerve() {
        let s = sample_of(2, &[(&[], 7)]);
        let tree = build_tree(&s, &FeatureOrder::identity(2)).unwrap();
        assert!(nerve_zero(&tree).unwrap().is_empty());
        // ... and the mirror statement for N1.
        let s = sample_of(2, &[(&[1, 2], 7)]);
        let tree = build_tree(&s, &FeatureOrder::identity(2)).unwrap();
        assert!(nerve_one(&tree).unwrap().is_empty());
    }

    #[test]
    fn bit_flipped_sample_swaps_the_nerves() {
        let s = sample_of(3, &[(&[1], 2), (&[2, 3], 1), (&[1, 3], 4)]);
        let flipped = sample_of(3, &[(&[2, 3], 2), (&[1], 1), (&[2], 4)]);
        let t = build_tree(&s, &FeatureOrder::identity(3)).unwrap();
        let tf = build_tree(&flipped, &FeatureOrder::identity(3)).unwrap();
        assert_eq!(nerve_one(&tf).unwrap(), nerve_zero(&t).unwrap());
        assert_eq!(nerve_zero(&tf).unwrap(), nerve_one(&t).unwrap());
    }

    #[test]
    fn empty_measure_is_an_error() {
        use crate::ratio::rat_int;
        let tree =
            crate::measure::reconstruct_tree(&std::collections::BTreeMap::new(), &rat_int(0), 2)
                .unwrap();
        assert_eq!(nerve_zero(&tree), Err(ComplexError::EmptyMeasure));
    }

    #[test]
    fn nerves_ignore_the_feature_order() {
        // The same sample under two orders yields identical complexes.
        let s = sample_of(3, &[(&[1], 2), (&[2, 3], 1), (&[1, 3], 4), (&[], 1)]);
        let id = build_tree(&s, &FeatureOrder::identity(3)).unwrap();
        let other =
            build_tree(&s, &FeatureOrder::new(vec![3, 1, 2], "shuffled").unwrap()).unwrap();
        assert_eq!(nerve_zero(&id).unwrap(), nerve_zero(&other).unwrap());
        assert_eq!(nerve_one(&id).unwrap(), nerve_one(&other).unwrap());
        assert_eq!(nerve_pairs(&id).unwrap(), nerve_pairs(&other).unwrap());
    }

    #[test]
    fn positive_rescaling_preserves_all_complexes() {
        use crate::measure::build_from_leaves;
        use crate::ratio::rat;
        let tree = toy_tree();
        let scaled: std::collections::BTreeMap<_, _> = tree
            .leaves()
            .into_iter()
            .enumerate()
            .map(|(i, (p, m))| (p, m * rat(2 * i as i64 + 1, 7)))
            .collect();
        let scaled_tree =
            build_from_leaves(scaled, tree.maxscale(), tree.order().clone(), "scaled").unwrap();
        assert_eq!(nerve_zero(&tree).unwrap(), nerve_zero(&scaled_tree).unwrap());
        assert_eq!(nerve_one(&tree).unwrap(), nerve_one(&scaled_tree).unwrap());
        assert_eq!(nerve_pairs(&tree).unwrap(), nerve_pairs(&scaled_tree).unwrap());
    }

    #[test]
    fn face_lines_round_trip_sorted() {
        let set = maximalize([face(&[2, 3]), face(&[1, 5]), face(&[4])]);
        let text = set.to_face_lines();
        assert_eq!(text, "1 5\n2 3\n4\n");
        let back = MaximalFaceSet::parse_face_lines(&text).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn toy_nerve_zero_betti() {
        // Closure of {1,2} is a filled segment: one component, no holes.
        let n0 = nerve_zero(&toy_tree()).unwrap();
        let b = betti_numbers(&closure(&n0));
        assert_eq!(b.betti, vec![1, 0]);
    }
}
