//! Feature permutations acting on dyadic paths, coefficient recomputation,
//! and orbit-averaged invariant measures.
//!
//! A permutation `g` of the feature positions sends the leaf with path
//! `p` to the leaf with path `q`, where `q_{g(i)} = p_i`. Coefficients of
//! the permuted measure are recomputed by exact rebuild from the permuted
//! leaves; the block structure of the rebuild (low levels untouched, deep
//! subtrees moved wholesale) is verified as a postcondition. Averaging the
//! leaf masses over the orbits of a permutation group yields a measure
//! invariant under the whole group.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::measure::{build_from_leaves, DyadicMeasureTree, DyadicPath, MeasureError};
use crate::ratio::{rat_int, Rational};
use crate::sample::{FeatureOrder, FeatureSample, IngestError, SampleRow};

/// Default ceiling on the size of an enumerated permutation group.
pub const DEFAULT_GROUP_BOUND: usize = 10_080;

/// A bijection `g` on the feature positions `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FeaturePermutation {
    /// `mapping[i - 1] = g(i)`.
    mapping: Vec<usize>,
    /// The positions `i` with `g(i) != i`.
    moved: BTreeSet<usize>,
}

/// Errors from permutation parsing and group operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermuteError {
    #[error("mapping of length {len} is not a bijection on 1..={len}")]
    NotABijection { len: usize },
    #[error("cycle notation unreadable at {text:?}")]
    BadCycleNotation { text: String },
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("index {index} appears in two cycles")]
    RepeatedIndex { index: usize },
    #[error("permutation degree {got} does not match {expected} features")]
    DegreeMismatch { got: usize, expected: usize },
    #[error("generated group exceeds the bound of {bound} elements")]
    GroupTooLarge { bound: usize },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

impl FeaturePermutation {
    /// The identity on `1..=n`.
    pub fn identity(n: usize) -> Self {
        FeaturePermutation { mapping: (1..=n).collect(), moved: BTreeSet::new() }
    }

    /// From an explicit mapping `mapping[i - 1] = g(i)`.
    pub fn from_mapping(mapping: Vec<usize>) -> Result<Self, PermuteError> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &v in &mapping {
            if v == 0 || v > n || seen[v - 1] {
                return Err(PermuteError::NotABijection { len: n });
            }
            seen[v - 1] = true;
        }
        let moved = mapping
            .iter()
            .enumerate()
            .filter(|&(i, &v)| v != i + 1)
            .map(|(i, _)| i + 1)
            .collect();
        Ok(FeaturePermutation { mapping, moved })
    }

    /// Parse cycle notation over `1..=n`, e.g. `(1 2)(5 7 9)`. Elements may
    /// be separated by spaces or commas; an empty string or `()` is the
    /// identity; positions not mentioned are fixed.
    pub fn parse(text: &str, n: usize) -> Result<Self, PermuteError> {
        let mut mapping: Vec<usize> = (1..=n).collect();
        let mut used: BTreeSet<usize> = BTreeSet::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(stripped) = rest.strip_prefix('(') else {
                return Err(PermuteError::BadCycleNotation { text: rest.into() });
            };
            let Some(close) = stripped.find(')') else {
                return Err(PermuteError::BadCycleNotation { text: rest.into() });
            };
            let body = &stripped[..close];
            rest = stripped[close + 1..].trim_start();
            let mut cycle = Vec::new();
            for token in body.split(|c: char| c.is_whitespace() || c == ',') {
                if token.is_empty() {
                    continue;
                }
                let index: usize = token
                    .parse()
                    .map_err(|_| PermuteError::BadCycleNotation { text: token.into() })?;
                if index == 0 || index > n {
                    return Err(PermuteError::IndexOutOfRange { index, n });
                }
                if !used.insert(index) {
                    return Err(PermuteError::RepeatedIndex { index });
                }
                cycle.push(index);
            }
            // (a b c) sends a -> b -> c -> a.
            for k in 0..cycle.len() {
                mapping[cycle[k] - 1] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::from_mapping(mapping)
    }

    /// Degree: the permutation acts on `1..=n()`.
    pub fn n(&self) -> usize {
        self.mapping.len()
    }

    /// `g(i)`. Panics outside `1..=n()`.
    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i - 1]
    }

    /// The positions this permutation actually moves.
    pub fn moved(&self) -> &BTreeSet<usize> {
        &self.moved
    }

    pub fn is_identity(&self) -> bool {
        self.moved.is_empty()
    }

    /// The inverse bijection.
    pub fn inverse(&self) -> Self {
        let mut mapping = vec![0; self.n()];
        for (i, &v) in self.mapping.iter().enumerate() {
            mapping[v - 1] = i + 1;
        }
        FeaturePermutation { mapping, moved: self.moved.clone() }
    }

    /// Composition `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self, PermuteError> {
        if self.n() != other.n() {
            return Err(PermuteError::DegreeMismatch { got: other.n(), expected: self.n() });
        }
        Self::from_mapping((1..=self.n()).map(|i| self.apply(other.apply(i))).collect())
    }
}

impl fmt::Display for FeaturePermutation {
    /// Canonical cycle notation; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        let mut done: BTreeSet<usize> = BTreeSet::new();
        for &start in &self.moved {
            if done.contains(&start) {
                continue;
            }
            write!(f, "(")?;
            let mut i = start;
            loop {
                done.insert(i);
                write!(f, "{i}")?;
                i = self.apply(i);
                if i == start {
                    break;
                }
                write!(f, " ")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Move every leaf mass from path `p` to the path `q` with `q_{g(i)} = p_i`.
pub fn permute_paths(
    leaves: &BTreeMap<DyadicPath, Rational>,
    g: &FeaturePermutation,
) -> Result<BTreeMap<DyadicPath, Rational>, PermuteError> {
    let n = g.n();
    let mut out = BTreeMap::new();
    for (path, mass) in leaves {
        if path.len() != n {
            return Err(PermuteError::DegreeMismatch { got: n, expected: path.len() });
        }
        let mut bits = vec![0u8; n];
        for i in 1..=n {
            bits[g.apply(i) - 1] = path.bit(i);
        }
        let moved =
            DyadicPath::from_bits(&bits).expect("permuted bits are a valid path");
        let previous = out.insert(moved, mass.clone());
        debug_assert!(previous.is_none(), "bijections cannot collide paths");
    }
    Ok(out)
}

/// Relabel a sample's feature indices by `g` (pattern `{i}` becomes
/// `{g(i)}`), keeping the counts. Under the identity feature order this is
/// the same action as [`permute_paths`] on the sample's leaf map.
pub fn permute_sample(
    sample: &FeatureSample,
    g: &FeaturePermutation,
) -> Result<FeatureSample, PermuteError> {
    if g.n() != sample.n_features() {
        return Err(PermuteError::DegreeMismatch { got: g.n(), expected: sample.n_features() });
    }
    let rows = sample
        .rows()
        .iter()
        .map(|row| SampleRow {
            pattern: row.pattern.iter().map(|&i| g.apply(i)).collect(),
            count: row.count,
        })
        .collect();
    Ok(FeatureSample::new(sample.n_features(), rows, sample.label())?)
}

/// Recompute the measure tree of the permuted measure.
///
/// The rebuild from permuted leaves is the whole computation; afterwards the
/// structural consequences are checked: with `i₁` and `i_m` the smallest and
/// largest moved positions, coefficients at depths `< i₁ - 1` are unchanged,
/// and at depths `>= i_m` whole subtrees moved as blocks, so node masses and
/// coefficients there equal the old values at the preimage path.
///
/// The returned tree's order is shifted along: the new level `g(i)` examines
/// the feature the old level `i` examined.
pub fn recompute_coefficients(
    tree: &DyadicMeasureTree,
    g: &FeaturePermutation,
) -> Result<DyadicMeasureTree, PermuteError> {
    let n = tree.maxscale();
    if g.n() != n {
        return Err(PermuteError::DegreeMismatch { got: g.n(), expected: n });
    }
    let permuted = permute_paths(&tree.leaves(), g)?;
    let mut perm = vec![0usize; n];
    for i in 1..=n {
        perm[g.apply(i) - 1] = tree.order().feature_at(i);
    }
    let order = FeatureOrder::new(perm, format!("permuted by {g}"))?;
    let rebuilt = build_from_leaves(permuted, n, order, tree.label())?;
    verify_block_structure(tree, &rebuilt, g);
    debug_assert_eq!(tree.total(), rebuilt.total(), "permutation must preserve total mass");
    Ok(rebuilt)
}

/// Check the two provable cases of the recomputation structure. Panics on
/// violation: both are theorems about any bijection, so a failure here is an
/// implementation bug, not bad input.
fn verify_block_structure(old: &DyadicMeasureTree, new: &DyadicMeasureTree, g: &FeaturePermutation) {
    let (Some(&lo), Some(&hi)) = (g.moved().first(), g.moved().last()) else {
        return; // identity: nothing to check beyond rebuild equality
    };
    // Depths < lo - 1: the split position is below every moved position, so
    // the coefficient (and the node set) is untouched.
    for (path, data) in old.nodes() {
        if path.len() + 1 < lo {
            assert_eq!(
                data.coeff,
                new.coeff(path),
                "coefficient at shallow node {path} changed under {g}"
            );
        }
    }
    // Depths >= hi: all positions in the subtree are fixed by g, so the
    // subtree at q is the block copy of the subtree at its preimage p.
    for (path, data) in new.nodes() {
        let d = path.len();
        if d < hi {
            continue;
        }
        let bits: Vec<u8> = (1..=d).map(|i| path.bit(g.apply(i))).collect();
        let pre = DyadicPath::from_bits(&bits).expect("preimage bits are a valid path");
        assert_eq!(data.mass, old.mass(&pre), "block mass mismatch at {path} under {g}");
        assert_eq!(data.coeff, old.coeff(&pre), "block coefficient mismatch at {path} under {g}");
    }
}

/// Enumerate the group generated by `generators` by breadth-first closure.
/// Fails once the element count exceeds `bound`.
pub fn enumerate_group(
    generators: &[FeaturePermutation],
    n: usize,
    bound: usize,
) -> Result<Vec<FeaturePermutation>, PermuteError> {
    let identity = FeaturePermutation::identity(n);
    let mut seen: BTreeSet<FeaturePermutation> = BTreeSet::new();
    let mut queue: VecDeque<FeaturePermutation> = VecDeque::new();
    seen.insert(identity.clone());
    queue.push_back(identity);
    while let Some(current) = queue.pop_front() {
        for gen in generators {
            if gen.n() != n {
                return Err(PermuteError::DegreeMismatch { got: gen.n(), expected: n });
            }
            let next = gen.compose(&current)?;
            if seen.insert(next.clone()) {
                if seen.len() > bound {
                    return Err(PermuteError::GroupTooLarge { bound });
                }
                queue.push_back(next);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Replace each leaf mass by the average over its orbit under the group
/// generated by `generators` (absent orbit members count as mass 0), then
/// rebuild. The result is invariant: permuting it by any group element
/// returns the same leaf map. Uses [`DEFAULT_GROUP_BOUND`].
pub fn orbit_average(
    tree: &DyadicMeasureTree,
    generators: &[FeaturePermutation],
) -> Result<DyadicMeasureTree, PermuteError> {
    orbit_average_bounded(tree, generators, DEFAULT_GROUP_BOUND)
}

/// [`orbit_average`] with an explicit group-size bound.
pub fn orbit_average_bounded(
    tree: &DyadicMeasureTree,
    generators: &[FeaturePermutation],
    bound: usize,
) -> Result<DyadicMeasureTree, PermuteError> {
    let n = tree.maxscale();
    let group = enumerate_group(generators, n, bound)?;
    let leaves = tree.leaves();
    let mut averaged: BTreeMap<DyadicPath, Rational> = BTreeMap::new();
    for path in leaves.keys() {
        if averaged.contains_key(path) {
            continue;
        }
        let orbit: BTreeSet<DyadicPath> = group
            .iter()
            .map(|g| {
                let mut bits = vec![0u8; n];
                for i in 1..=n {
                    bits[g.apply(i) - 1] = path.bit(i);
                }
                DyadicPath::from_bits(&bits).expect("permuted bits are a valid path")
            })
            .collect();
        let total: Rational =
            orbit.iter().map(|p| leaves.get(p).cloned().unwrap_or_else(Rational::zero)).sum();
        let share = total / rat_int(orbit.len() as i64);
        for p in orbit {
            averaged.insert(p, share.clone());
        }
    }
    let order = tree.order().clone();
    let rebuilt = build_from_leaves(averaged, n, order, tree.label())?;
    debug_assert_eq!(tree.total(), rebuilt.total(), "orbit averaging must preserve total mass");
    Ok(rebuilt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::build_tree;
    use crate::ratio::rat;
    use crate::testutil::{toy_sample, toy_tree};
    use proptest::prelude::*;

    fn path(s: &str) -> DyadicPath {
        DyadicPath::parse(s).unwrap()
    }

    #[test]
    fn parse_cycles() {
        let g = FeaturePermutation::parse("(1 2)(5 7 9)", 9).unwrap();
        assert_eq!(g.apply(1), 2);
        assert_eq!(g.apply(2), 1);
        assert_eq!(g.apply(5), 7);
        assert_eq!(g.apply(7), 9);
        assert_eq!(g.apply(9), 5);
        assert_eq!(g.apply(3), 3);
        assert_eq!(g.moved().iter().copied().collect::<Vec<_>>(), vec![1, 2, 5, 7, 9]);
        assert_eq!(g.to_string(), "(1 2)(5 7 9)");
    }

    #[test]
    fn parse_identity_forms() {
        assert!(FeaturePermutation::parse("", 4).unwrap().is_identity());
        assert!(FeaturePermutation::parse("()", 4).unwrap().is_identity());
        assert!(FeaturePermutation::parse("(3)", 4).unwrap().is_identity());
        assert_eq!(FeaturePermutation::identity(4).to_string(), "()");
    }

    #[test]
    fn parse_accepts_commas() {
        let a = FeaturePermutation::parse("(1,2,3)", 3).unwrap();
        let b = FeaturePermutation::parse("(1 2 3)", 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(
            FeaturePermutation::parse("1 2", 4),
            Err(PermuteError::BadCycleNotation { .. })
        ));
        assert!(matches!(
            FeaturePermutation::parse("(1 2", 4),
            Err(PermuteError::BadCycleNotation { .. })
        ));
        assert!(matches!(
            FeaturePermutation::parse("(1 x)", 4),
            Err(PermuteError::BadCycleNotation { .. })
        ));
        assert!(matches!(
            FeaturePermutation::parse("(0 1)", 4),
            Err(PermuteError::IndexOutOfRange { index: 0, n: 4 })
        ));
        assert!(matches!(
            FeaturePermutation::parse("(1 5)", 4),
            Err(PermuteError::IndexOutOfRange { index: 5, n: 4 })
        ));
        assert!(matches!(
            FeaturePermutation::parse("(1 2)(2 3)", 4),
            Err(PermuteError::RepeatedIndex { index: 2 })
        ));
    }

    #[test]
    fn from_mapping_rejects_non_bijections() {
        assert!(FeaturePermutation::from_mapping(vec![1, 1, 3]).is_err());
        assert!(FeaturePermutation::from_mapping(vec![1, 4, 3]).is_err());
        assert!(FeaturePermutation::from_mapping(vec![0, 1, 2]).is_err());
    }

    #[test]
    fn inverse_and_compose() {
        let g = FeaturePermutation::parse("(1 2 3)", 5).unwrap();
        let inv = g.inverse();
        assert_eq!(inv.apply(2), 1);
        assert!(g.compose(&inv).unwrap().is_identity());
        assert!(inv.compose(&g).unwrap().is_identity());
    }

    #[test]
    fn swap_exchanges_toy_leaves() {
        let tree = toy_tree();
        let g = FeaturePermutation::parse("(1 2)", 2).unwrap();
        let moved = permute_paths(&tree.leaves(), &g).unwrap();
        assert_eq!(moved[&path("00")], rat_int(3));
        assert_eq!(moved[&path("01")], rat_int(2));
        assert_eq!(moved[&path("10")], rat_int(1));
        assert_eq!(moved[&path("11")], rat_int(2));
    }

    #[test]
    fn identity_recompute_is_unchanged() {
        let tree = toy_tree();
        let again = recompute_coefficients(&tree, &FeaturePermutation::identity(2)).unwrap();
        assert_eq!(tree.nodes(), again.nodes());
        assert_eq!(tree.order(), again.order());
    }

    #[test]
    fn toy_swap_root_coefficient() {
        // Splitting on the second feature first: mass with F2 = 0 is
        // 3 + 2 = 5, with F2 = 1 is 1 + 2 = 3, so the root coefficient
        // becomes (5 - 3)/8 = 1/4.
        let tree = toy_tree();
        let g = FeaturePermutation::parse("(1 2)", 2).unwrap();
        let swapped = recompute_coefficients(&tree, &g).unwrap();
        assert_eq!(swapped.coeff(&DyadicPath::root()), rat(1, 4));
        assert_eq!(tree.coeff(&DyadicPath::root()), rat_int(0));
        assert_eq!(swapped.total(), tree.total());
    }

    #[test]
    fn recompute_equals_sample_relabel_rebuild() {
        // Relabeling the sample's features and rebuilding gives the same
        // measure as permuting the tree's paths.
        let sample = toy_sample();
        let tree = build_tree(&sample, &FeatureOrder::identity(2)).unwrap();
        let g = FeaturePermutation::parse("(1 2)", 2).unwrap();
        let relabeled = permute_sample(&sample, &g).unwrap();
        let direct = build_tree(&relabeled, &FeatureOrder::identity(2)).unwrap();
        let via_paths = recompute_coefficients(&tree, &g).unwrap();
        assert_eq!(direct.nodes(), via_paths.nodes());
    }

    #[test]
    fn shifted_order_tracks_features() {
        let tree = toy_tree();
        let g = FeaturePermutation::parse("(1 2)", 2).unwrap();
        let swapped = recompute_coefficients(&tree, &g).unwrap();
        // Old level 1 examined feature 1; it now sits at level g(1) = 2.
        assert_eq!(swapped.order().feature_at(2), tree.order().feature_at(1));
        assert_eq!(swapped.order().feature_at(1), tree.order().feature_at(2));
    }

    #[test]
    fn trivial_group_average_is_identity_map() {
        let tree = toy_tree();
        let avg = orbit_average(&tree, &[]).unwrap();
        assert_eq!(avg.nodes(), tree.nodes());
        let avg2 = orbit_average(&tree, &[FeaturePermutation::identity(2)]).unwrap();
        assert_eq!(avg2.nodes(), tree.nodes());
    }

    #[test]
    fn full_swap_group_averages_toy() {
        let tree = toy_tree();
        let g = FeaturePermutation::parse("(1 2)", 2).unwrap();
        let avg = orbit_average(&tree, std::slice::from_ref(&g)).unwrap();
        let leaves = avg.leaves();
        assert_eq!(leaves[&path("00")], rat_int(3));
        assert_eq!(leaves[&path("01")], rat(3, 2));
        assert_eq!(leaves[&path("10")], rat(3, 2));
        assert_eq!(leaves[&path("11")], rat_int(2));
        // Invariance: permuting the averaged measure changes nothing.
        let again = permute_paths(&leaves, &g).unwrap();
        assert_eq!(leaves, again);
        assert_eq!(avg.total(), tree.total());
    }

    #[test]
    fn group_bound_is_enforced() {
        // A transposition and an 8-cycle generate all of S_8 (40320 > bound).
        let gens = [
            FeaturePermutation::parse("(1 2)", 8).unwrap(),
            FeaturePermutation::parse("(1 2 3 4 5 6 7 8)", 8).unwrap(),
        ];
        assert!(matches!(
            enumerate_group(&gens, 8, DEFAULT_GROUP_BOUND),
            Err(PermuteError::GroupTooLarge { bound: DEFAULT_GROUP_BOUND })
        ));
    }

    #[test]
    fn small_group_enumerates_fully() {
        let gens = [FeaturePermutation::parse("(1 2 3)", 3).unwrap()];
        let group = enumerate_group(&gens, 3, 10).unwrap();
        assert_eq!(group.len(), 3);
        let gens = [
            FeaturePermutation::parse("(1 2)", 3).unwrap(),
            FeaturePermutation::parse("(1 2 3)", 3).unwrap(),
        ];
        assert_eq!(enumerate_group(&gens, 3, 10).unwrap().len(), 6);
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        let tree = toy_tree();
        let g = FeaturePermutation::identity(3);
        assert!(matches!(
            recompute_coefficients(&tree, &g),
            Err(PermuteError::DegreeMismatch { got: 3, expected: 2 })
        ));
    }

    proptest! {
        #[test]
        fn permute_then_inverse_is_identity(
            masses in proptest::collection::btree_map(0u8..16, 1u32..50, 1..10),
            seed in 0u64..1000,
        ) {
            // 4-feature leaf maps from the low 4 bits of the keys.
            let leaves: BTreeMap<DyadicPath, Rational> = masses
                .into_iter()
                .map(|(k, m)| {
                    let bits: Vec<u8> = (0..4).map(|i| k >> (3 - i) & 1).collect();
                    (DyadicPath::from_bits(&bits).unwrap(), rat_int(m as i64))
                })
                .collect();
            let g = pseudo_random_permutation(4, seed);
            let there = permute_paths(&leaves, &g).unwrap();
            let back = permute_paths(&there, &g.inverse()).unwrap();
            prop_assert_eq!(leaves, back);
        }

        #[test]
        fn recompute_preserves_leaf_multiset_and_total(seed in 0u64..500) {
            let tree = toy_tree();
            let g = pseudo_random_permutation(2, seed);
            let new = recompute_coefficients(&tree, &g).unwrap();
            prop_assert_eq!(new.total(), tree.total());
            let mut old_masses: Vec<Rational> = tree.leaves().values().cloned().collect();
            let mut new_masses: Vec<Rational> = new.leaves().values().cloned().collect();
            old_masses.sort();
            new_masses.sort();
            prop_assert_eq!(old_masses, new_masses);
        }
    }

    /// Deterministic scrambled permutation from a seed (tests only).
    fn pseudo_random_permutation(n: usize, seed: u64) -> FeaturePermutation {
        let mut items: Vec<usize> = (1..=n).collect();
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            items.swap(i, j);
        }
        FeaturePermutation::from_mapping(items).unwrap()
    }
}
