//! Measures on general tree-structured sets: coefficients relative to a
//! strictly positive reference measure, path formulas, orthogonality, and
//! coefficient bounds.
//!
//! A tree carries two exact measures per node: a reference `ν` that is
//! strictly positive and additive, and the measure of interest `μ`, which
//! is non-negative and additive. Every non-root node gets the coefficient
//!
//! ```text
//! a_n = μ(n)/μ(parent) · ν(parent)/ν(n) − 1      (a_n = 0 when μ(parent) = 0)
//! ```
//!
//! so that `μ(n) = (1 + a_n) · (ν(n)/ν(parent)) · μ(parent)`. The dyadic
//! case is the binary tree with uniform `ν`; there the left-child
//! coefficient reproduces the dyadic product coefficient of the parent and
//! the right-child coefficient its negative.

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::measure::DyadicMeasureTree;
use crate::ratio::{format_rational, parse_rational, rat_int, Rational};

/// Depth cap for materializing a full binary tree out of a dyadic one.
const FROM_DYADIC_DEPTH_LIMIT: usize = 16;

/// One node of a [`TreeStructuredMeasure`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Reference measure of the node's subset; strictly positive.
    pub nu: Rational,
    /// Measure of interest; non-negative.
    pub mu: Rational,
    /// The coefficient `a_n`; zero at the root by convention.
    pub coeff: Rational,
}

/// A rooted tree with finite branching carrying `ν`, `μ`, and the derived
/// coefficients. Node 0 is the root; children are ordered as given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeStructuredMeasure {
    nodes: Vec<TreeNode>,
}

/// Nested input form for building trees programmatically.
#[derive(Debug, Clone)]
pub struct NodeSpec {
    pub nu: Rational,
    pub mu: Rational,
    pub children: Vec<NodeSpec>,
}

impl NodeSpec {
    pub fn leaf(nu: Rational, mu: Rational) -> Self {
        NodeSpec { nu, mu, children: Vec::new() }
    }

    pub fn branch(nu: Rational, mu: Rational, children: Vec<NodeSpec>) -> Self {
        NodeSpec { nu, mu, children }
    }
}

/// Errors from construction and parsing of tree-structured measures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeMeasureError {
    #[error("empty tree input")]
    EmptyInput,
    #[error("line {line}: indentation must step by two spaces per level")]
    BadIndent { line: usize },
    #[error("line {line}: node at depth {depth} has no parent at depth {}", depth - 1)]
    OrphanNode { line: usize, depth: usize },
    #[error("line {line}: expected `nu mu` rationals, got {text:?}")]
    BadNodeLine { line: usize, text: String },
    #[error("line {line}: a second root is not allowed")]
    SecondRoot { line: usize },
    #[error("node {node}: reference measure must be strictly positive")]
    NonPositiveNu { node: usize },
    #[error("node {node}: measure must be non-negative")]
    NegativeMu { node: usize },
    #[error("node {node}: children's ν do not sum to the parent's")]
    NuNotAdditive { node: usize },
    #[error("node {node}: children's μ do not sum to the parent's")]
    MuNotAdditive { node: usize },
    #[error("dyadic tree of depth {depth} too deep to materialize (limit {limit})")]
    TooDeep { depth: usize, limit: usize },
}

impl TreeStructuredMeasure {
    /// Build from a nested spec, checking every invariant and computing the
    /// coefficients.
    pub fn from_spec(spec: &NodeSpec) -> Result<Self, TreeMeasureError> {
        let mut nodes = Vec::new();
        // Explicit stack; (spec, parent index).
        let mut stack = vec![(spec, None::<usize>)];
        while let Some((s, parent)) = stack.pop() {
            let index = nodes.len();
            nodes.push(TreeNode {
                parent,
                children: Vec::new(),
                nu: s.nu.clone(),
                mu: s.mu.clone(),
                coeff: Rational::zero(),
            });
            if let Some(p) = parent {
                nodes[p].children.push(index);
            }
            // Reverse so children end up in input order despite LIFO.
            for child in s.children.iter().rev() {
                stack.push((child, Some(index)));
            }
        }
        Self::finish(nodes)
    }

    /// Validate measures and additivity, then fill in the coefficients.
    fn finish(mut nodes: Vec<TreeNode>) -> Result<Self, TreeMeasureError> {
        for i in 0..nodes.len() {
            if !nodes[i].nu.is_positive() {
                return Err(TreeMeasureError::NonPositiveNu { node: i });
            }
            if nodes[i].mu.is_negative() {
                return Err(TreeMeasureError::NegativeMu { node: i });
            }
            if !nodes[i].children.is_empty() {
                let nu_sum: Rational = nodes[i].children.iter().map(|&c| nodes[c].nu.clone()).sum();
                if nu_sum != nodes[i].nu {
                    return Err(TreeMeasureError::NuNotAdditive { node: i });
                }
                let mu_sum: Rational = nodes[i].children.iter().map(|&c| nodes[c].mu.clone()).sum();
                if mu_sum != nodes[i].mu {
                    return Err(TreeMeasureError::MuNotAdditive { node: i });
                }
            }
        }
        for i in 1..nodes.len() {
            let p = nodes[i].parent.expect("non-root nodes have parents");
            let coeff = if nodes[p].mu.is_zero() {
                Rational::zero()
            } else {
                &nodes[i].mu / &nodes[p].mu * &nodes[p].nu / &nodes[i].nu - rat_int(1)
            };
            nodes[i].coeff = coeff;
        }
        Ok(TreeStructuredMeasure { nodes })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// The root index (always 0).
    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, i: usize) -> &TreeNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.nodes[i].children.is_empty()
    }

    /// Depth of node `i` (root = 0).
    pub fn depth(&self, i: usize) -> usize {
        let mut d = 0;
        let mut cursor = i;
        while let Some(p) = self.nodes[cursor].parent {
            cursor = p;
            d += 1;
        }
        d
    }
}

/// The coefficient of every node, index-aligned with the arena; the root's
/// entry is 0.
pub fn general_coefficients(tree: &TreeStructuredMeasure) -> Vec<Rational> {
    tree.nodes().iter().map(|n| n.coeff.clone()).collect()
}

/// Evaluate the μ path formula at a node: `μ(X)` times, for each ancestor
/// step down to the node, `(1 + a_p) · ν(p)/ν(parent(p))`. Equals the
/// stored `μ` exactly.
pub fn general_path_formula(tree: &TreeStructuredMeasure, node: usize) -> Rational {
    let mut chain = Vec::new();
    let mut cursor = node;
    while let Some(p) = tree.node(cursor).parent {
        chain.push(cursor);
        cursor = p;
    }
    let mut value = tree.node(tree.root()).mu.clone();
    for &i in chain.iter().rev() {
        let p = tree.node(i).parent.expect("chain nodes are non-root");
        value = value * (rat_int(1) + &tree.node(i).coeff) * &tree.node(i).nu / &tree.node(p).nu;
    }
    value
}

/// The companion ν path formula: `ν(X)` times the telescoping ν ratios.
/// Equals the stored `ν` exactly.
pub fn nu_path_formula(tree: &TreeStructuredMeasure, node: usize) -> Rational {
    let mut chain = Vec::new();
    let mut cursor = node;
    while let Some(p) = tree.node(cursor).parent {
        chain.push(cursor);
        cursor = p;
    }
    let mut value = tree.node(tree.root()).nu.clone();
    for &i in chain.iter().rev() {
        let p = tree.node(i).parent.expect("chain nodes are non-root");
        value = value * &tree.node(i).nu / &tree.node(p).nu;
    }
    value
}

/// The orthogonality residual at a node: `Σ_c a_c · ν(c)` over its
/// children. Exactly zero everywhere (and trivially zero at leaves, where
/// the sum is empty).
pub fn check_orthogonality(tree: &TreeStructuredMeasure, node: usize) -> Rational {
    tree.node(node)
        .children
        .iter()
        .map(|&c| &tree.node(c).coeff * &tree.node(c).nu)
        .sum()
}

/// Bounds check for the coefficient at a non-root node:
/// `-1 <= a_n <= ν(parent)/ν(n) - 1`, the upper bound strict when
/// `strict_upper` is set. The root has no coefficient and passes trivially.
pub fn coefficient_bounds(
    tree: &TreeStructuredMeasure,
    node: usize,
    strict_upper: bool,
) -> (bool, bool) {
    let Some(p) = tree.node(node).parent else {
        return (true, true);
    };
    let a = &tree.node(node).coeff;
    let bound = &tree.node(p).nu / &tree.node(node).nu - rat_int(1);
    let lower = *a >= rat_int(-1);
    let upper = if strict_upper { *a < bound } else { *a <= bound };
    (lower, upper)
}

/// Outcome of checking every Lemma invariant on a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub nodes: usize,
    pub mu_path_ok: bool,
    pub nu_path_ok: bool,
    pub orthogonality_ok: bool,
    pub lower_bounds_ok: bool,
    pub upper_bounds_ok: bool,
}

impl LemmaReport {
    pub fn all_ok(&self) -> bool {
        self.mu_path_ok
            && self.nu_path_ok
            && self.orthogonality_ok
            && self.lower_bounds_ok
            && self.upper_bounds_ok
    }
}

/// Verify the path formulas, orthogonality, and bounds at every node.
pub fn verify_lemma(tree: &TreeStructuredMeasure, strict_upper: bool) -> LemmaReport {
    let mut report = LemmaReport {
        nodes: tree.n_nodes(),
        mu_path_ok: true,
        nu_path_ok: true,
        orthogonality_ok: true,
        lower_bounds_ok: true,
        upper_bounds_ok: true,
    };
    for i in 0..tree.n_nodes() {
        report.mu_path_ok &= general_path_formula(tree, i) == tree.node(i).mu;
        report.nu_path_ok &= nu_path_formula(tree, i) == tree.node(i).nu;
        report.orthogonality_ok &= check_orthogonality(tree, i).is_zero();
        let (lo, hi) = coefficient_bounds(tree, i, strict_upper);
        report.lower_bounds_ok &= lo;
        report.upper_bounds_ok &= hi;
    }
    report
}

/// Parse the indented text format: one node per line as `ν μ` (rationals),
/// children indented two spaces deeper than their parent. Blank lines and
/// `#` comments are skipped.
pub fn parse_tree_text(text: &str) -> Result<TreeStructuredMeasure, TreeMeasureError> {
    let mut nodes: Vec<TreeNode> = Vec::new();
    // Rightmost node seen at each depth, the attachment points.
    let mut last_at_depth: Vec<usize> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let indent = raw.len() - raw.trim_start_matches(' ').len();
        if indent % 2 != 0 {
            return Err(TreeMeasureError::BadIndent { line });
        }
        let depth = indent / 2;
        let body = raw.trim();
        let mut parts = body.split_whitespace();
        let (Some(nu_text), Some(mu_text), None) = (parts.next(), parts.next(), parts.next())
        else {
            return Err(TreeMeasureError::BadNodeLine { line, text: body.into() });
        };
        let nu = parse_rational(nu_text)
            .map_err(|_| TreeMeasureError::BadNodeLine { line, text: body.into() })?;
        let mu = parse_rational(mu_text)
            .map_err(|_| TreeMeasureError::BadNodeLine { line, text: body.into() })?;
        let parent = if depth == 0 {
            if !nodes.is_empty() {
                return Err(TreeMeasureError::SecondRoot { line });
            }
            None
        } else if depth <= last_at_depth.len() {
            Some(last_at_depth[depth - 1])
        } else {
            return Err(TreeMeasureError::OrphanNode { line, depth });
        };
        let index = nodes.len();
        nodes.push(TreeNode { parent, children: Vec::new(), nu, mu, coeff: Rational::zero() });
        if let Some(p) = parent {
            nodes[p].children.push(index);
        }
        last_at_depth.truncate(depth);
        last_at_depth.push(index);
    }
    if nodes.is_empty() {
        return Err(TreeMeasureError::EmptyInput);
    }
    TreeStructuredMeasure::finish(nodes)
}

impl fmt::Display for TreeStructuredMeasure {
    /// The same indented `ν μ` format that [`parse_tree_text`] reads.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Depth-first, children in order, two spaces per level.
        let mut stack = vec![(self.root(), 0usize)];
        while let Some((i, depth)) = stack.pop() {
            let node = self.node(i);
            writeln!(
                f,
                "{:indent$}{} {}",
                "",
                format_rational(&node.nu),
                format_rational(&node.mu),
                indent = 2 * depth
            )?;
            for &c in node.children.iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        Ok(())
    }
}

/// Materialize a dyadic measure tree as a full binary tree-structured
/// measure with the uniform reference (`ν` halves at each level). Absent
/// dyadic nodes appear with `μ = 0`. Exponential in depth, hence capped.
pub fn from_dyadic(tree: &DyadicMeasureTree) -> Result<TreeStructuredMeasure, TreeMeasureError> {
    use crate::measure::DyadicPath;
    let depth = tree.maxscale();
    if depth > FROM_DYADIC_DEPTH_LIMIT {
        return Err(TreeMeasureError::TooDeep { depth, limit: FROM_DYADIC_DEPTH_LIMIT });
    }
    fn build(tree: &DyadicMeasureTree, path: &DyadicPath, nu: Rational) -> NodeSpec {
        let mu = tree.mass(path);
        if path.len() == tree.maxscale() {
            return NodeSpec::leaf(nu, mu);
        }
        let half = nu / rat_int(2);
        let children = vec![
            build(tree, &path.child(0), half.clone()),
            build(tree, &path.child(1), half),
        ];
        NodeSpec::branch(children[0].nu.clone() + &children[1].nu, mu, children)
    }
    let spec = build(tree, &DyadicPath::root(), rat_int(1));
    TreeStructuredMeasure::from_spec(&spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;
    use crate::testutil::toy_tree;

    /// Root ν=1 μ=1 with three children of ν=1/3 and μ = (1, 0, 0).
    fn ternary_example() -> TreeStructuredMeasure {
        let spec = NodeSpec::branch(
            rat_int(1),
            rat_int(1),
            vec![
                NodeSpec::leaf(rat(1, 3), rat_int(1)),
                NodeSpec::leaf(rat(1, 3), rat_int(0)),
                NodeSpec::leaf(rat(1, 3), rat_int(0)),
            ],
        );
        TreeStructuredMeasure::from_spec(&spec).unwrap()
    }

    #[test]
    fn ternary_coefficients() {
        let tree = ternary_example();
        let coeffs = general_coefficients(&tree);
        assert_eq!(coeffs[1], rat_int(2));
        assert_eq!(coeffs[2], rat_int(-1));
        assert_eq!(coeffs[3], rat_int(-1));
    }

    #[test]
    fn ternary_path_formula() {
        let tree = ternary_example();
        // First child: 1 · (1 + 2) · (1/3) = 1.
        assert_eq!(general_path_formula(&tree, 1), rat_int(1));
        assert_eq!(general_path_formula(&tree, 2), rat_int(0));
        assert_eq!(general_path_formula(&tree, 0), rat_int(1));
    }

    #[test]
    fn ternary_orthogonality() {
        let tree = ternary_example();
        // 2·(1/3) + (−1)·(1/3) + (−1)·(1/3) = 0.
        assert_eq!(check_orthogonality(&tree, 0), rat_int(0));
        // Leaves: empty sum.
        assert_eq!(check_orthogonality(&tree, 1), rat_int(0));
    }

    #[test]
    fn ternary_bounds_attained() {
        let tree = ternary_example();
        // ν ratio is 3, so the window is [−1, 2]; a = 2 sits on the top and
        // a = −1 on the bottom.
        assert_eq!(coefficient_bounds(&tree, 1, false), (true, true));
        assert_eq!(coefficient_bounds(&tree, 1, true), (true, false));
        assert_eq!(coefficient_bounds(&tree, 2, false), (true, true));
        assert_eq!(coefficient_bounds(&tree, 0, true), (true, true));
    }

    #[test]
    fn proportional_measures_have_zero_coefficients() {
        let spec = NodeSpec::branch(
            rat_int(1),
            rat_int(5),
            vec![
                NodeSpec::leaf(rat(1, 4), rat(5, 4)),
                NodeSpec::leaf(rat(3, 4), rat(15, 4)),
            ],
        );
        let tree = TreeStructuredMeasure::from_spec(&spec).unwrap();
        assert!(general_coefficients(&tree).iter().all(Zero::is_zero));
    }

    #[test]
    fn zero_parent_convention() {
        let spec = NodeSpec::branch(
            rat_int(2),
            rat_int(1),
            vec![
                NodeSpec::leaf(rat_int(1), rat_int(1)),
                NodeSpec::branch(
                    rat_int(1),
                    rat_int(0),
                    vec![
                        NodeSpec::leaf(rat(1, 2), rat_int(0)),
                        NodeSpec::leaf(rat(1, 2), rat_int(0)),
                    ],
                ),
            ],
        );
        let tree = TreeStructuredMeasure::from_spec(&spec).unwrap();
        let coeffs = general_coefficients(&tree);
        // The empty subtree's own coefficient is −1 (mass vanished here)...
        assert_eq!(coeffs[2], rat_int(-1));
        // ...but below a zero-mass parent the convention pins a to 0.
        assert_eq!(coeffs[3], rat_int(0));
        assert_eq!(coeffs[4], rat_int(0));
        assert!(verify_lemma(&tree, false).all_ok());
    }

    #[test]
    fn minus_one_exactly_at_vanishing_mass() {
        let tree = ternary_example();
        let coeffs = general_coefficients(&tree);
        for (i, coeff) in coeffs.iter().enumerate().skip(1) {
            let vanished = tree.node(i).mu.is_zero();
            assert_eq!(*coeff == rat_int(-1), vanished);
        }
    }

    #[test]
    fn invariant_violations_are_rejected() {
        let bad_nu = NodeSpec::leaf(rat_int(0), rat_int(1));
        assert_eq!(
            TreeStructuredMeasure::from_spec(&bad_nu),
            Err(TreeMeasureError::NonPositiveNu { node: 0 })
        );
        let bad_mu = NodeSpec::leaf(rat_int(1), rat_int(-1));
        assert_eq!(
            TreeStructuredMeasure::from_spec(&bad_mu),
            Err(TreeMeasureError::NegativeMu { node: 0 })
        );
        let bad_add = NodeSpec::branch(
            rat_int(1),
            rat_int(1),
            vec![NodeSpec::leaf(rat(1, 2), rat(1, 2)), NodeSpec::leaf(rat(1, 3), rat(1, 2))],
        );
        assert_eq!(
            TreeStructuredMeasure::from_spec(&bad_add),
            Err(TreeMeasureError::NuNotAdditive { node: 0 })
        );
        let bad_mu_add = NodeSpec::branch(
            rat_int(1),
            rat_int(1),
            vec![NodeSpec::leaf(rat(1, 2), rat(1, 2)), NodeSpec::leaf(rat(1, 2), rat(1, 4))],
        );
        assert_eq!(
            TreeStructuredMeasure::from_spec(&bad_mu_add),
            Err(TreeMeasureError::MuNotAdditive { node: 0 })
        );
    }

    #[test]
    fn parse_and_display_round_trip() {
        let text = "\
# a ternary split
1 1
  1/3 1
  1/3 0
  1/3 0
";
        let tree = parse_tree_text(text).unwrap();
        assert_eq!(tree, ternary_example());
        let rendered = tree.to_string();
        assert_eq!(parse_tree_text(&rendered).unwrap(), tree);
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert_eq!(parse_tree_text(""), Err(TreeMeasureError::EmptyInput));
        assert_eq!(parse_tree_text("# only comments\n"), Err(TreeMeasureError::EmptyInput));
        assert_eq!(parse_tree_text(" 1 1\n"), Err(TreeMeasureError::BadIndent { line: 1 }));
        assert_eq!(
            parse_tree_text("1 1\n    1 1\n"),
            Err(TreeMeasureError::OrphanNode { line: 2, depth: 2 })
        );
        assert_eq!(parse_tree_text("1 1\n1 1\n"), Err(TreeMeasureError::SecondRoot { line: 2 }));
        assert!(matches!(
            parse_tree_text("1\n"),
            Err(TreeMeasureError::BadNodeLine { line: 1, .. })
        ));
        assert!(matches!(
            parse_tree_text("1 x\n"),
            Err(TreeMeasureError::BadNodeLine { line: 1, .. })
        ));
    }

    #[test]
    fn deeper_parse_structure() {
        let text = "\
1 6
  1/2 5
    1/4 2
    1/4 3
  1/2 1
";
        let tree = parse_tree_text(text).unwrap();
        assert_eq!(tree.n_nodes(), 5);
        assert_eq!(tree.node(1).children, vec![2, 3]);
        assert_eq!(tree.depth(3), 2);
        assert!(verify_lemma(&tree, false).all_ok());
    }

    #[test]
    fn uniform_nu_binary_matches_dyadic_coefficients() {
        let dyadic = toy_tree();
        let general = from_dyadic(&dyadic).unwrap();
        assert!(verify_lemma(&general, false).all_ok());
        // Walk the binary arena alongside the dyadic paths: at each stored
        // dyadic node, the left child's general coefficient equals the
        // node's dyadic coefficient and the right child's its negative.
        use crate::measure::DyadicPath;
        fn walk(
            general: &TreeStructuredMeasure,
            dyadic: &crate::measure::DyadicMeasureTree,
            gi: usize,
            path: &DyadicPath,
        ) {
            if general.is_leaf(gi) {
                return;
            }
            let a = dyadic.coeff(path);
            let &[l, r] = &general.node(gi).children[..] else {
                panic!("binary tree node without two children")
            };
            if !general.node(gi).mu.is_zero() {
                assert_eq!(general.node(l).coeff, a);
                assert_eq!(general.node(r).coeff, -a);
            }
            walk(general, dyadic, l, &path.child(0));
            walk(general, dyadic, r, &path.child(1));
        }
        walk(&general, &dyadic, general.root(), &DyadicPath::root());
    }

    #[test]
    fn regular_kary_uniform_nu_bound_value() {
        // k = 4: the upper bound evaluates to k − 1 = 3, attained when one
        // child carries all the parent's mass.
        let spec = NodeSpec::branch(
            rat_int(1),
            rat_int(1),
            (0..4)
                .map(|i| NodeSpec::leaf(rat(1, 4), rat_int(i64::from(i == 0))))
                .collect(),
        );
        let tree = TreeStructuredMeasure::from_spec(&spec).unwrap();
        assert_eq!(tree.node(1).coeff, rat_int(3));
        let bound = &tree.node(0).nu / &tree.node(1).nu - rat_int(1);
        assert_eq!(bound, rat_int(3));
        assert_eq!(coefficient_bounds(&tree, 1, false), (true, true));
        assert_eq!(coefficient_bounds(&tree, 1, true), (true, false));
    }

    #[test]
    fn from_dyadic_depth_guard() {
        use crate::measure::{build_from_leaves, DyadicPath};
        use crate::sample::FeatureOrder;
        use std::collections::BTreeMap;
        let deep = 17;
        let mut leaves = BTreeMap::new();
        leaves.insert(DyadicPath::from_bits(&vec![0u8; deep]).unwrap(), rat_int(1));
        let tree =
            build_from_leaves(leaves, deep, FeatureOrder::identity(deep), "deep").unwrap();
        assert_eq!(
            from_dyadic(&tree).err(),
            Some(TreeMeasureError::TooDeep { depth: 17, limit: 16 })
        );
    }
}
