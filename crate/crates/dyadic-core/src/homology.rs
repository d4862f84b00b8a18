//! Exact simplicial homology: closures, boundary matrices, betti numbers,
//! and optional torsion via Smith normal form.
//!
//! Everything is integer arithmetic. Ranks come from fraction-free
//! elimination that always pivots on a smallest-magnitude entry: while a
//! ±1 pivot exists the update is a plain integer column operation on sparse
//! columns (boundary matrices almost always reduce completely this way), and
//! whatever is left drops into a dense Bareiss elimination. Smith normal
//! form is computed the same way — unit pivots split off invariant factor 1
//! unimodularly — with the textbook reduction on the small remainder.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::complexes::{Face, MaximalFaceSet};

/// Dense elimination guardrail: the sparse unit-pivot phase runs first, so
/// only pathological inputs ever present more columns than this densely.
const DENSE_COLUMN_LIMIT: usize = 5_000;

/// A finite abstract simplicial complex, closed under subsets, with the
/// faces of each dimension sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    faces_by_dim: Vec<Vec<Face>>,
}

/// Errors from homology computations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("boundary dimension {d} out of range [1, {dim}]")]
    DimensionOutOfRange { d: usize, dim: usize },
    #[error("dense elimination limit exceeded: {cols} columns")]
    TooLarge { cols: usize },
}

impl SimplicialComplex {
    /// The complex with no faces at all.
    pub fn empty() -> Self {
        SimplicialComplex { faces_by_dim: Vec::new() }
    }

    /// Dimension of the complex, or `None` when it has no faces.
    pub fn dim(&self) -> Option<usize> {
        self.faces_by_dim.len().checked_sub(1)
    }

    /// The sorted `d`-faces (empty slice above the dimension).
    pub fn faces_of_dim(&self, d: usize) -> &[Face] {
        self.faces_by_dim.get(d).map_or(&[], Vec::as_slice)
    }

    /// Number of `d`-faces.
    pub fn count(&self, d: usize) -> usize {
        self.faces_of_dim(d).len()
    }

    /// All faces, dimension by dimension.
    pub fn faces(&self) -> impl Iterator<Item = &Face> {
        self.faces_by_dim.iter().flatten()
    }

    /// Total face count across dimensions.
    pub fn total_faces(&self) -> usize {
        self.faces_by_dim.iter().map(Vec::len).sum()
    }
}

/// Materialize the closure of a maximal-face set: every nonempty subset of
/// every maximal face, deduplicated and bucketed by dimension.
///
/// Cost is `O(2^k)` per size-`k` maximal face; the antichain representation
/// exists precisely so this is done only here.
pub fn closure(maximal: &MaximalFaceSet) -> SimplicialComplex {
    let mut seen: BTreeSet<Face> = BTreeSet::new();
    for face in maximal.faces() {
        let verts = face.vertices();
        let k = verts.len();
        assert!(k < 64, "closure of a {k}-vertex face is not representable");
        for mask in 1u64..(1u64 << k) {
            let subset: Vec<usize> =
                (0..k).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
            seen.insert(Face::new(subset).expect("subsets of a face are ascending and nonempty"));
        }
    }
    let dim = match seen.iter().map(Face::dim).max() {
        Some(d) => d,
        None => return SimplicialComplex::empty(),
    };
    let mut faces_by_dim = vec![Vec::new(); dim + 1];
    for face in seen {
        faces_by_dim[face.dim()].push(face);
    }
    // BTreeSet iteration is sorted, and bucketing preserves it per dimension.
    SimplicialComplex { faces_by_dim }
}

/// The boundary operator from `d`-chains to `(d-1)`-chains as a sparse
/// column matrix: rows are the sorted `(d-1)`-faces, columns the sorted
/// `d`-faces, and the column of a face holds sign `(-1)^k` at the subface
/// omitting its `k`-th smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    pub dim: usize,
    pub rows: usize,
    pub cols: usize,
    /// One entry list per column, `(row, sign)`, rows ascending.
    pub columns: Vec<Vec<(usize, i8)>>,
}

impl fmt::Display for BoundaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "boundary_{} ({} x {})", self.dim, self.rows, self.cols)?;
        for (j, col) in self.columns.iter().enumerate() {
            write!(f, "  col {j}:")?;
            for (r, s) in col {
                write!(f, " {}{r}", if *s > 0 { '+' } else { '-' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Build the boundary matrix of one dimension.
pub fn boundary_matrix(
    complex: &SimplicialComplex,
    d: usize,
) -> Result<BoundaryMatrix, HomologyError> {
    let dim = complex.dim().unwrap_or(0);
    if d == 0 || d > dim {
        return Err(HomologyError::DimensionOutOfRange { d, dim });
    }
    let lower = complex.faces_of_dim(d - 1);
    let index: HashMap<&Face, usize> = lower.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut columns = Vec::with_capacity(complex.count(d));
    for face in complex.faces_of_dim(d) {
        let mut col: Vec<(usize, i8)> = (0..=d)
            .map(|k| {
                let sub = face.omit(k).expect("faces of dim >= 1 have subfaces");
                let row = index[&sub];
                (row, if k % 2 == 0 { 1 } else { -1 })
            })
            .collect();
        col.sort_unstable_by_key(|&(r, _)| r);
        columns.push(col);
    }
    Ok(BoundaryMatrix { dim: d, rows: lower.len(), cols: columns.len(), columns })
}

impl BoundaryMatrix {
    /// The matrix rank over the rationals (exact).
    pub fn rank(&self) -> Result<usize, HomologyError> {
        let cols: Vec<Vec<(usize, BigInt)>> = self
            .columns
            .iter()
            .map(|c| c.iter().map(|&(r, s)| (r, BigInt::from(s))).collect())
            .collect();
        rank_of_columns(cols)
    }

    /// The Smith invariant factors (absolute values of the nonzero diagonal
    /// of the Smith normal form), in divisibility order.
    pub fn invariant_factors(&self) -> Result<Vec<BigInt>, HomologyError> {
        let cols: Vec<Vec<(usize, BigInt)>> = self
            .columns
            .iter()
            .map(|c| c.iter().map(|&(r, s)| (r, BigInt::from(s))).collect())
            .collect();
        smith_invariant_factors(cols)
    }
}

/// Is the composition `a ∘ b` (apply `b`, then `a`) the zero map? Used to
/// verify `∂_d ∘ ∂_{d+1} = 0`.
pub fn compose_is_zero(a: &BoundaryMatrix, b: &BoundaryMatrix) -> bool {
    if a.cols != b.rows {
        return false;
    }
    // (a·b) column j = sum over entries (r, s) of b's column j of s * a.col(r).
    for bcol in &b.columns {
        let mut acc: HashMap<usize, i64> = HashMap::new();
        for &(r, s) in bcol {
            for &(ar, asgn) in &a.columns[r] {
                *acc.entry(ar).or_insert(0) += s as i64 * asgn as i64;
            }
        }
        if acc.values().any(|&v| v != 0) {
            return false;
        }
    }
    true
}

/// Betti numbers with an optional torsion report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiVector {
    /// `betti[i]` is the rank of the i-th homology group; one entry per
    /// dimension of the complex (empty for the empty complex).
    pub betti: Vec<usize>,
    /// When requested: per dimension `i`, the invariant factors `> 1` of the
    /// boundary map from dimension `i+1` (the torsion of H_i).
    pub torsion: Option<Vec<Vec<BigInt>>>,
}

/// Betti numbers by exact rank computation:
/// `β_d = #d-faces − rank ∂_d − rank ∂_{d+1}`.
pub fn betti_numbers(complex: &SimplicialComplex) -> BettiVector {
    betti_impl(complex, false).expect("rank computation on boundary matrices cannot exceed limits")
}

/// Betti numbers plus the torsion report (Smith normal form per dimension).
pub fn betti_numbers_with_torsion(complex: &SimplicialComplex) -> BettiVector {
    betti_impl(complex, true).expect("rank computation on boundary matrices cannot exceed limits")
}

fn betti_impl(complex: &SimplicialComplex, torsion: bool) -> Result<BettiVector, HomologyError> {
    let dim = match complex.dim() {
        Some(d) => d,
        None => return Ok(BettiVector { betti: Vec::new(), torsion: torsion.then(Vec::new) }),
    };
    // ranks[d] = rank of boundary_d; boundary_0 and boundary_{dim+1} are zero.
    let mut ranks = vec![0usize; dim + 2];
    let mut factors: Vec<Vec<BigInt>> = vec![Vec::new(); dim + 2];
    for d in 1..=dim {
        let matrix = boundary_matrix(complex, d)?;
        if torsion {
            let f = matrix.invariant_factors()?;
            ranks[d] = f.len();
            factors[d] = f;
        } else {
            ranks[d] = matrix.rank()?;
        }
    }
    let betti = (0..=dim)
        .map(|d| {
            let n = complex.count(d);
            debug_assert!(n >= ranks[d] + ranks[d + 1], "negative betti number");
            n - ranks[d] - ranks[d + 1]
        })
        .collect();
    let torsion = torsion.then(|| {
        (0..=dim)
            .map(|d| {
                factors[d + 1].iter().filter(|f| !f.is_one()).cloned().collect::<Vec<BigInt>>()
            })
            .collect()
    });
    Ok(BettiVector { betti, torsion })
}

/// Number of connected components, by union-find over vertices and edges.
/// Agrees with `β₀` on every complex.
pub fn connected_components(complex: &SimplicialComplex) -> usize {
    let vertices = complex.faces_of_dim(0);
    if vertices.is_empty() {
        return 0;
    }
    let index: HashMap<usize, usize> =
        vertices.iter().enumerate().map(|(i, f)| (f.vertices()[0], i)).collect();
    let mut uf = UnionFind::new(vertices.len());
    for edge in complex.faces_of_dim(1) {
        uf.union(index[&edge.vertices()[0]], index[&edge.vertices()[1]]);
    }
    uf.count()
}

/// Render a betti vector in the homology output format: one `dim betti`
/// line per dimension, then one `torsion dim f1,f2,...` line per dimension
/// that has torsion.
pub fn format_betti_report(b: &BettiVector) -> String {
    let mut out = String::new();
    for (d, beta) in b.betti.iter().enumerate() {
        out.push_str(&format!("{d} {beta}\n"));
    }
    if let Some(torsion) = &b.torsion {
        for (d, factors) in torsion.iter().enumerate() {
            if !factors.is_empty() {
                let list: Vec<String> = factors.iter().map(BigInt::to_string).collect();
                out.push_str(&format!("torsion {d} {}\n", list.join(",")));
            }
        }
    }
    out
}

// --- exact rank and Smith normal form ------------------------------------

/// Remove one ±1-pivot at a time from sparse columns, applying the Schur
/// complement update to the columns that share the pivot row. Returns the
/// number of pivots taken; `columns` keeps the (smaller) residual.
fn unit_pivot_phase(columns: &mut Vec<HashMap<usize, BigInt>>) -> usize {
    let mut rank = 0;
    loop {
        // First column holding a unit entry; smallest such row within it,
        // so the elimination order does not depend on hash iteration order.
        let mut found: Option<(usize, usize, BigInt)> = None;
        for (ci, col) in columns.iter().enumerate() {
            let unit = col.iter().filter(|(_, v)| v.magnitude().is_one()).min_by_key(|(r, _)| **r);
            if let Some((&r, v)) = unit {
                found = Some((ci, r, v.clone()));
                break;
            }
        }
        let Some((ci, row, value)) = found else { break };
        let pivot = columns.swap_remove(ci);
        rank += 1;
        for col in columns.iter_mut() {
            let Some(coeff) = col.remove(&row) else { continue };
            // value is ±1, so the exact multiplier is coeff * value.
            let mult = coeff * &value;
            for (&r, pv) in &pivot {
                if r == row {
                    continue;
                }
                let entry = col.entry(r).or_insert_with(BigInt::zero);
                *entry -= &mult * pv;
                if entry.is_zero() {
                    col.remove(&r);
                }
            }
        }
        columns.retain(|c| !c.is_empty());
    }
    rank
}

/// Exact rank of an integer matrix given as sparse columns.
fn rank_of_columns(columns: Vec<Vec<(usize, BigInt)>>) -> Result<usize, HomologyError> {
    let mut cols: Vec<HashMap<usize, BigInt>> = columns
        .into_iter()
        .map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect())
        .filter(|c: &HashMap<usize, BigInt>| !c.is_empty())
        .collect();
    let mut rank = unit_pivot_phase(&mut cols);
    if !cols.is_empty() {
        rank += bareiss_rank(densify(&cols)?);
    }
    Ok(rank)
}

/// Pack sparse residual columns into a dense row-major matrix.
fn densify(cols: &[HashMap<usize, BigInt>]) -> Result<Vec<Vec<BigInt>>, HomologyError> {
    if cols.len() > DENSE_COLUMN_LIMIT {
        return Err(HomologyError::TooLarge { cols: cols.len() });
    }
    let live_rows: BTreeSet<usize> = cols.iter().flat_map(|c| c.keys().copied()).collect();
    let row_index: HashMap<usize, usize> =
        live_rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut dense = vec![vec![BigInt::zero(); cols.len()]; live_rows.len()];
    for (j, col) in cols.iter().enumerate() {
        for (r, v) in col {
            dense[row_index[r]][j] = v.clone();
        }
    }
    Ok(dense)
}

/// Fraction-free (Bareiss) elimination rank with smallest-magnitude
/// pivoting; all divisions are exact.
fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut prev = BigInt::one();
    let mut pr = 0;
    for pc in 0..cols {
        let pivot_row = (pr..rows)
            .filter(|&i| !m[i][pc].is_zero())
            .min_by(|&a, &b| m[a][pc].magnitude().cmp(m[b][pc].magnitude()));
        let Some(pivot_row) = pivot_row else { continue };
        m.swap(pr, pivot_row);
        for i in pr + 1..rows {
            for j in pc + 1..cols {
                let num = &m[i][j] * &m[pr][pc] - &m[i][pc] * &m[pr][j];
                m[i][j] = num / &prev;
            }
            m[i][pc] = BigInt::zero();
        }
        prev = m[pr][pc].clone();
        pr += 1;
        if pr == rows {
            break;
        }
    }
    pr
}

/// Smith invariant factors (nonzero diagonal of the Smith normal form) of a
/// sparse-column integer matrix, in divisibility order.
///
/// Unit pivots peel off factor-1 diagonal entries unimodularly (the Schur
/// update is exactly the corresponding row/column elimination); the dense
/// remainder gets the textbook reduction.
fn smith_invariant_factors(
    columns: Vec<Vec<(usize, BigInt)>>,
) -> Result<Vec<BigInt>, HomologyError> {
    let mut cols: Vec<HashMap<usize, BigInt>> = columns
        .into_iter()
        .map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect())
        .filter(|c: &HashMap<usize, BigInt>| !c.is_empty())
        .collect();
    let units = unit_pivot_phase(&mut cols);
    let mut factors = vec![BigInt::one(); units];
    if !cols.is_empty() {
        factors.extend(dense_smith(densify(&cols)?));
    }
    Ok(factors)
}

/// Textbook Smith reduction on a dense matrix; returns the nonzero diagonal.
// Row/column elimination reads one row while writing another, so plain
// index loops are the clear form here.
#[allow(clippy::needless_range_loop)]
fn dense_smith(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut t = 0;
    let mut factors = Vec::new();
    while t < rows.min(cols) {
        // Smallest-magnitude nonzero pivot in the trailing submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero()
                    && pivot
                        .map(|(pi, pj)| m[i][j].magnitude() < m[pi][pj].magnitude())
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            // Reduce the pivot row and column by exact quotients.
            for i in t + 1..rows {
                if !m[i][t].is_zero() {
                    let q = &m[i][t] / &m[t][t];
                    if !q.is_zero() {
                        for j in t..cols {
                            let sub = &q * &m[t][j];
                            m[i][j] -= sub;
                        }
                    }
                }
            }
            for j in t + 1..cols {
                if !m[t][j].is_zero() {
                    let q = &m[t][j] / &m[t][t];
                    if !q.is_zero() {
                        for i in t..rows {
                            let sub = &q * &m[i][t];
                            m[i][j] -= sub;
                        }
                    }
                }
            }
            let col_clear = (t + 1..rows).all(|i| m[i][t].is_zero());
            let row_clear = (t + 1..cols).all(|j| m[t][j].is_zero());
            if col_clear && row_clear {
                // Enforce the divisibility chain before accepting the pivot.
                let offender = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&m[i][j] % &m[t][t]).is_zero());
                match offender {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            let add = m[i][j].clone();
                            m[t][j] += add;
                        }
                    }
                }
            } else if col_clear || row_clear {
                // Remainders left the pivot too large; pick the new smallest
                // entry in the pivot row/column and continue reducing.
                let mut best = (t, t);
                for i in t..rows {
                    if !m[i][t].is_zero() && m[i][t].magnitude() < m[best.0][best.1].magnitude() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    if !m[t][j].is_zero() && m[t][j].magnitude() < m[best.0][best.1].magnitude() {
                        best = (t, j);
                    }
                }
                m.swap(t, best.0.max(t));
                if best.1 > t {
                    for row in m.iter_mut() {
                        row.swap(t, best.1);
                    }
                }
            }
        }
        factors.push(m[t][t].abs());
        t += 1;
    }
    factors
}

// --- union-find -----------------------------------------------------------

/// Minimal union-find with path halving; enough for component counting.
struct UnionFind {
    parent: Vec<usize>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), components: n }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
            self.components -= 1;
        }
    }

    fn count(&self) -> usize {
        self.components
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::maximalize;

    fn face(v: &[usize]) -> Face {
        Face::new(v.to_vec()).unwrap()
    }

    fn complex_of(faces: &[&[usize]]) -> SimplicialComplex {
        closure(&maximalize(faces.iter().map(|v| face(v))))
    }

    #[test]
    fn closure_of_a_triangle_is_its_power_set() {
        let c = complex_of(&[&[1, 2, 3]]);
        assert_eq!(c.count(0), 3);
        assert_eq!(c.count(1), 3);
        assert_eq!(c.count(2), 1);
        assert_eq!(c.dim(), Some(2));
    }

    #[test]
    fn closure_of_a_vertex() {
        let c = complex_of(&[&[7]]);
        assert_eq!(c.total_faces(), 1);
        assert_eq!(c.dim(), Some(0));
    }

    #[test]
    fn edge_boundary_signs() {
        // Omitting vertex 1 (k = 0) leaves {2} with sign +1.
        let c = complex_of(&[&[1, 2]]);
        let b = boundary_matrix(&c, 1).unwrap();
        assert_eq!(b.columns, vec![vec![(0, -1), (1, 1)]]);
    }

    #[test]
    fn triangle_boundary_signs() {
        let c = complex_of(&[&[1, 2, 3]]);
        let b = boundary_matrix(&c, 2).unwrap();
        // Rows are {1,2}, {1,3}, {2,3}; omit-k signs are +, -, + on
        // {2,3}, {1,3}, {1,2} respectively.
        assert_eq!(b.columns, vec![vec![(0, 1), (1, -1), (2, 1)]]);
    }

    #[test]
    fn boundary_composes_to_zero() {
        let c = complex_of(&[&[1, 2, 3, 4], &[3, 4, 5], &[5, 6]]);
        for d in 1..c.dim().unwrap() {
            let a = boundary_matrix(&c, d).unwrap();
            let b = boundary_matrix(&c, d + 1).unwrap();
            assert!(compose_is_zero(&a, &b), "∂_{d} ∘ ∂_{} != 0", d + 1);
        }
    }

    #[test]
    fn filled_triangle_betti() {
        let b = betti_numbers(&complex_of(&[&[1, 2, 3]]));
        assert_eq!(b.betti, vec![1, 0, 0]);
    }

    #[test]
    fn hollow_triangle_betti() {
        let b = betti_numbers(&complex_of(&[&[1, 2], &[1, 3], &[2, 3]]));
        assert_eq!(b.betti, vec![1, 1]);
    }

    #[test]
    fn two_vertices_betti() {
        let b = betti_numbers(&complex_of(&[&[1], &[2]]));
        assert_eq!(b.betti, vec![2]);
    }

    #[test]
    fn tetrahedron_shell_betti() {
        // The boundary of a 3-simplex is a 2-sphere.
        let b = betti_numbers(&complex_of(&[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4]]));
        assert_eq!(b.betti, vec![1, 0, 1]);
    }

    #[test]
    fn empty_complex_betti() {
        let b = betti_numbers(&SimplicialComplex::empty());
        assert!(b.betti.is_empty());
    }

    #[test]
    fn projective_plane_betti_and_torsion() {
        // Minimal 6-vertex triangulation of the real projective plane:
        // rational betti (1, 0, 0) but H_1 carries Z/2 torsion.
        let c = complex_of(&[
            &[1, 2, 3],
            &[1, 2, 4],
            &[1, 3, 5],
            &[1, 4, 6],
            &[1, 5, 6],
            &[2, 3, 6],
            &[2, 4, 5],
            &[2, 5, 6],
            &[3, 4, 5],
            &[3, 4, 6],
        ]);
        assert_eq!(c.count(0), 6);
        assert_eq!(c.count(1), 15);
        assert_eq!(c.count(2), 10);
        let b = betti_numbers_with_torsion(&c);
        assert_eq!(b.betti, vec![1, 0, 0]);
        let torsion = b.torsion.unwrap();
        assert_eq!(torsion[0], Vec::<BigInt>::new());
        assert_eq!(torsion[1], vec![BigInt::from(2)]);
        assert_eq!(torsion[2], Vec::<BigInt>::new());
    }

    #[test]
    fn torsion_free_complexes_report_empty_torsion() {
        let b = betti_numbers_with_torsion(&complex_of(&[&[1, 2, 3], &[3, 4]]));
        assert_eq!(b.betti, vec![1, 0, 0]);
        assert!(b.torsion.unwrap().iter().all(Vec::is_empty));
    }

    #[test]
    fn components_match_beta_zero() {
        let c = complex_of(&[&[1, 2, 3], &[4, 5], &[6]]);
        assert_eq!(connected_components(&c), 3);
        assert_eq!(betti_numbers(&c).betti[0], 3);
        assert_eq!(connected_components(&SimplicialComplex::empty()), 0);
    }

    #[test]
    fn single_maximal_face_is_one_component() {
        let c = complex_of(&[&[2, 4, 6, 8]]);
        assert_eq!(connected_components(&c), 1);
    }

    #[test]
    fn isolated_vertices_count() {
        let c = complex_of(&[&[1], &[3], &[5], &[9]]);
        assert_eq!(connected_components(&c), 4);
        assert_eq!(betti_numbers(&c).betti, vec![4]);
    }

    #[test]
    fn betti_is_invariant_under_vertex_renaming() {
        let a = complex_of(&[&[1, 2, 3], &[3, 4], &[5, 6], &[6, 7], &[5, 7]]);
        // Rename i -> 10 * i + 1 (order-preserving is not required in general,
        // but Face normalizes ordering anyway).
        let renamed: Vec<Vec<usize>> = a
            .faces()
            .map(|f| f.vertices().iter().map(|v| 10 * v + 1).collect())
            .collect();
        let b = closure(&maximalize(
            renamed.into_iter().map(|v| Face::from_set(v).unwrap()),
        ));
        assert_eq!(betti_numbers(&a).betti, betti_numbers(&b).betti);
    }

    #[test]
    fn report_format() {
        let b = betti_numbers_with_torsion(&complex_of(&[&[1, 2], &[1, 3], &[2, 3]]));
        assert_eq!(format_betti_report(&b), "0 1\n1 1\n");
    }

    #[test]
    fn dimension_out_of_range_is_rejected() {
        let c = complex_of(&[&[1, 2]]);
        assert!(matches!(
            boundary_matrix(&c, 2),
            Err(HomologyError::DimensionOutOfRange { d: 2, dim: 1 })
        ));
        assert!(matches!(boundary_matrix(&c, 0), Err(HomologyError::DimensionOutOfRange { .. })));
    }
}
