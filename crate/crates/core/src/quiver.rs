//! The quiver of an n-triangulation and quiver mutation.
//!
//! Each triangle is subdivided by the lattice `x0 + x1 + x2 = n`, where `xi`
//! is the barycentric weight of corner `i`. Lattice points on side `k` have
//! `x_{k+2} = 0` and sit at position `x_{k+1}` counted from corner `k`.
//! Inside every triangle, each small upward triangle contributes three
//! arrows running counter-clockwise, i.e. parallel to the triangle's sides.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::surface::{FlipRecord, Slot, Triangulation, TriangulationIso};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuiverError {
    #[error("rank n must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("vertex {index} out of range for a quiver with {len} vertices")]
    VertexOutOfRange { index: usize, len: usize },
    #[error("quivers have different ranks or sizes ({0} vs {1} vertices)")]
    Mismatch(usize, usize),
    #[error("matrix is not skew-symmetric at ({0}, {1})")]
    NotSkew(usize, usize),
    #[error("{0} is not a permutation")]
    NotPermutation(String),
    #[error("vertex {0} has no counterpart")]
    Untransportable(String),
}

/// A vertex of the n-triangulation that is not a puncture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuiverVertex {
    /// Position `1..n-1` along the edge, measured in its canonical direction.
    Edge { edge: usize, position: usize },
    /// Interior lattice point with strictly positive corner weights.
    Face { triangle: usize, weights: [usize; 3] },
}

impl fmt::Display for QuiverVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuiverVertex::Edge { edge, position } => write!(f, "edge {edge} @ {position}"),
            QuiverVertex::Face { triangle, weights: [a, b, c] } => {
                write!(f, "triangle {triangle} @ ({a},{b},{c})")
            }
        }
    }
}

/// Interior weights of one triangle in lexicographic order.
pub fn interior_weights(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 1..n {
        for b in 1..n - a {
            out.push([a, b, n - a - b]);
        }
    }
    out
}

/// All lattice points of one triangle.
pub fn lattice(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..=n {
        for b in 0..=n - a {
            out.push([a, b, n - a - b]);
        }
    }
    out
}

/// A skew-symmetric exchange matrix with labeled vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    rank: usize,
    vertices: Vec<QuiverVertex>,
    epsilon: Vec<Vec<i32>>,
}

impl Quiver {
    /// A quiver from raw data; `rank` is informational for unlabeled quivers.
    pub fn from_matrix(rank: usize, vertices: Vec<QuiverVertex>, epsilon: Vec<Vec<i32>>) -> Result<Self, QuiverError> {
        let l = epsilon.len();
        if vertices.len() != l || epsilon.iter().any(|r| r.len() != l) {
            return Err(QuiverError::Mismatch(vertices.len(), l));
        }
        for i in 0..l {
            for j in 0..=i {
                if epsilon[i][j] != -epsilon[j][i] {
                    return Err(QuiverError::NotSkew(i, j));
                }
            }
        }
        Ok(Quiver { rank, vertices, epsilon })
    }

    /// An unlabeled quiver, vertices named as free positions.
    pub fn unlabeled(epsilon: Vec<Vec<i32>>) -> Result<Self, QuiverError> {
        let vertices = (0..epsilon.len()).map(|i| QuiverVertex::Edge { edge: i, position: 1 }).collect();
        Self::from_matrix(2, vertices, epsilon)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[QuiverVertex] {
        &self.vertices
    }

    pub fn epsilon(&self) -> &[Vec<i32>] {
        &self.epsilon
    }

    pub fn entry(&self, i: usize, j: usize) -> i32 {
        self.epsilon[i][j]
    }

    pub fn index_of(&self, v: &QuiverVertex) -> Option<usize> {
        self.vertices.iter().position(|w| w == v)
    }

    /// Mutation at `k`.
    pub fn mutate(&self, k: usize) -> Result<Self, QuiverError> {
        let l = self.len();
        if k >= l {
            return Err(QuiverError::VertexOutOfRange { index: k, len: l });
        }
        let e = &self.epsilon;
        let mut out = e.clone();
        for i in 0..l {
            for j in 0..l {
                out[i][j] = if i == k || j == k {
                    -e[i][j]
                } else {
                    e[i][j] + (e[i][k].abs() * e[k][j] + e[i][k] * e[k][j].abs()) / 2
                };
            }
        }
        Ok(Quiver { rank: self.rank, vertices: self.vertices.clone(), epsilon: out })
    }

    /// The quiver with vertex `i` taken from vertex `perm[i]` of `self`.
    pub fn pull_back(&self, perm: &[usize]) -> Result<Self, QuiverError> {
        check_permutation(perm, self.len())?;
        let epsilon = perm.iter().map(|&a| perm.iter().map(|&b| self.epsilon[a][b]).collect()).collect();
        let vertices = perm.iter().map(|&a| self.vertices[a]).collect();
        Ok(Quiver { rank: self.rank, vertices, epsilon })
    }

    /// Equality of exchange matrices, ignoring labels.
    pub fn same_matrix(&self, other: &Quiver) -> bool {
        self.epsilon == other.epsilon
    }

    /// An integer basis of the kernel of ε. Each vector `k` gives a monomial
    /// `Π y_i^{k_i}` invariant under every mutation sequence that returns to
    /// this quiver.
    pub fn kernel_basis(&self) -> Vec<Vec<i64>> {
        integer_kernel(&self.epsilon)
    }

    /// `from -> to (xk)` lines, one per positive entry, 1-based names.
    pub fn arrow_list(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                let w = self.epsilon[i][j];
                if w > 0 {
                    let mult = if w > 1 { format!(" (x{w})") } else { String::new() };
                    out.push_str(&format!("y{} -> y{}{}\n", i + 1, j + 1, mult));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serializes")
    }
}

impl fmt::Display for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "quiver: rank {}, {} vertices", self.rank, self.len())?;
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(f, "  y{} = {v}", i + 1)?;
        }
        write!(f, "{}", self.arrow_list())
    }
}

pub fn check_permutation(perm: &[usize], len: usize) -> Result<(), QuiverError> {
    let mut seen = vec![false; len];
    if perm.len() != len {
        return Err(QuiverError::NotPermutation(format!("{perm:?} (length {}, expected {len})", perm.len())));
    }
    for &p in perm {
        if p >= len || std::mem::replace(&mut seen[p], true) {
            return Err(QuiverError::NotPermutation(format!("{perm:?}")));
        }
    }
    Ok(())
}

pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

fn integer_kernel(m: &[Vec<i32>]) -> Vec<Vec<i64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<BigRational>> =
        m.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..cols {
                    let d = &f * &a[row][c];
                    a[r][c] = &a[r][c] - d;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free].clone();
        }
        let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let sign = if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) { -1 } else { 1 };
        basis.push(ints.iter().map(|x| (x / &g).to_i64().expect("small kernel entries") * sign).collect());
    }
    basis
}

/// Index arithmetic for the canonical vertex order of a triangulation:
/// edge vertices by edge then position, then interior vertices by triangle
/// then lexicographic weights.
#[derive(Debug, Clone)]
pub struct VertexIndex {
    n: usize,
    edges: usize,
    interior: HashMap<[usize; 3], usize>,
}

impl VertexIndex {
    pub fn new(tri: &Triangulation, n: usize) -> Self {
        let interior = interior_weights(n).into_iter().enumerate().map(|(i, w)| (w, i)).collect();
        VertexIndex { n, edges: tri.edge_count(), interior }
    }

    pub fn len(&self, tri: &Triangulation) -> usize {
        self.edges * (self.n - 1) + tri.triangle_count() * self.interior.len()
    }

    pub fn edge(&self, e: usize, position: usize) -> usize {
        e * (self.n - 1) + position - 1
    }

    pub fn face(&self, t: usize, w: [usize; 3]) -> usize {
        self.edges * (self.n - 1) + t * self.interior.len() + self.interior[&w]
    }

    /// The vertex at lattice point `w` of triangle `t`; `None` at corners.
    pub fn point(&self, tri: &Triangulation, t: usize, w: [usize; 3]) -> Option<usize> {
        self.point_label(tri, t, w).map(|v| self.index(&v))
    }

    pub fn point_label(&self, tri: &Triangulation, t: usize, w: [usize; 3]) -> Option<QuiverVertex> {
        if w.iter().all(|&x| x > 0) {
            return Some(QuiverVertex::Face { triangle: t, weights: w });
        }
        let zeros: Vec<usize> = (0..3).filter(|&i| w[i] == 0).collect();
        if zeros.len() != 1 {
            return None;
        }
        let k = (zeros[0] + 1) % 3;
        let (e, end) = tri.edge_at(Slot(t, k));
        let pos = w[(k + 1) % 3];
        Some(QuiverVertex::Edge { edge: e, position: if end == 0 { pos } else { self.n - pos } })
    }

    pub fn index(&self, v: &QuiverVertex) -> usize {
        match *v {
            QuiverVertex::Edge { edge, position } => self.edge(edge, position),
            QuiverVertex::Face { triangle, weights } => self.face(triangle, weights),
        }
    }

    /// Lattice point of edge vertex `(e, position)` seen from the first
    /// gluing slot of `e`.
    pub fn edge_point(&self, tri: &Triangulation, e: usize, position: usize) -> (usize, [usize; 3]) {
        let Slot(t, k) = tri.gluing()[e][0];
        let mut w = [0; 3];
        w[k] = self.n - position;
        w[(k + 1) % 3] = position;
        (t, w)
    }
}

pub fn vertex_labels(tri: &Triangulation, n: usize) -> Vec<QuiverVertex> {
    let mut out = Vec::new();
    for e in 0..tri.edge_count() {
        for p in 1..n {
            out.push(QuiverVertex::Edge { edge: e, position: p });
        }
    }
    for t in 0..tri.triangle_count() {
        for w in interior_weights(n) {
            out.push(QuiverVertex::Face { triangle: t, weights: w });
        }
    }
    out
}

/// The quiver of the n-triangulation of `tri`.
pub fn build_quiver(tri: &Triangulation, n: usize) -> Result<Quiver, QuiverError> {
    if n < 2 {
        return Err(QuiverError::RankTooSmall(n));
    }
    let idx = VertexIndex::new(tri, n);
    let vertices = vertex_labels(tri, n);
    let l = vertices.len();
    let mut eps = vec![vec![0i32; l]; l];
    for t in 0..tri.triangle_count() {
        for w in lattice(n) {
            for k in 0..3 {
                if w[k] >= 1 && w[(k + 2) % 3] >= 1 {
                    let mut w2 = w;
                    w2[k] -= 1;
                    w2[(k + 1) % 3] += 1;
                    let a = idx.point(tri, t, w).expect("not a corner");
                    let b = idx.point(tri, t, w2).expect("not a corner");
                    eps[a][b] += 1;
                    eps[b][a] -= 1;
                }
            }
        }
    }
    Ok(Quiver { rank: n, vertices, epsilon: eps })
}

/// `psi[v]`: the vertex of `dst` that the isomorphism carries vertex `v` of
/// `src` to.
pub fn vertex_bijection(
    src: &Triangulation,
    dst: &Triangulation,
    iso: &TriangulationIso,
    n: usize,
) -> Result<Vec<usize>, QuiverError> {
    if n < 2 {
        return Err(QuiverError::RankTooSmall(n));
    }
    let si = VertexIndex::new(src, n);
    let di = VertexIndex::new(dst, n);
    if si.len(src) != di.len(dst) {
        return Err(QuiverError::Mismatch(si.len(src), di.len(dst)));
    }
    let rotate = |w: [usize; 3], r: usize| {
        let mut out = [0; 3];
        for i in 0..3 {
            out[(i + r) % 3] = w[i];
        }
        out
    };
    let psi = vertex_labels(src, n)
        .into_iter()
        .map(|v| {
            let (t, w) = match v {
                QuiverVertex::Face { triangle, weights } => (triangle, weights),
                QuiverVertex::Edge { edge, position } => si.edge_point(src, edge, position),
            };
            let (t2, r) = iso.triangle(t);
            di.point(dst, t2, rotate(w, r)).ok_or_else(|| QuiverError::Untransportable(v.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_permutation(&psi, psi.len())?;
    Ok(psi)
}

/// Vertex data of one flip: which vertices are mutated and how labels move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipCorrespondence {
    /// Mutation layers, as vertex indices of the quiver before the flip.
    pub layers: Vec<Vec<usize>>,
    /// `perm[v]`: index after the flip of the vertex that `v` becomes.
    pub perm: Vec<usize>,
}

impl FlipCorrespondence {
    pub fn mutation_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }
}

/// Quadrilateral coordinates `(X, Y)` of a lattice point of the two
/// triangles of a flip, shared between the triangulations before and after.
/// The old diagonal is `X = Y`.
fn quad_before(w: [usize; 3], k: usize, first: bool) -> (usize, usize) {
    if first {
        let (q, r) = (w[(k + 1) % 3], w[(k + 2) % 3]);
        (q, q + r)
    } else {
        let (q, s) = (w[k], w[(k + 2) % 3]);
        (q + s, q)
    }
}

fn quad_after(w: [usize; 3], first: bool) -> (usize, usize) {
    if first {
        let [s, q, r] = w;
        (s + q, q + r)
    } else {
        let [r, _, s] = w;
        (s, r)
    }
}

/// The mutation layers and label correspondence of flipping `record.edge`.
///
/// Points of the quadrilateral are grouped by their distance `|Y − X|` from
/// the diagonal. Layer `j` (for `j = 1..n-1`) holds the points with
/// `|Y − X| ≤ j − 1` of the same parity as `j − 1` lying at least `h + 1`
/// steps inside the quadrilateral, where `h = (j − 1 − |Y − X|) / 2`; it has
/// `j(n − j)` points. Layer 1 is the flipped edge itself.
pub fn flip_correspondence(record: &FlipRecord, n: usize) -> Result<FlipCorrespondence, QuiverError> {
    if n < 2 {
        return Err(QuiverError::RankTooSmall(n));
    }
    let (before, after, e) = (&record.before, &record.after, record.edge);
    let [Slot(t, k), Slot(t2, k2)] = before.gluing()[e];
    let bi = VertexIndex::new(before, n);
    let ai = VertexIndex::new(after, n);
    let mut old_loc: Vec<(usize, (usize, usize))> = Vec::new();
    for (first, tt, kk) in [(true, t, k), (false, t2, k2)] {
        for w in lattice(n) {
            let Some(v) = bi.point_label(before, tt, w) else { continue };
            let inside = matches!(v, QuiverVertex::Face { .. })
                || matches!(v, QuiverVertex::Edge { edge, .. } if edge == e);
            if inside {
                let i = bi.index(&v);
                if !old_loc.iter().any(|(j, _)| *j == i) {
                    old_loc.push((i, quad_before(w, kk, first)));
                }
            }
        }
    }
    let mut new_at: HashMap<(usize, usize), usize> = HashMap::new();
    for (first, tt) in [(true, t), (false, t2)] {
        for w in lattice(n) {
            let Some(v) = ai.point_label(after, tt, w) else { continue };
            let inside = matches!(v, QuiverVertex::Face { .. })
                || matches!(v, QuiverVertex::Edge { edge, .. } if edge == e);
            if inside {
                new_at.insert(quad_after(w, first), ai.index(&v));
            }
        }
    }
    let l = bi.len(before);
    let mut perm: Vec<usize> = (0..l).collect();
    for &(i, x) in &old_loc {
        perm[i] = *new_at.get(&x).ok_or_else(|| QuiverError::Untransportable(format!("quad point {x:?}")))?;
    }
    // vertices off the quadrilateral keep their labels
    check_permutation(&perm, l)?;
    let mut layers = Vec::new();
    for j in 1..n {
        let mut layer: Vec<usize> = old_loc
            .iter()
            .filter(|(_, (x, y))| {
                let d = x.abs_diff(*y);
                if d > j - 1 || (j - 1 - d) % 2 != 0 {
                    return false;
                }
                let h = (j - 1 - d) / 2;
                let p = n - x.max(y);
                let q = *x.min(y);
                p > h && q > h
            })
            .map(|(i, _)| *i)
            .collect();
        layer.sort_unstable();
        layers.push(layer);
    }
    Ok(FlipCorrespondence { layers, perm })
}

/// Figure order for the once-punctured torus: reference variable `y_{i+1}`
/// is canonical vertex `order[i]`. Defined for `n = 2` (edges a, c, b) and
/// `n = 3`.
pub fn torus_reference_order(n: usize) -> Option<Vec<usize>> {
    match n {
        2 => Some(vec![0, 2, 1]),
        3 => Some(vec![0, 1, 5, 6, 3, 4, 2, 7]),
        _ => None,
    }
}
