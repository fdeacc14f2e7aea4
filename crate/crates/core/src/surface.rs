//! Ideal triangulations of punctured surfaces, flips and mapping-class words.
//!
//! A triangulation is a set of oriented triangles whose sides are glued in
//! pairs. Side `k` of triangle `t` is the slot `(t, k)`; it runs from corner
//! `k` to corner `k + 1` (indices mod 3) in counter-clockwise order. Gluing
//! two counter-clockwise sides always reverses direction, so every
//! triangulation given this way is orientable and consistently oriented.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Side `1` of triangle `0` is `Slot(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slot(pub usize, pub usize);

impl Slot {
    pub fn triangle(self) -> usize {
        self.0
    }

    pub fn side(self) -> usize {
        self.1
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.0, self.1)
    }
}

/// One violated invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Issue {
    Empty,
    MalformedTriangle { triangle: usize },
    OrientationClash { triangle: usize },
    SlotOutOfRange { edge: usize },
    DanglingSlot { slot: Slot },
    SlotGluedTwice { slot: Slot },
    SelfFolded { edge: usize },
    Disconnected,
    Genus0FewPunctures { punctures: usize },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::Empty => write!(f, "triangulation has no triangles"),
            Issue::MalformedTriangle { triangle } => {
                write!(f, "triangle {triangle} must list its own three slots")
            }
            Issue::OrientationClash { triangle } => {
                write!(f, "orientation clash: triangle {triangle} lists its sides clockwise")
            }
            Issue::SlotOutOfRange { edge } => write!(f, "edge {edge} references a slot that does not exist"),
            Issue::DanglingSlot { slot } => write!(f, "dangling slot {slot} is not glued to anything"),
            Issue::SlotGluedTwice { slot } => write!(f, "slot {slot} is glued more than once"),
            Issue::SelfFolded { edge } => write!(f, "self-folded edge {edge}: both sides lie in one triangle"),
            Issue::Disconnected => write!(f, "surface is not connected"),
            Issue::Genus0FewPunctures { punctures } => {
                write!(f, "genus-0 needs >3 punctures (found {punctures})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SurfaceError {
    #[error("invalid triangulation: {}", join_issues(.0))]
    Invalid(Vec<Issue>),
    #[error("malformed triangulation JSON: {0}")]
    Json(String),
    #[error("edge {0} does not exist")]
    NoSuchEdge(usize),
    #[error("edge {0} is not flippable: both sides lie in one triangle")]
    Unflippable(usize),
    #[error("torus letters L and R need the built-in once-punctured torus")]
    NotTorus,
    #[error("unknown letter {0:?} in mapping word (expected L or R)")]
    BadLetter(char),
    #[error("relabeling is not an isomorphism of triangulations: {0}")]
    BadRelabeling(String),
}

fn join_issues(issues: &[Issue]) -> String {
    issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Serialize, Deserialize)]
struct TriangulationJson {
    triangles: Vec<Vec<Slot>>,
    gluing: Vec<[Slot; 2]>,
}

/// A validated, consistently oriented ideal triangulation.
///
/// Edge `e` is glued between the slots `gluing[e][0]` and `gluing[e][1]`;
/// the first slot fixes the edge's canonical direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triangulation {
    triangle_count: usize,
    gluing: Vec<[Slot; 2]>,
    slot_edge: Vec<(usize, usize)>,
}

pub fn validate_parts(triangles: &[Vec<Slot>], gluing: &[[Slot; 2]]) -> Vec<Issue> {
    let mut issues = Vec::new();
    let f = triangles.len();
    if f == 0 {
        return vec![Issue::Empty];
    }
    for (t, sides) in triangles.iter().enumerate() {
        if sides.len() != 3 || sides.iter().any(|s| s.0 != t || s.1 > 2) {
            issues.push(Issue::MalformedTriangle { triangle: t });
            continue;
        }
        let c: Vec<usize> = sides.iter().map(|s| s.1).collect();
        let distinct: BTreeSet<usize> = c.iter().copied().collect();
        if distinct.len() != 3 {
            issues.push(Issue::MalformedTriangle { triangle: t });
        } else if (c[1] + 3 - c[0]) % 3 != 1 {
            issues.push(Issue::OrientationClash { triangle: t });
        }
    }
    let mut seen = vec![0usize; 3 * f];
    for (e, pair) in gluing.iter().enumerate() {
        if pair.iter().any(|s| s.0 >= f || s.1 > 2) {
            issues.push(Issue::SlotOutOfRange { edge: e });
            continue;
        }
        for s in pair {
            seen[3 * s.0 + s.1] += 1;
        }
        if pair[0].0 == pair[1].0 {
            issues.push(Issue::SelfFolded { edge: e });
        }
    }
    for (i, &count) in seen.iter().enumerate() {
        let slot = Slot(i / 3, i % 3);
        match count {
            0 => issues.push(Issue::DanglingSlot { slot }),
            1 => {}
            _ => issues.push(Issue::SlotGluedTwice { slot }),
        }
    }
    if !issues.is_empty() {
        return issues;
    }
    let raw = Triangulation::from_parts_unchecked(f, gluing.to_vec());
    if !raw.is_connected() {
        issues.push(Issue::Disconnected);
        return issues;
    }
    if raw.genus() == 0 && raw.puncture_count() <= 3 {
        issues.push(Issue::Genus0FewPunctures { punctures: raw.puncture_count() });
    }
    issues
}

/// Checks every invariant of a triangulation given as raw parts.
pub fn validate(triangles: &[Vec<Slot>], gluing: &[[Slot; 2]]) -> Result<(), Vec<Issue>> {
    let issues = validate_parts(triangles, gluing);
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

fn canonical_triangles(f: usize) -> Vec<Vec<Slot>> {
    (0..f).map(|t| (0..3).map(|k| Slot(t, k)).collect()).collect()
}

impl Triangulation {
    /// Builds and validates a triangulation from its gluing table, with
    /// every triangle in counter-clockwise corner order.
    pub fn new(triangle_count: usize, gluing: Vec<[Slot; 2]>) -> Result<Self, SurfaceError> {
        validate(&canonical_triangles(triangle_count), &gluing).map_err(SurfaceError::Invalid)?;
        Ok(Self::from_parts_unchecked(triangle_count, gluing))
    }

    fn from_parts_unchecked(triangle_count: usize, gluing: Vec<[Slot; 2]>) -> Self {
        let mut slot_edge = vec![(usize::MAX, 0); 3 * triangle_count];
        for (e, pair) in gluing.iter().enumerate() {
            for (side, s) in pair.iter().enumerate() {
                slot_edge[3 * s.0 + s.1] = (e, side);
            }
        }
        Triangulation { triangle_count, gluing, slot_edge }
    }

    pub fn from_json(text: &str) -> Result<Self, SurfaceError> {
        let raw: TriangulationJson = serde_json::from_str(text).map_err(|e| SurfaceError::Json(e.to_string()))?;
        validate(&raw.triangles, &raw.gluing).map_err(SurfaceError::Invalid)?;
        // a rotated listing is the same oriented triangle, so only the gluing matters
        Ok(Self::from_parts_unchecked(raw.triangles.len(), raw.gluing))
    }

    /// Canonical JSON: triangles listed as `[[t,0],[t,1],[t,2]]`.
    pub fn to_json(&self) -> String {
        let raw = TriangulationJson { triangles: canonical_triangles(self.triangle_count), gluing: self.gluing.clone() };
        serde_json::to_string(&raw).expect("plain data serializes")
    }

    pub fn triangle_count(&self) -> usize {
        self.triangle_count
    }

    pub fn edge_count(&self) -> usize {
        self.gluing.len()
    }

    pub fn gluing(&self) -> &[[Slot; 2]] {
        &self.gluing
    }

    /// Edge glued at `slot` and which end of the gluing pair it is (0 or 1).
    pub fn edge_at(&self, slot: Slot) -> (usize, usize) {
        self.slot_edge[3 * slot.0 + slot.1]
    }

    /// The slot glued to `slot`.
    pub fn partner(&self, slot: Slot) -> Slot {
        let (e, side) = self.edge_at(slot);
        self.gluing[e][1 - side]
    }

    pub fn is_flippable(&self, e: usize) -> bool {
        self.gluing.get(e).is_some_and(|p| p[0].0 != p[1].0)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.triangle_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(t) = stack.pop() {
            for k in 0..3 {
                let u = self.partner(Slot(t, k)).0;
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Corner classes: `classes[3t + i]` is the puncture at corner `i` of `t`.
    pub fn puncture_labels(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..3 * self.triangle_count).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let union = |p: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(p, a), find(p, b));
            if ra != rb {
                p[ra.max(rb)] = ra.min(rb);
            }
        };
        for [a, b] in &self.gluing {
            // side k of a runs corner k -> k+1; glued reversed onto b
            union(&mut parent, 3 * a.0 + a.1, 3 * b.0 + (b.1 + 1) % 3);
            union(&mut parent, 3 * a.0 + (a.1 + 1) % 3, 3 * b.0 + b.1);
        }
        let mut labels = vec![usize::MAX; parent.len()];
        let mut next = 0;
        for i in 0..parent.len() {
            let r = find(&mut parent, i);
            if labels[r] == usize::MAX {
                labels[r] = next;
                next += 1;
            }
            labels[i] = labels[r];
        }
        labels
    }

    /// For each puncture (in label order), the edges met by a small loop
    /// around it, in cyclic order. Leaving corner `k` of `t` through side
    /// `k` enters the partner triangle at the corner that ends its side.
    /// An edge with both ends at one puncture appears twice.
    pub fn puncture_cycles(&self) -> Vec<Vec<usize>> {
        let labels = self.puncture_labels();
        let count = labels.iter().max().map_or(0, |m| m + 1);
        let mut cycles = vec![Vec::new(); count];
        let mut seen = vec![false; labels.len()];
        for start in 0..labels.len() {
            if seen[start] || !cycles[labels[start]].is_empty() {
                continue;
            }
            let mut corner = start;
            while !seen[corner] {
                seen[corner] = true;
                let slot = Slot(corner / 3, corner % 3);
                cycles[labels[start]].push(self.edge_at(slot).0);
                let next = self.partner(slot);
                corner = 3 * next.0 + (next.1 + 1) % 3;
            }
        }
        cycles
    }

    pub fn puncture_count(&self) -> usize {
        self.puncture_labels().into_iter().max().map_or(0, |m| m + 1)
    }

    /// χ of the punctured surface, `F − E`.
    pub fn euler_characteristic(&self) -> i64 {
        self.triangle_count as i64 - self.gluing.len() as i64
    }

    pub fn genus(&self) -> usize {
        let closed = self.euler_characteristic() + self.puncture_count() as i64;
        ((2 - closed) / 2) as usize
    }

    /// Flips edge `e`. Triangle and edge indices are kept; `e` becomes the
    /// other diagonal of the quadrilateral, glued as `[(t,2), (t2,2)]`.
    ///
    /// With `gluing[e] = [(t,k), (t2,k2)]` the quadrilateral has corners
    /// `P = C_k(t)`, `Q = C_{k+1}(t)`, `R = C_{k+2}(t)` and `S = C_{k2+2}(t2)`.
    /// Afterwards `t` has corners `(S, Q, R)` and `t2` has `(R, P, S)`.
    pub fn flip(&self, e: usize) -> Result<FlipRecord, SurfaceError> {
        let pair = *self.gluing.get(e).ok_or(SurfaceError::NoSuchEdge(e))?;
        if !self.is_flippable(e) {
            return Err(SurfaceError::Unflippable(e));
        }
        let [Slot(t, k), Slot(t2, k2)] = pair;
        let slot_map = |s: Slot| -> Slot {
            if s == Slot(t, (k + 1) % 3) {
                Slot(t, 1)
            } else if s == Slot(t2, (k2 + 2) % 3) {
                Slot(t, 0)
            } else if s == Slot(t, (k + 2) % 3) {
                Slot(t2, 0)
            } else if s == Slot(t2, (k2 + 1) % 3) {
                Slot(t2, 1)
            } else {
                s
            }
        };
        let gluing = self
            .gluing
            .iter()
            .enumerate()
            .map(|(f, &[a, b])| if f == e { [Slot(t, 2), Slot(t2, 2)] } else { [slot_map(a), slot_map(b)] })
            .collect();
        Ok(FlipRecord {
            before: self.clone(),
            after: Self::from_parts_unchecked(self.triangle_count, gluing),
            edge: e,
            edge_map: (0..self.gluing.len()).collect(),
        })
    }

    pub fn once_punctured_torus() -> Self {
        Self::from_parts_unchecked(
            2,
            vec![[Slot(0, 1), Slot(1, 2)], [Slot(1, 0), Slot(0, 2)], [Slot(0, 0), Slot(1, 1)]],
        )
    }

    /// The boundary of a tetrahedron, punctured at its four vertices.
    pub fn four_punctured_sphere() -> Self {
        let faces = [[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
        let mut sides = std::collections::BTreeMap::new();
        for (t, f) in faces.iter().enumerate() {
            for k in 0..3 {
                sides.insert((f[k], f[(k + 1) % 3]), Slot(t, k));
            }
        }
        let mut gluing = Vec::new();
        for (&(u, v), &s) in &sides {
            if u < v {
                gluing.push([s, sides[&(v, u)]]);
            }
        }
        Self::from_parts_unchecked(4, gluing)
    }

    /// Built-in surfaces by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "once-punctured-torus" | "torus" => Some(Self::once_punctured_torus()),
            "four-punctured-sphere" => Some(Self::four_punctured_sphere()),
            _ => None,
        }
    }
}

/// Result of [`Triangulation::flip`] with the correspondence to the input.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipRecord {
    pub before: Triangulation,
    pub after: Triangulation,
    pub edge: usize,
    /// `edge_map[f]` is the edge of `after` corresponding to edge `f` of
    /// `before`; the flipped edge maps to the new diagonal.
    pub edge_map: Vec<usize>,
}

/// An isomorphism between two triangulations: triangle `t` goes to
/// `map[t].0`, with corner `i` sent to corner `i + map[t].1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TriangulationIso {
    map: Vec<(usize, usize)>,
}

impl TriangulationIso {
    pub fn identity(triangle_count: usize) -> Self {
        TriangulationIso { map: (0..triangle_count).map(|t| (t, 0)).collect() }
    }

    pub fn from_map(map: Vec<(usize, usize)>) -> Self {
        TriangulationIso { map }
    }

    pub fn map(&self) -> &[(usize, usize)] {
        &self.map
    }

    pub fn triangle(&self, t: usize) -> (usize, usize) {
        self.map[t]
    }

    pub fn slot(&self, s: Slot) -> Slot {
        let (t, r) = self.map[s.0];
        Slot(t, (s.1 + r) % 3)
    }

    /// Image of edge `e` of the source in the target.
    pub fn edge(&self, src: &Triangulation, dst: &Triangulation, e: usize) -> usize {
        dst.edge_at(self.slot(src.gluing[e][0])).0
    }

    /// Propagates `anchor -> (image, rotation)` across gluings. Returns
    /// `None` when no isomorphism extends the anchor.
    pub fn from_anchor(
        src: &Triangulation,
        dst: &Triangulation,
        anchor: usize,
        image: usize,
        rotation: usize,
    ) -> Option<Self> {
        if src.triangle_count != dst.triangle_count || src.edge_count() != dst.edge_count() {
            return None;
        }
        let mut map: Vec<Option<(usize, usize)>> = vec![None; src.triangle_count];
        map[anchor] = Some((image, rotation % 3));
        let mut stack = vec![anchor];
        while let Some(t) = stack.pop() {
            let (t2, r) = map[t].expect("visited");
            for k in 0..3 {
                let Slot(u, j) = src.partner(Slot(t, k));
                let Slot(u2, j2) = dst.partner(Slot(t2, (k + r) % 3));
                let want = (u2, (j2 + 3 - j) % 3);
                match map[u] {
                    Some(have) if have != want => return None,
                    Some(_) => {}
                    None => {
                        map[u] = Some(want);
                        stack.push(u);
                    }
                }
            }
        }
        let map: Vec<(usize, usize)> = map.into_iter().collect::<Option<_>>()?;
        let iso = TriangulationIso { map };
        iso.check(src, dst).ok()?;
        Some(iso)
    }

    /// Verifies that this is a bijection carrying every gluing of `src` to a
    /// gluing of `dst`.
    pub fn check(&self, src: &Triangulation, dst: &Triangulation) -> Result<(), SurfaceError> {
        if self.map.len() != src.triangle_count || src.triangle_count != dst.triangle_count {
            return Err(SurfaceError::BadRelabeling("triangle counts differ".into()));
        }
        let images: BTreeSet<usize> = self.map.iter().map(|m| m.0).collect();
        if images.len() != self.map.len() || images.iter().any(|&t| t >= dst.triangle_count) {
            return Err(SurfaceError::BadRelabeling("triangle map is not a bijection".into()));
        }
        for (e, &[a, b]) in src.gluing.iter().enumerate() {
            if dst.partner(self.slot(a)) != self.slot(b) {
                return Err(SurfaceError::BadRelabeling(format!("edge {e} is not carried to an edge")));
            }
        }
        Ok(())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &TriangulationIso) -> Self {
        let map = self
            .map
            .iter()
            .map(|&(t, r)| {
                let (t2, r2) = next.map[t];
                (t2, (r + r2) % 3)
            })
            .collect();
        TriangulationIso { map }
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![(0, 0); self.map.len()];
        for (t, &(t2, r)) in self.map.iter().enumerate() {
            map[t2] = (t, (3 - r) % 3);
        }
        TriangulationIso { map }
    }

    /// Given `self: T -> T'` and the flip of `e` in `T`, the isomorphism
    /// `flip(T, e) -> flip(T', self(e))` that agrees with `self` away from
    /// the flipped quadrilateral.
    pub fn across_flip(
        &self,
        src: &Triangulation,
        dst: &Triangulation,
        e: usize,
    ) -> Result<(FlipRecord, FlipRecord, TriangulationIso), SurfaceError> {
        let e2 = self.edge(src, dst, e);
        let a = src.flip(e)?;
        let b = dst.flip(e2)?;
        let [Slot(t, k), Slot(t2, k2)] = src.gluing[e];
        let old_outer = [Slot(t, (k + 1) % 3), Slot(t2, (k2 + 2) % 3), Slot(t, (k + 2) % 3), Slot(t2, (k2 + 1) % 3)];
        let new_outer = [Slot(t, 1), Slot(t, 0), Slot(t2, 0), Slot(t2, 1)];
        let [Slot(u, l), Slot(u2, l2)] = dst.gluing[e2];
        let dst_old = [Slot(u, (l + 1) % 3), Slot(u2, (l2 + 2) % 3), Slot(u, (l + 2) % 3), Slot(u2, (l2 + 1) % 3)];
        let dst_new = [Slot(u, 1), Slot(u, 0), Slot(u2, 0), Slot(u2, 1)];
        let mut map = self.map.clone();
        for i in [0, 2] {
            let s = self.slot(old_outer[i]);
            let j = dst_old.iter().position(|&x| x == s).ok_or_else(|| {
                SurfaceError::BadRelabeling("quadrilateral not carried to the flipped quadrilateral".into())
            })?;
            let image = dst_new[j];
            let from = new_outer[i];
            map[from.0] = (image.0, (image.1 + 3 - from.1) % 3);
        }
        let iso = TriangulationIso { map };
        iso.check(&a.after, &b.after)?;
        Ok((a, b, iso))
    }
}

/// Generators of the mapping class group of the once-punctured torus,
/// acting on `R² / Z²` by `L = [[1,0],[1,1]]` and `R = [[1,1],[0,1]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TorusLetter {
    L,
    R,
}

impl TorusLetter {
    /// The edge flipped to realize this letter (`c` for L, `a` for R).
    pub fn flip_edge(self) -> usize {
        match self {
            TorusLetter::L => TORUS_EDGE_C,
            TorusLetter::R => TORUS_EDGE_A,
        }
    }

    /// The isomorphism from the torus to its flip at [`Self::flip_edge`]
    /// induced by the matrix action.
    pub fn relabeling(self) -> TriangulationIso {
        let torus = Triangulation::once_punctured_torus();
        let flipped = torus.flip(self.flip_edge()).expect("torus edges are flippable").after;
        let image = match self {
            TorusLetter::L => 0,
            TorusLetter::R => 1,
        };
        TriangulationIso::from_anchor(&torus, &flipped, 0, image, 0).expect("letter relabeling exists")
    }
}

/// Torus edge on the line `x = 0`.
pub const TORUS_EDGE_A: usize = 0;
/// Torus edge on the line `x = y`.
pub const TORUS_EDGE_B: usize = 1;
/// Torus edge on the line `y = 0`.
pub const TORUS_EDGE_C: usize = 2;

/// A mapping class given either as a torus word or as explicit flips.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MappingWord {
    Torus(Vec<TorusLetter>),
    /// Flips performed in sequence, each edge index referring to the
    /// triangulation produced by the previous flips, then `relabel` from the
    /// original triangulation to the final one.
    Generic { flips: Vec<usize>, relabel: TriangulationIso },
}

impl MappingWord {
    /// Parses a word over `{L, R}`; whitespace is ignored.
    pub fn parse_torus(word: &str) -> Result<Self, SurfaceError> {
        word.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'L' | 'l' => Ok(TorusLetter::L),
                'R' | 'r' => Ok(TorusLetter::R),
                other => Err(SurfaceError::BadLetter(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(MappingWord::Torus)
    }

    pub fn from_json(text: &str) -> Result<Self, SurfaceError> {
        serde_json::from_str(text).map_err(|e| SurfaceError::Json(e.to_string()))
    }

    pub fn is_empty(&self) -> bool {
        match self {
            MappingWord::Torus(w) => w.is_empty(),
            MappingWord::Generic { flips, .. } => flips.is_empty(),
        }
    }

    /// Concatenation, first `self` then `other`.
    pub fn concat(&self, other: &MappingWord) -> Option<MappingWord> {
        match (self, other) {
            (MappingWord::Torus(a), MappingWord::Torus(b)) => {
                Some(MappingWord::Torus(a.iter().chain(b).copied().collect()))
            }
            _ => None,
        }
    }
}

/// A chain of flips `T = T_0 -> T_1 -> ... -> T_q` and an isomorphism
/// `relabel: T -> T_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipPlan {
    pub start: Triangulation,
    pub flips: Vec<FlipRecord>,
    pub relabel: TriangulationIso,
}

impl FlipPlan {
    pub fn end(&self) -> &Triangulation {
        self.flips.last().map_or(&self.start, |f| &f.after)
    }

    pub fn flip_edges(&self) -> Vec<usize> {
        self.flips.iter().map(|f| f.edge).collect()
    }
}

/// Expands a mapping word into flips on `tri` and the final relabeling.
///
/// For torus words each letter `X` is one flip at the image of
/// [`TorusLetter::flip_edge`] under the relabeling accumulated so far.
pub fn word_to_flips(tri: &Triangulation, word: &MappingWord) -> Result<FlipPlan, SurfaceError> {
    match word {
        MappingWord::Torus(letters) => {
            if !letters.is_empty() && *tri != Triangulation::once_punctured_torus() {
                return Err(SurfaceError::NotTorus);
            }
            let mut flips: Vec<FlipRecord> = Vec::new();
            let mut phi = TriangulationIso::identity(tri.triangle_count());
            for &letter in letters {
                let current = flips.last().map_or(tri, |f| &f.after).clone();
                let (_, record, chi) = phi.across_flip(tri, &current, letter.flip_edge())?;
                phi = letter.relabeling().then(&chi);
                flips.push(record);
            }
            Ok(FlipPlan { start: tri.clone(), flips, relabel: phi })
        }
        MappingWord::Generic { flips: edges, relabel } => {
            let mut flips: Vec<FlipRecord> = Vec::new();
            for &e in edges {
                let current = flips.last().map_or(tri, |f| &f.after);
                flips.push(current.flip(e)?);
            }
            let end = flips.last().map_or(tri, |f| &f.after);
            relabel.check(tri, end)?;
            Ok(FlipPlan { start: tri.clone(), flips, relabel: relabel.clone() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(t: &Triangulation) -> (Vec<Vec<Slot>>, Vec<[Slot; 2]>) {
        (canonical_triangles(t.triangle_count()), t.gluing().to_vec())
    }

    #[test]
    fn torus_shape() {
        let t = Triangulation::once_punctured_torus();
        assert_eq!(t.triangle_count(), 2);
        assert_eq!(t.edge_count(), 3);
        assert_eq!(t.puncture_count(), 1);
        assert_eq!(t.euler_characteristic(), -1);
        assert_eq!(t.genus(), 1);
        assert!((0..3).all(|e| t.is_flippable(e)));
        let (tr, gl) = parts(&t);
        assert!(validate(&tr, &gl).is_ok());
    }

    #[test]
    fn sphere_shape() {
        let s = Triangulation::four_punctured_sphere();
        assert_eq!((s.triangle_count(), s.edge_count(), s.puncture_count()), (4, 6, 4));
        assert_eq!((s.euler_characteristic(), s.genus()), (-2, 0));
    }

    #[test]
    fn self_folded_is_reported() {
        let gl = vec![[Slot(0, 0), Slot(0, 1)], [Slot(0, 2), Slot(1, 0)], [Slot(1, 1), Slot(1, 2)]];
        let issues = validate(&canonical_triangles(2), &gl).unwrap_err();
        assert!(issues.iter().any(|i| i.to_string().contains("self-folded")));
    }

    #[test]
    fn three_punctured_sphere_is_rejected() {
        // two triangles glued along their boundaries
        let gl = vec![[Slot(0, 0), Slot(1, 0)], [Slot(0, 1), Slot(1, 2)], [Slot(0, 2), Slot(1, 1)]];
        let issues = validate(&canonical_triangles(2), &gl).unwrap_err();
        assert_eq!(issues, vec![Issue::Genus0FewPunctures { punctures: 3 }]);
        assert!(issues[0].to_string().contains("genus-0 needs >3 punctures"));
    }

    #[test]
    fn dangling_and_orientation_issues() {
        let t = Triangulation::once_punctured_torus();
        let mut gl = t.gluing().to_vec();
        gl.pop();
        let mut tr = canonical_triangles(2);
        tr[1] = vec![Slot(1, 0), Slot(1, 2), Slot(1, 1)];
        let issues = validate(&tr, &gl).unwrap_err();
        assert!(issues.contains(&Issue::OrientationClash { triangle: 1 }));
        assert!(issues.contains(&Issue::DanglingSlot { slot: Slot(0, 0) }));
        assert!(issues.contains(&Issue::DanglingSlot { slot: Slot(1, 1) }));
    }

    #[test]
    fn json_round_trip() {
        let t = Triangulation::four_punctured_sphere();
        let back = Triangulation::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(matches!(Triangulation::from_json("{\"triangles\": 3}"), Err(SurfaceError::Json(_))));
    }

    #[test]
    fn flips_preserve_counts_and_validity() {
        for t in [Triangulation::once_punctured_torus(), Triangulation::four_punctured_sphere()] {
            for e in 0..t.edge_count() {
                let f = t.flip(e).unwrap().after;
                assert_eq!(f.triangle_count(), t.triangle_count());
                assert_eq!(f.edge_count(), t.edge_count());
                assert_eq!(f.euler_characteristic(), t.euler_characteristic());
                assert_eq!(f.puncture_count(), t.puncture_count());
                let (tr, gl) = parts(&f);
                assert!(validate(&tr, &gl).is_ok());
            }
        }
    }

    #[test]
    fn double_flip_is_isomorphic() {
        for t in [Triangulation::once_punctured_torus(), Triangulation::four_punctured_sphere()] {
            for e in 0..t.edge_count() {
                let once = t.flip(e).unwrap();
                let twice = once.after.flip(once.edge_map[e]).unwrap().after;
                let found = (0..t.triangle_count())
                    .flat_map(|img| (0..3).map(move |r| (img, r)))
                    .any(|(img, r)| TriangulationIso::from_anchor(&t, &twice, 0, img, r).is_some());
                assert!(found, "edge {e}");
            }
        }
    }

    #[test]
    fn torus_letters_are_isomorphisms() {
        let t = Triangulation::once_punctured_torus();
        for letter in [TorusLetter::L, TorusLetter::R] {
            let flipped = t.flip(letter.flip_edge()).unwrap().after;
            letter.relabeling().check(&t, &flipped).unwrap();
        }
    }

    #[test]
    fn word_expansion() {
        let t = Triangulation::once_punctured_torus();
        let empty = word_to_flips(&t, &MappingWord::Torus(vec![])).unwrap();
        assert!(empty.flips.is_empty());
        assert_eq!(empty.relabel, TriangulationIso::identity(2));
        let lr = word_to_flips(&t, &MappingWord::parse_torus("LR").unwrap()).unwrap();
        assert_eq!(lr.flips.len(), 2);
        lr.relabel.check(&t, lr.end()).unwrap();
        let sphere = Triangulation::four_punctured_sphere();
        assert_eq!(word_to_flips(&sphere, &MappingWord::parse_torus("L").unwrap()), Err(SurfaceError::NotTorus));
        assert_eq!(MappingWord::parse_torus("LX"), Err(SurfaceError::BadLetter('X')));
    }

    #[test]
    fn generic_word_round_trips_json() {
        let t = Triangulation::once_punctured_torus();
        let plan = word_to_flips(&t, &MappingWord::parse_torus("LLR").unwrap()).unwrap();
        let generic = MappingWord::Generic { flips: plan.flip_edges(), relabel: plan.relabel.clone() };
        let text = serde_json::to_string(&generic).unwrap();
        let back = MappingWord::from_json(&text).unwrap();
        assert_eq!(back, generic);
        let replay = word_to_flips(&t, &back).unwrap();
        assert_eq!(replay.end(), plan.end());
    }
}
