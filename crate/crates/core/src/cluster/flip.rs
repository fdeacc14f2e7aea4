use super::{ClusterError, ClusterMap};
use crate::quiver::{build_quiver, flip_correspondence, invert_permutation, torus_reference_order, vertex_bijection};
use crate::ratfun::Scalar;
use crate::surface::{word_to_flips, FlipRecord, MappingWord, Triangulation};

/// The transition map of flipping edge `e`: mutations layer by layer, then
/// the relabeling into the canonical vertex order of the flipped
/// triangulation.
///
/// The program's final quiver is compared against the quiver built from the
/// flipped triangulation; a mismatch is an error.
pub fn flip_map(tri: &Triangulation, e: usize, n: usize) -> Result<(ClusterMap, FlipRecord), ClusterError> {
    let record = tri.flip(e)?;
    let map = flip_map_for(&record, n)?;
    Ok((map, record))
}

fn flip_map_for(record: &FlipRecord, n: usize) -> Result<ClusterMap, ClusterError> {
    let corr = flip_correspondence(record, n)?;
    let mut map = ClusterMap::identity(build_quiver(&record.before, n)?);
    for layer in &corr.layers {
        for &k in layer {
            map.push_mutate(k)?;
        }
    }
    map.push_permute(invert_permutation(&corr.perm))?;
    let expected = build_quiver(&record.after, n)?;
    if !map.final_quiver().same_matrix(&expected) {
        return Err(ClusterError::Inconsistent(format!(
            "mutating across edge {} does not produce the flipped quiver",
            record.edge
        )));
    }
    Ok(map)
}

/// The action `φ*` of a mapping class on the X-coordinates of `tri`: the
/// flip transition maps of the word's flip sequence followed by the
/// relabeling back to `tri`.
///
/// Letters act left to right: the map of `"LR"` is the map of `"L"` followed
/// by the map of `"R"`.
pub fn mapping_class_map(tri: &Triangulation, word: &MappingWord, n: usize) -> Result<ClusterMap, ClusterError> {
    let plan = word_to_flips(tri, word)?;
    let mut map = ClusterMap::identity(build_quiver(tri, n)?);
    for record in &plan.flips {
        map = map.then(&flip_map_for(record, n)?)?;
    }
    let psi = vertex_bijection(tri, plan.end(), &plan.relabel, n)?;
    map.push_permute(psi)?;
    if !map.is_self_map() {
        return Err(ClusterError::Inconsistent("relabeled quiver differs from the starting quiver".into()));
    }
    Ok(map)
}

/// [`mapping_class_map`] on the once-punctured torus, expressed in the
/// reference variable order when one is defined for `n` and in canonical
/// order otherwise.
pub fn reference_map(word: &MappingWord, n: usize) -> Result<ClusterMap, ClusterError> {
    let map = mapping_class_map(&Triangulation::once_punctured_torus(), word, n)?;
    match torus_reference_order(n) {
        Some(order) => map.relabeled(&order),
        None => Ok(map),
    }
}

/// Lifts a rank-2 point to rank `n`: each edge vertex takes the value of its
/// edge, every interior vertex takes 1. Canonical vertex order on both
/// sides.
pub fn embed_pgl2<S: Scalar>(tri: &Triangulation, point: &[S], n: usize) -> Result<Vec<S>, ClusterError> {
    let edges = tri.edge_count();
    if point.len() != edges {
        return Err(ClusterError::LengthMismatch { expected: edges, got: point.len() });
    }
    let one = point.first().map(|p| p.one_like()).ok_or(ClusterError::LengthMismatch { expected: edges, got: 0 })?;
    let mut out = Vec::with_capacity(build_quiver(tri, n)?.len());
    for y in point {
        for _ in 1..n {
            out.push(y.clone());
        }
    }
    let interior = (n - 1) * (n - 2) / 2;
    out.extend(std::iter::repeat_n(one, tri.triangle_count() * interior));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::QuiverVertex;
    use num_complex::Complex64;

    #[test]
    fn rank_two_flip_is_one_mutation() {
        let t = Triangulation::once_punctured_torus();
        let (m, _) = flip_map(&t, 1, 2).unwrap();
        assert_eq!(m.mutation_count(), 1);
    }

    #[test]
    fn rank_three_torus_flip_is_four_mutations() {
        let t = Triangulation::once_punctured_torus();
        for e in 0..3 {
            let (m, _) = flip_map(&t, e, 3).unwrap();
            assert_eq!(m.mutation_count(), 4);
            let q = m.initial();
            let kinds: Vec<bool> = m
                .steps()
                .iter()
                .filter_map(|s| match s {
                    crate::cluster::Step::Mutate(k) => Some(matches!(q.vertices()[*k], QuiverVertex::Edge { .. })),
                    _ => None,
                })
                .collect();
            assert_eq!(kinds, vec![true, true, false, false]);
        }
    }

    #[test]
    fn empty_word_is_identity() {
        let t = Triangulation::once_punctured_torus();
        let m = mapping_class_map(&t, &MappingWord::Torus(vec![]), 3).unwrap();
        let p: Vec<Complex64> = (0..8).map(|i| Complex64::new(1.0 + i as f64, 0.5)).collect();
        assert_eq!(m.apply(&p).unwrap(), p);
    }

    #[test]
    fn embedding_layout() {
        let t = Triangulation::once_punctured_torus();
        let p = [Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(5.0, 0.0)];
        let e = embed_pgl2(&t, &p, 3).unwrap();
        let re: Vec<f64> = e.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![2.0, 2.0, 3.0, 3.0, 5.0, 5.0, 1.0, 1.0]);
        assert!(embed_pgl2(&t, &p[..2], 3).is_err());
    }
}
