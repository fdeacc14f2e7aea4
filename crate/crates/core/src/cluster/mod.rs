//! Cluster X-coordinates: mutation, flips as mutation programs, and the
//! action of mapping classes.

mod flip;
mod program;

pub use flip::{embed_pgl2, flip_map, mapping_class_map, reference_map};
pub use program::{ClusterMap, Step, SymbolicMap};

use crate::quiver::{Quiver, QuiverError};
use crate::ratfun::{RatFunError, Scalar};
use crate::surface::SurfaceError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClusterError {
    #[error("singular mutation at vertex y{} (step {step})", .vertex + 1)]
    Singular { step: usize, vertex: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("coordinate y{} is zero", .0 + 1)]
    ZeroCoordinate(usize),
    #[error("program is inconsistent: {0}")]
    Inconsistent(String),
    #[error("malformed program JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    RatFun(#[from] RatFunError),
}

/// X-mutation of `y` at `k` with respect to `q`:
/// `y_k -> 1/y_k`, and for `i != k`, `y_i (1 + 1/y_k)^(-ε_ik)` when
/// `ε_ik >= 0`, `y_i (1 + y_k)^(-ε_ik)` when `ε_ik <= 0`.
///
/// Errors are reported with `step: 0`; programs rewrite the step index.
pub fn mutate_x<S: Scalar>(y: &[S], q: &Quiver, k: usize) -> Result<Vec<S>, ClusterError> {
    let l = q.len();
    if y.len() != l {
        return Err(ClusterError::LengthMismatch { expected: l, got: y.len() });
    }
    if k >= l {
        return Err(QuiverError::VertexOutOfRange { index: k, len: l }.into());
    }
    let singular = ClusterError::Singular { step: 0, vertex: k };
    let yk = &y[k];
    let inv = yk.try_recip().map_err(|_| singular.clone())?;
    let plus = yk.one_like() + yk.clone();
    let touches = (0..l).any(|i| i != k && q.entry(i, k) != 0);
    if touches && plus.is_negligible(crate::ratfun::SINGULARITY_THRESHOLD) {
        return Err(singular);
    }
    // (1 + 1/y_k)^(-e) = (y_k / (1 + y_k))^e
    let mut pos_pows: Vec<S> = Vec::new();
    let mut neg_pows: Vec<S> = Vec::new();
    let mut out = Vec::with_capacity(l);
    for (i, yi) in y.iter().enumerate() {
        if i == k {
            out.push(inv.clone());
            continue;
        }
        let e = q.entry(i, k);
        let v = if e > 0 {
            if pos_pows.is_empty() {
                let base = yk.try_div(&plus).map_err(|_| singular.clone())?;
                pos_pows.push(base);
            }
            yi.clone() * power(&mut pos_pows, e.unsigned_abs() as usize)
        } else if e < 0 {
            if neg_pows.is_empty() {
                neg_pows.push(plus.clone());
            }
            yi.clone() * power(&mut neg_pows, e.unsigned_abs() as usize)
        } else {
            yi.clone()
        };
        out.push(v);
    }
    Ok(out)
}

/// `pows[0]^e` with the table `pows[j] = pows[0]^(j+1)` extended on demand.
fn power<S: Scalar>(pows: &mut Vec<S>, e: usize) -> S {
    while pows.len() < e {
        let next = pows[pows.len() - 1].clone() * pows[0].clone();
        pows.push(next);
    }
    pows[e - 1].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::{parse_rational, RationalFunction};
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn hand_example() {
        let q = Quiver::unlabeled(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        let out = mutate_x(&[c(2.0), c(3.0)], &q, 0).unwrap();
        assert!((out[0] - c(0.5)).norm() < 1e-15);
        assert!((out[1] - c(9.0)).norm() < 1e-15);
    }

    #[test]
    fn pole_is_singular() {
        let q = Quiver::unlabeled(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        assert!(matches!(mutate_x(&[c(-1.0), c(3.0)], &q, 0), Err(ClusterError::Singular { vertex: 0, .. })));
        assert!(matches!(mutate_x(&[c(3.0), c(-1.0)], &q, 1), Err(ClusterError::Singular { vertex: 1, .. })));
        assert!(matches!(mutate_x(&[c(0.0), c(3.0)], &q, 0), Err(ClusterError::Singular { .. })));
    }

    #[test]
    fn symbolic_involution() {
        let q = Quiver::unlabeled(vec![vec![0, 2, -1], vec![-2, 0, 1], vec![1, -1, 0]]).unwrap();
        let y = RationalFunction::coordinates(3);
        let once = mutate_x(&y, &q, 1).unwrap();
        assert_eq!(once[0], parse_rational("y1*y2^2/(1+y2)^2", 3).unwrap());
        let twice = mutate_x(&once, &q.mutate(1).unwrap(), 1).unwrap();
        assert_eq!(twice, y);
    }
}
