use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::TorsionError;
use crate::cluster::{ClusterError, ClusterMap};
use crate::ratfun::{Dual, Quadratic, Scalar, UniPoly};

/// `matrix[i][j] = ∂φ*(y_j)/∂y_i` at `basepoint`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jacobian<S> {
    pub matrix: Vec<Vec<S>>,
    pub basepoint: Vec<S>,
}

impl<S> Jacobian<S> {
    pub fn dimension(&self) -> usize {
        self.matrix.len()
    }
}

/// Forward-mode Jacobian: one program run over dual numbers seeded with
/// every coordinate direction.
pub fn jacobian_at<S: Scalar>(map: &ClusterMap, point: &[S]) -> Result<Jacobian<S>, ClusterError> {
    let out = map.apply(&Dual::seed(point))?;
    let l = point.len();
    let matrix = (0..l).map(|i| (0..l).map(|j| out[j].gradient[i].clone()).collect()).collect();
    Ok(Jacobian { matrix, basepoint: point.to_vec() })
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Coefficients of `det(sI − A) = Σ c_k s^k`, ascending, by
/// Faddeev–LeVerrier. Only ring operations and division by integers are
/// used.
pub fn characteristic_coefficients<S: Scalar>(a: &[Vec<S>]) -> Vec<S> {
    let l = a.len();
    let Some(any) = a.first().and_then(|r| r.first()) else {
        return Vec::new();
    };
    let zero = any.zero_like();
    let mut c = vec![zero.clone(); l + 1];
    c[l] = any.one_like();
    // M_k = A M_{k-1} + c_{l-k+1} I, c_{l-k} = -tr(A M_k) / k
    let mut m = vec![vec![zero.clone(); l]; l];
    for k in 1..=l {
        let mut next = mat_mul(a, &m, &zero);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = row[i].clone() + c[l - k + 1].clone();
        }
        m = next;
        let am = mat_mul(a, &m, &zero);
        let trace = (0..l).fold(zero.clone(), |acc, i| acc + am[i][i].clone());
        c[l - k] = -(trace * any.constant_like(&ratio(1, k as i64)));
    }
    c
}

fn mat_mul<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>], zero: &S) -> Vec<Vec<S>> {
    let l = a.len();
    (0..l)
        .map(|i| {
            (0..l)
                .map(|j| (0..l).fold(zero.clone(), |acc, k| acc + a[i][k].clone() * b[k][j].clone()))
                .collect()
        })
        .collect()
}

/// `det(A)` from the constant term of the characteristic polynomial.
pub fn determinant<S: Scalar>(a: &[Vec<S>]) -> Option<S> {
    let c = characteristic_coefficients(a);
    let c0 = c.first()?.clone();
    Some(if a.len() % 2 == 1 { -c0 } else { c0 })
}

/// `det(tJ − I)` as a polynomial in `t`. Since
/// `det(tJ − I) = (−1)^l Σ c_k t^{l−k}`, the coefficient of `t^j` is
/// `(−1)^l c_{l−j}`.
pub fn alexander_poly<S: Scalar>(j: &Jacobian<S>) -> UniPoly<S> {
    let c = characteristic_coefficients(&j.matrix);
    let l = j.dimension();
    let coeffs = (0..=l).map(|k| if l % 2 == 1 { -c[l - k].clone() } else { c[l - k].clone() }).collect();
    UniPoly::new(coeffs)
}

/// `det(tJ − I)` at `t`, by LU decomposition.
fn alexander_value(j: &Jacobian<Complex64>, t: Complex64) -> Complex64 {
    let l = j.dimension();
    DMatrix::from_fn(l, l, |r, c| t * j.matrix[r][c] - if r == c { 1.0 } else { 0.0 }).determinant()
}

/// The `l + 1` points `e^{2πik/(l+1)}`.
fn circle(l: usize) -> Vec<Complex64> {
    (0..=l).map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / (l + 1) as f64)).collect()
}

/// `det(tJ − I)` interpolated from LU determinants at the `(l+1)`-th roots
/// of unity by an inverse discrete Fourier transform.
pub fn alexander_poly_interpolated(j: &Jacobian<Complex64>) -> UniPoly<Complex64> {
    let l = j.dimension();
    let points = circle(l);
    let values: Vec<Complex64> = points.iter().map(|t| alexander_value(j, *t)).collect();
    let coeffs = (0..=l)
        .map(|k| {
            let sum: Complex64 = values.iter().zip(&points).map(|(v, t)| v * t.powi(-(k as i32))).sum();
            sum / (l + 1) as f64
        })
        .collect();
    UniPoly::new(coeffs)
}

/// Largest discrepancy between `p` and LU determinants of `tJ − I` on the
/// unit circle, relative to the largest such determinant.
pub fn alexander_discrepancy(p: &UniPoly<Complex64>, j: &Jacobian<Complex64>) -> f64 {
    let points = circle(j.dimension());
    let mut scale = 1.0f64;
    let mut worst = 0.0f64;
    for t in &points {
        let direct = alexander_value(j, *t);
        let value = p.eval(t).unwrap_or_default();
        scale = scale.max(direct.norm());
        worst = worst.max((direct - value).norm());
    }
    worst / scale
}

/// Scalars whose sign class in `C^× / ±1` can be chosen canonically.
pub trait SignClass: Scalar {
    fn approx(&self) -> Complex64;

    /// `self` or `−self`, whichever has positive real part, or positive
    /// imaginary part when the real part vanishes.
    fn canonical_sign(&self) -> Self {
        let z = self.approx();
        let flip = if z.re.abs() > 1e-12 * z.norm().max(1.0) { z.re < 0.0 } else { z.im < 0.0 };
        if flip {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl SignClass for Complex64 {
    fn approx(&self) -> Complex64 {
        *self
    }
}

impl SignClass for Quadratic {
    fn approx(&self) -> Complex64 {
        self.to_complex()
    }
}

/// The torsion limit with both the raw value and its sign-canonical
/// representative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorsionValue<S> {
    pub raw: S,
    pub canonical: S,
}

/// Absolute remainder tolerance for the `t = 1` root test of `p`:
/// `1e-7` relative to the largest coefficient.
pub fn multiplicity_tolerance(p: &UniPoly<Complex64>) -> f64 {
    1e-7 * p.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max)
}

/// `lim_{t→1} p(t) / (t − 1)^{m(n−1)}`, requiring `t = 1` to be a root of
/// multiplicity exactly `m(n−1)`.
pub fn torsion_value<S: SignClass>(
    p: &UniPoly<S>,
    punctures: usize,
    n: usize,
    tol: f64,
) -> Result<TorsionValue<S>, TorsionError> {
    let expected = punctures * (n - 1);
    let found = p.multiplicity_at_one(tol);
    if found != expected {
        return Err(TorsionError::MultiplicityMismatch { found, expected });
    }
    let q = p
        .divide_by_t_minus_one_power(expected, tol)
        .map_err(|_| TorsionError::MultiplicityMismatch { found, expected })?;
    let one = p.coeffs()[0].one_like();
    let raw = q.eval(&one).ok_or(TorsionError::MultiplicityMismatch { found, expected })?;
    Ok(TorsionValue { canonical: raw.canonical_sign(), raw })
}
