//! Exact recomputation in `Q(√d)` for fixed points that lie in that field.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::alexander::{alexander_poly, jacobian_at, torsion_value, Jacobian, TorsionValue};
use super::TorsionError;
use crate::cluster::ClusterMap;
use crate::ratfun::{is_square_free, Quadratic, UniPoly};

/// Distance within which a float is identified with a rational.
pub const SNAP_TOLERANCE: f64 = 1e-9;

/// Largest denominator tried when snapping.
pub const MAX_SNAP_DENOMINATOR: u64 = 10_000;

/// The continued-fraction convergent of `x` with the smallest denominator
/// that lies within `tol` of `x`, if one exists below `max_den`.
pub fn snap_rational(x: f64, max_den: u64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::from(0), BigInt::from(1), BigInt::from(1), BigInt::from(0));
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > BigInt::from(max_den) {
            return None;
        }
        let approx = p2.to_f64()? / q2.to_f64()?;
        if (approx - x).abs() <= tol {
            return Some(BigRational::new(p2, q2));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a;
        if frac.abs() < f64::EPSILON {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// `z` as `a + b√d`. For `d < 0`, `√d = i√|d|` splits `z` into real and
/// imaginary parts. For `d > 0` only rational `z` can be recognised from a
/// single complex number.
pub fn snap_quadratic(z: Complex64, d: i64) -> Option<Quadratic> {
    if !is_square_free(d) {
        return None;
    }
    if d < 0 {
        let a = snap_rational(z.re, MAX_SNAP_DENOMINATOR, SNAP_TOLERANCE)?;
        let b = snap_rational(z.im / (d.unsigned_abs() as f64).sqrt(), MAX_SNAP_DENOMINATOR, SNAP_TOLERANCE)?;
        Quadratic::new(a, b, d).ok()
    } else {
        if z.im.abs() > SNAP_TOLERANCE {
            return None;
        }
        let a = snap_rational(z.re, MAX_SNAP_DENOMINATOR, SNAP_TOLERANCE)?;
        Quadratic::rational(a, d).ok()
    }
}

pub fn snap_point(point: &[Complex64], d: i64) -> Result<Vec<Quadratic>, TorsionError> {
    if !is_square_free(d) {
        return Err(crate::ratfun::QuadraticError::BadDiscriminant(d).into());
    }
    point
        .iter()
        .enumerate()
        .map(|(i, z)| {
            snap_quadratic(*z, d)
                .ok_or_else(|| TorsionError::Exact(format!("y{} = {z} is not recognised in Q(sqrt({d}))", i + 1)))
        })
        .collect()
}

/// Everything recomputed exactly at a snapped fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCheck {
    pub d: i64,
    pub point: Vec<Quadratic>,
    pub jacobian: Jacobian<Quadratic>,
    pub alexander: UniPoly<Quadratic>,
    pub t1_multiplicity: usize,
    pub torsion: Option<TorsionValue<Quadratic>>,
}

impl ExactCheck {
    /// Snaps `point`, checks `φ*(p) = p` exactly and recomputes the
    /// Jacobian, polynomial and torsion in `Q(√d)`.
    pub fn run(map: &ClusterMap, point: &[Complex64], d: i64, punctures: usize, n: usize) -> Result<Self, TorsionError> {
        let exact = snap_point(point, d)?;
        let image = map.apply(&exact)?;
        if let Some(i) = image.iter().zip(&exact).position(|(a, b)| a != b) {
            return Err(TorsionError::Exact(format!(
                "snapped point is not fixed: y{} maps to {} instead of {}",
                i + 1,
                image[i],
                exact[i]
            )));
        }
        let jacobian = jacobian_at(map, &exact)?;
        let mut alexander = alexander_poly(&jacobian).into_coeffs();
        while alexander.last().is_some_and(Quadratic::is_zero) {
            alexander.pop();
        }
        let alexander = UniPoly::new(alexander);
        let t1_multiplicity = alexander.multiplicity_at_one(0.0);
        let torsion = torsion_value(&alexander, punctures, n, 0.0).ok();
        Ok(ExactCheck { d, point: exact, jacobian, alexander, t1_multiplicity, torsion })
    }

    /// Coefficients as integers when all of them are rational integers.
    pub fn integer_coefficients(&self) -> Option<Vec<i64>> {
        self.alexander
            .coeffs()
            .iter()
            .map(|c| if c.b.is_zero() && c.a.is_integer() { c.a.to_integer().to_i64() } else { None })
            .collect()
    }

    /// Largest distance between exact and numeric coefficients.
    pub fn deviation_from(&self, numeric: &UniPoly<Complex64>) -> f64 {
        let len = self.alexander.coeffs().len().max(numeric.coeffs().len());
        (0..len)
            .map(|k| {
                let e = self.alexander.coeffs().get(k).map(Quadratic::to_complex).unwrap_or_default();
                let x = numeric.coeffs().get(k).copied().unwrap_or_default();
                (e - x).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `p/q` or `p`.
pub(crate) fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snaps_simple_fractions() {
        assert_eq!(snap_rational(-0.5, 100, 1e-9), Some(BigRational::new((-1).into(), 2.into())));
        assert_eq!(snap_rational(3.0, 100, 1e-9), Some(BigRational::from_integer(3.into())));
        assert_eq!(snap_rational(2.0 / 7.0 + 1e-12, 100, 1e-9), Some(BigRational::new(2.into(), 7.into())));
        assert_eq!(snap_rational(std::f64::consts::PI, 100, 1e-9), None);
    }

    #[test]
    fn snaps_eisenstein_root() {
        let w = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
        let q = snap_quadratic(w, -3).unwrap();
        assert_eq!(q, Quadratic::from_fraction(-1, 1, 2, -3).unwrap());
        assert!(snap_quadratic(w, 2).is_none());
        assert!(snap_quadratic(Complex64::new(0.3, 0.123456789), -3).is_none());
    }
}
