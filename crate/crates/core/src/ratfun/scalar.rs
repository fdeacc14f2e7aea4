use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Magnitude below which a floating denominator counts as zero.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

/// Distance within which a complex number is reported as an integer.
pub const INTEGER_SNAP_TOLERANCE: f64 = 1e-8;

/// Raised when a value that must be inverted is zero (exactly, or below
/// [`SINGULARITY_THRESHOLD`] for floating scalars).
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("division by a (numerically) vanishing value")]
pub struct Singular;

/// A field element that cluster maps can be evaluated over.
///
/// Implemented for [`Complex64`], [`Quadratic`](super::Quadratic),
/// [`Dual`](super::Dual) over any scalar, and
/// [`RationalFunction`](super::RationalFunction) itself, which is how the
/// same mutation code produces numbers, exact values, Jacobians and formulas.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// The rational constant `c`, living in the same context as `self`
    /// (same gradient length, same quadratic field, same variable count).
    fn constant_like(&self, c: &BigRational) -> Self;

    fn try_recip(&self) -> Result<Self, Singular>;

    /// Exact zero test for exact scalars; `|x| <= tol` for floating ones.
    fn is_negligible(&self, tol: f64) -> bool;

    fn int_like(&self, v: i64) -> Self {
        self.constant_like(&BigRational::from_integer(v.into()))
    }

    fn one_like(&self) -> Self {
        self.int_like(1)
    }

    fn zero_like(&self) -> Self {
        self.int_like(0)
    }

    fn try_div(&self, rhs: &Self) -> Result<Self, Singular> {
        Ok(self.clone() * rhs.try_recip()?)
    }

    /// Integer power; negative exponents invert first.
    fn try_powi(&self, exp: i32) -> Result<Self, Singular> {
        let base = if exp < 0 { self.try_recip()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = self.one_like();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq.clone();
            }
            e >>= 1;
            if e > 0 {
                sq = sq.clone() * sq;
            }
        }
        Ok(acc)
    }
}

impl Scalar for Complex64 {
    fn constant_like(&self, c: &BigRational) -> Self {
        Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn try_recip(&self) -> Result<Self, Singular> {
        if self.norm() < SINGULARITY_THRESHOLD || !self.is_finite() {
            Err(Singular)
        } else {
            Ok(self.inv())
        }
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.norm() <= tol
    }
}

/// Rounds `z` to the nearest Gaussian-real integer when it lies within
/// [`INTEGER_SNAP_TOLERANCE`] of one.
pub fn snap_integer(z: Complex64) -> Option<i64> {
    snap_integer_within(z, INTEGER_SNAP_TOLERANCE)
}

/// [`snap_integer`] with an explicit tolerance.
pub fn snap_integer_within(z: Complex64, tol: f64) -> Option<i64> {
    let r = z.re.round();
    if (z - Complex64::new(r, 0.0)).norm() < tol && r.abs() < 9.0e15 {
        Some(r as i64)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_recip_respects_threshold() {
        assert!(Complex64::new(1e-13, 0.0).try_recip().is_err());
        let z = Complex64::new(0.0, 2.0).try_recip().unwrap();
        assert!((z - Complex64::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn powi_handles_negative_exponents() {
        let z = Complex64::new(2.0, 0.0);
        assert!((z.try_powi(-3).unwrap() - Complex64::new(0.125, 0.0)).norm() < 1e-15);
        assert_eq!(z.try_powi(0).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_integer(Complex64::new(-84.000000001, 1e-10)), Some(-84));
        assert_eq!(snap_integer(Complex64::new(2.5, 0.0)), None);
        assert_eq!(snap_integer(Complex64::new(3.0, 1e-3)), None);
    }
}
