//! Exact arithmetic in a quadratic field `Q(√d)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::scalar::{Scalar, Singular};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuadraticError {
    #[error("discriminant {0} is not a square-free integer other than 0 and 1")]
    BadDiscriminant(i64),
}

/// `a + b√d` with rational `a`, `b` and a fixed square-free `d`.
///
/// Mixing two different discriminants in one operation is a logic error and
/// panics.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quadratic {
    pub a: BigRational,
    pub b: BigRational,
    d: i64,
}

pub fn is_square_free(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let n = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

impl Quadratic {
    pub fn new(a: BigRational, b: BigRational, d: i64) -> Result<Self, QuadraticError> {
        if !is_square_free(d) {
            return Err(QuadraticError::BadDiscriminant(d));
        }
        Ok(Quadratic { a, b, d })
    }

    pub fn rational(a: BigRational, d: i64) -> Result<Self, QuadraticError> {
        Self::new(a, BigRational::zero(), d)
    }

    pub fn from_ints(a: i64, b: i64, d: i64) -> Result<Self, QuadraticError> {
        Self::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()), d)
    }

    /// `(num_a + num_b √d) / den`.
    pub fn from_fraction(num_a: i64, num_b: i64, den: i64, d: i64) -> Result<Self, QuadraticError> {
        let den = BigInt::from(den);
        Self::new(
            BigRational::new(num_a.into(), den.clone()),
            BigRational::new(num_b.into(), den),
            d,
        )
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// `a − b√d`.
    pub fn conjugate(&self) -> Self {
        Quadratic { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// `a² − d b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(self.d.into()) * &self.b * &self.b
    }

    pub fn to_complex(&self) -> Complex64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let root = (self.d.abs() as f64).sqrt();
        if self.d < 0 {
            Complex64::new(a, b * root)
        } else {
            Complex64::new(a + b * root, 0.0)
        }
    }

    fn check(&self, rhs: &Self) {
        assert_eq!(self.d, rhs.d, "mixed quadratic fields Q(√{}) and Q(√{})", self.d, rhs.d);
    }
}

impl Add for Quadratic {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(&rhs);
        Quadratic { a: self.a + rhs.a, b: self.b + rhs.b, d: self.d }
    }
}

impl Sub for Quadratic {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.check(&rhs);
        Quadratic { a: self.a - rhs.a, b: self.b - rhs.b, d: self.d }
    }
}

impl Mul for Quadratic {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check(&rhs);
        let d = BigRational::from_integer(self.d.into());
        Quadratic {
            a: &self.a * &rhs.a + d * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
            d: self.d,
        }
    }
}

impl Neg for Quadratic {
    type Output = Self;
    fn neg(self) -> Self {
        Quadratic { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Scalar for Quadratic {
    fn constant_like(&self, c: &BigRational) -> Self {
        Quadratic { a: c.clone(), b: BigRational::zero(), d: self.d }
    }

    fn try_recip(&self) -> Result<Self, Singular> {
        // d square-free => norm vanishes only at zero
        let n = self.norm();
        if n.is_zero() {
            return Err(Singular);
        }
        Ok(Quadratic { a: &self.a / &n, b: -(&self.b / &n), d: self.d })
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

impl fmt::Display for Quadratic {
    /// `a + b*sqrt(d)` with rationals printed as `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let sign = if self.b.is_negative() { '-' } else { '+' };
        let b = self.b.abs();
        let b_str = if b.is_one() { String::new() } else { format!("{b}*") };
        if self.a.is_zero() {
            let lead = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{lead}{b_str}sqrt({})", self.d)
        } else {
            write!(f, "{} {sign} {b_str}sqrt({})", self.a, self.d)
        }
    }
}
