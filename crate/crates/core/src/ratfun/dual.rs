//! Forward-mode dual numbers carrying a full gradient.
//!
//! A `Dual<S>` holds a value together with its partial derivatives with
//! respect to all `l` ambient variables. Running a cluster program over
//! `Dual` seeds produces one column of the Jacobian per output coordinate in
//! a single pass.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;

use super::scalar::{Scalar, Singular};

#[derive(Debug, Clone, PartialEq)]
pub struct Dual<S> {
    pub value: S,
    pub gradient: Vec<S>,
}

/// Complex double-precision dual number, the numeric Jacobian carrier.
pub type DualScalar = Dual<Complex64>;

impl<S: Scalar> Dual<S> {
    pub fn constant(value: S, len: usize) -> Self {
        let zero = value.zero_like();
        Dual { value, gradient: vec![zero; len] }
    }

    /// The coordinate function `y_index` evaluated at `value`.
    pub fn variable(value: S, index: usize, len: usize) -> Self {
        assert!(index < len, "variable index {index} out of range for {len} variables");
        let mut d = Self::constant(value, len);
        d.gradient[index] = d.value.one_like();
        d
    }

    /// Seeds every coordinate of `point` as an independent variable.
    pub fn seed(point: &[S]) -> Vec<Self> {
        point
            .iter()
            .enumerate()
            .map(|(i, v)| Self::variable(v.clone(), i, point.len()))
            .collect()
    }

    fn scale_gradient(&self, k: &S) -> Vec<S> {
        self.gradient.iter().map(|g| g.clone() * k.clone()).collect()
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.gradient.len(), rhs.gradient.len());
        Dual {
            value: self.value + rhs.value,
            gradient: self.gradient.into_iter().zip(rhs.gradient).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.gradient.len(), rhs.gradient.len());
        Dual {
            value: self.value - rhs.value,
            gradient: self.gradient.into_iter().zip(rhs.gradient).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.gradient.len(), rhs.gradient.len());
        let gradient = self
            .gradient
            .iter()
            .zip(&rhs.gradient)
            .map(|(a, b)| a.clone() * rhs.value.clone() + self.value.clone() * b.clone())
            .collect();
        Dual { value: self.value * rhs.value, gradient }
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { value: -self.value, gradient: self.gradient.into_iter().map(|g| -g).collect() }
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn constant_like(&self, c: &BigRational) -> Self {
        Self::constant(self.value.constant_like(c), self.gradient.len())
    }

    fn try_recip(&self) -> Result<Self, Singular> {
        let inv = self.value.try_recip()?;
        // d(1/v) = -v'/v^2
        let factor = -(inv.clone() * inv.clone());
        Ok(Dual { gradient: self.scale_gradient(&factor), value: inv })
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.value.is_negligible(tol) && self.gradient.iter().all(|g| g.is_negligible(tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_and_quotient_rules() {
        let x = DualScalar::variable(c(2.0, 1.0), 0, 2);
        let y = DualScalar::variable(c(-1.0, 0.5), 1, 2);
        // f = x*y/(1+x)
        let one = x.one_like();
        let f = x.clone() * y.clone() * (one + x.clone()).try_recip().unwrap();
        let (xv, yv) = (x.value, y.value);
        let dfdx = yv / ((c(1.0, 0.0) + xv) * (c(1.0, 0.0) + xv));
        let dfdy = xv / (c(1.0, 0.0) + xv);
        assert!((f.gradient[0] - dfdx).norm() < 1e-14);
        assert!((f.gradient[1] - dfdy).norm() < 1e-14);
    }

    #[test]
    fn recip_of_zero_value_is_singular() {
        let x = DualScalar::variable(c(0.0, 0.0), 0, 1);
        assert!(x.try_recip().is_err());
    }
}
