//! Dense univariate polynomials in `t`.

use std::fmt;

use num_complex::Complex64;

use super::scalar::{snap_integer, snap_integer_within, Scalar, INTEGER_SNAP_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UniPolyError {
    #[error("division by (t-1)^{power} leaves a nonzero remainder")]
    NotDivisible { power: usize },
}

/// `Σ coeffs[k] t^k`, trailing zeros trimmed for exact scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> UniPoly<S> {
    /// Coefficients in ascending order. Exactly-zero leading entries are
    /// dropped by [`UniPoly::trim`].
    pub fn new(coeffs: Vec<S>) -> Self {
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Nominal degree (length − 1); `None` for the empty polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Drops leading coefficients whose magnitude is at most `tol`.
    pub fn trim(mut self, tol: f64) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_negligible(tol)) {
            self.coeffs.pop();
        }
        self
    }

    pub fn eval(&self, t: &S) -> Option<S> {
        let mut it = self.coeffs.iter().rev();
        let mut acc = it.next()?.clone();
        for c in it {
            acc = acc * t.clone() + c.clone();
        }
        Some(acc)
    }

    /// Synthetic division by `t − 1`: quotient and remainder.
    pub fn div_by_t_minus_one(&self) -> (Self, Option<S>) {
        let n = self.coeffs.len();
        if n == 0 {
            return (self.clone(), None);
        }
        let mut q = vec![self.coeffs[0].zero_like(); n - 1];
        let mut carry = self.coeffs[n - 1].clone();
        for k in (0..n - 1).rev() {
            q[k] = carry.clone();
            carry = carry + self.coeffs[k].clone();
        }
        (UniPoly { coeffs: q }, Some(carry))
    }

    /// Divides by `(t − 1)^power`, requiring each remainder to be negligible
    /// at `tol`.
    pub fn divide_by_t_minus_one_power(&self, power: usize, tol: f64) -> Result<Self, UniPolyError> {
        let mut p = self.clone();
        for _ in 0..power {
            let (q, r) = p.div_by_t_minus_one();
            match r {
                Some(r) if r.is_negligible(tol) => p = q,
                _ => return Err(UniPolyError::NotDivisible { power }),
            }
        }
        Ok(p)
    }

    /// Order of vanishing at `t = 1`, detected by repeated division with the
    /// remainder tested at `tol`.
    pub fn multiplicity_at_one(&self, tol: f64) -> usize {
        let mut p = self.clone();
        let mut k = 0;
        loop {
            let (q, r) = p.div_by_t_minus_one();
            match r {
                Some(r) if r.is_negligible(tol) && !q.coeffs.is_empty() => {
                    p = q;
                    k += 1;
                }
                _ => return k,
            }
        }
    }
}

impl UniPoly<Complex64> {
    /// Rounds every coefficient to an integer, or `None` if any coefficient
    /// is further than the snap tolerance from one.
    pub fn integer_coefficients(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| snap_integer(*c)).collect()
    }

    /// As [`UniPoly::integer_coefficients`] with the tolerance widened to
    /// `1e-12` relative to the largest coefficient, for polynomials whose
    /// coefficients are too large for an absolute `1e-8`.
    pub fn integer_coefficients_scaled(&self) -> Option<Vec<i64>> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tol = INTEGER_SNAP_TOLERANCE.max(1e-12 * scale);
        self.coeffs.iter().map(|c| snap_integer_within(*c, tol)).collect()
    }
}

/// Renders integer coefficients (ascending) as `t^8 - 16*t^7 + ... + 1`.
pub fn format_integer_poly(coeffs: &[i64], var: &str) -> String {
    let mut out = String::new();
    for (k, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mag = c.unsigned_abs();
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0 { " - " } else { " + " });
        }
        let body = match (k, mag) {
            (0, m) => m.to_string(),
            (1, 1) => var.to_string(),
            (1, m) => format!("{m}*{var}"),
            (k, 1) => format!("{var}^{k}"),
            (k, m) => format!("{m}*{var}^{k}"),
        };
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl<S: Scalar + fmt::Display> fmt::Display for UniPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: &[f64]) -> UniPoly<Complex64> {
        UniPoly::new(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    #[test]
    fn multiplicity_and_quotient() {
        // (t-1)^2 (t^2 - 5t + 1) = t^4 - 7t^3 + 12t^2 - 7t + 1
        let p = re(&[1.0, -7.0, 12.0, -7.0, 1.0]);
        assert_eq!(p.multiplicity_at_one(1e-9), 2);
        let q = p.divide_by_t_minus_one_power(2, 1e-9).unwrap();
        assert_eq!(q.integer_coefficients().unwrap(), vec![1, -5, 1]);
        assert!(p.divide_by_t_minus_one_power(3, 1e-9).is_err());
    }

    #[test]
    fn evaluation() {
        let p = re(&[1.0, -5.0, 1.0]);
        assert_eq!(p.eval(&Complex64::new(1.0, 0.0)).unwrap(), Complex64::new(-3.0, 0.0));
    }

    #[test]
    fn formatting() {
        assert_eq!(format_integer_poly(&[1, -5, 1], "t"), "t^2 - 5*t + 1");
        assert_eq!(format_integer_poly(&[-1, 1], "t"), "t - 1");
        assert_eq!(format_integer_poly(&[0, 0, -2], "t"), "-2*t^2");
        assert_eq!(format_integer_poly(&[], "t"), "0");
    }
}
