use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::gcd::gcd;
use super::poly::{MultiPoly, PolyError};
use super::scalar::{Scalar, Singular};

/// Term-count ceiling above which fractions are carried unreduced.
pub const DEFAULT_TERM_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatFunError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("denominator vanishes at the evaluation point")]
    EvaluationSingular,
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
}

/// Quotient of two [`MultiPoly`]s.
///
/// Normalized form: `gcd(num, den) = 1`, and `den` is an integer primitive
/// polynomial whose graded-lex leading coefficient is positive. Values whose
/// normalization was skipped because of the term cap have `reduced == false`.
#[derive(Debug, Clone)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
    reduced: bool,
}

impl PartialEq for RationalFunction {
    /// Equality as rational functions (cross-multiplication), so unreduced
    /// values compare correctly too.
    fn eq(&self, other: &Self) -> bool {
        if self.reduced && other.reduced {
            return self.num == other.num && self.den == other.den;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RationalFunction {}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, RatFunError> {
        if num.nvars() != den.nvars() {
            return Err(PolyError::VariableCountMismatch { left: num.nvars(), right: den.nvars() }.into());
        }
        if den.is_zero() {
            return Err(RatFunError::ZeroDenominator);
        }
        Ok(Self::normalized(num, den, DEFAULT_TERM_CAP))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let den = MultiPoly::one(p.nvars());
        RationalFunction { num: p, den, reduced: true }
    }

    pub fn var(nvars: usize, index: usize) -> Result<Self, RatFunError> {
        Ok(Self::from_poly(MultiPoly::var(nvars, index)?))
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::from_poly(MultiPoly::constant(nvars, c))
    }

    /// The identity coordinates `(y1, ..., yl)`.
    pub fn coordinates(nvars: usize) -> Vec<Self> {
        (0..nvars).map(|i| Self::var(nvars, i).expect("in range")).collect()
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn term_count(&self) -> usize {
        self.num.term_count() + self.den.term_count()
    }

    fn normalized(num: MultiPoly, den: MultiPoly, cap: usize) -> Self {
        if num.is_zero() {
            return RationalFunction { den: MultiPoly::one(num.nvars()), num, reduced: true };
        }
        let (num, den, reduced) = if num.term_count() + den.term_count() > cap {
            (num, den, false)
        } else {
            let g = gcd(&num, &den);
            if g.is_one() {
                (num, den, true)
            } else {
                (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"), true)
            }
        };
        Self::scaled(num, den, reduced)
    }

    fn scaled(num: MultiPoly, den: MultiPoly, reduced: bool) -> Self {
        let mut c = den.content();
        if den.leading_coefficient().is_some_and(|l| l.is_negative()) {
            c = -c;
        }
        let inv = c.recip();
        RationalFunction { num: num.scale(&inv), den: den.scale(&inv), reduced }
    }

    /// Re-runs reduction with an explicit term cap.
    pub fn normalize_with_cap(&self, cap: usize) -> Self {
        Self::normalized(self.num.clone(), self.den.clone(), cap)
    }

    /// Partial derivative in `y_{var+1}` by the quotient rule.
    pub fn derivative(&self, var: usize) -> Result<Self, RatFunError> {
        let dn = self.num.derivative(var)?;
        let dd = self.den.derivative(var)?;
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        let den = &self.den * &self.den;
        Ok(Self::normalized(num, den, DEFAULT_TERM_CAP))
    }

    /// Evaluates at a point of any scalar kind. Fails with
    /// [`RatFunError::EvaluationSingular`] when the denominator vanishes.
    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<S, RatFunError> {
        if point.len() != self.nvars() {
            return Err(RatFunError::Arity { expected: self.nvars(), got: point.len() });
        }
        let n = self.num.eval(point);
        let d = self.den.eval(point);
        n.try_div(&d).map_err(|_| RatFunError::EvaluationSingular)
    }

    /// Substitutes `args[i]` for `y_{i+1}` and reduces.
    ///
    /// Both polynomials are cleared of the argument denominators first, so
    /// only one gcd is taken at the end.
    pub fn compose(&self, args: &[RationalFunction]) -> Result<Self, RatFunError> {
        if args.len() != self.nvars() {
            return Err(RatFunError::Arity { expected: self.nvars(), got: args.len() });
        }
        let m = args.first().map_or(0, |a| a.nvars());
        if let Some(bad) = args.iter().find(|a| a.nvars() != m) {
            return Err(PolyError::VariableCountMismatch { left: m, right: bad.nvars() }.into());
        }
        if self.nvars() == 0 {
            return Ok(self.clone());
        }
        let dn: Vec<u32> = (0..self.nvars()).map(|i| self.num.degree_in(i)).collect();
        let dd: Vec<u32> = (0..self.nvars()).map(|i| self.den.degree_in(i)).collect();
        let top: Vec<u32> = dn.iter().zip(&dd).map(|(a, b)| *a.max(b)).collect();
        let mut num_pows: Vec<Vec<MultiPoly>> = Vec::with_capacity(args.len());
        let mut den_pows: Vec<Vec<MultiPoly>> = Vec::with_capacity(args.len());
        for (a, &t) in args.iter().zip(&top) {
            num_pows.push(power_table(&a.num, t));
            den_pows.push(power_table(&a.den, t));
        }
        let clear = |p: &MultiPoly, degs: &[u32]| -> MultiPoly {
            let mut acc = MultiPoly::zero(m);
            for (mono, c) in p.terms() {
                let mut t = MultiPoly::constant(m, c.clone());
                for (i, &e) in mono.exponents().iter().enumerate() {
                    if e > 0 {
                        t = &t * &num_pows[i][e as usize];
                    }
                    let rest = (degs[i] - e) as usize;
                    if rest > 0 && !den_pows[i][rest].is_one() {
                        t = &t * &den_pows[i][rest];
                    }
                }
                acc = &acc + &t;
            }
            acc
        };
        let pn = clear(&self.num, &dn);
        let pd = clear(&self.den, &dd);
        if pd.is_zero() {
            return Err(RatFunError::ZeroDenominator);
        }
        // num/den = (pn / Π D_i^dn_i) / (pd / Π D_i^dd_i)
        let mut num = pn;
        let mut den = pd;
        for i in 0..args.len() {
            if dd[i] > dn[i] {
                num = &num * &den_pows[i][(dd[i] - dn[i]) as usize];
            } else if dn[i] > dd[i] {
                den = &den * &den_pows[i][(dn[i] - dd[i]) as usize];
            }
        }
        Ok(Self::normalized(num, den, DEFAULT_TERM_CAP))
    }

    pub fn recip(&self) -> Result<Self, RatFunError> {
        self.try_recip().map_err(|_| RatFunError::ZeroDenominator)
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(self.nvars(), other.nvars(), "variable count mismatch");
    }
}

fn power_table(p: &MultiPoly, top: u32) -> Vec<MultiPoly> {
    let mut out = Vec::with_capacity(top as usize + 1);
    out.push(MultiPoly::one(p.nvars()));
    for k in 1..=top as usize {
        let next = &out[k - 1] * p;
        out.push(next);
    }
    out
}

impl Add for RationalFunction {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.assert_compatible(&rhs);
        if self.den.is_one() && rhs.den.is_one() {
            return Self::from_poly(&self.num + &rhs.num);
        }
        if !(self.reduced && rhs.reduced) {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return Self::normalized(num, &self.den * &rhs.den, DEFAULT_TERM_CAP);
        }
        // a/b + c/d with g = gcd(b, d): only g can share factors with the
        // new numerator.
        let g = gcd(&self.den, &rhs.den);
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &d1) + &(&rhs.num * &b1);
        if num.is_zero() {
            return Self::from_poly(num);
        }
        let g2 = if g.is_one() { g.clone() } else { gcd(&num, &g) };
        let num = num.div_exact(&g2).expect("gcd divides");
        let den = &b1 * &rhs.den.div_exact(&g2).expect("gcd divides");
        Self::scaled(num, den, true)
    }
}

impl Sub for RationalFunction {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for RationalFunction {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.assert_compatible(&rhs);
        if !(self.reduced && rhs.reduced) {
            return Self::normalized(&self.num * &rhs.num, &self.den * &rhs.den, DEFAULT_TERM_CAP);
        }
        // cross-cancel before multiplying
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let (a, d) = if g1.is_one() || self.num.is_zero() {
            (self.num, rhs.den)
        } else {
            (self.num.div_exact(&g1).expect("gcd divides"), rhs.den.div_exact(&g1).expect("gcd divides"))
        };
        let (c, b) = if g2.is_one() || rhs.num.is_zero() {
            (rhs.num, self.den)
        } else {
            (rhs.num.div_exact(&g2).expect("gcd divides"), self.den.div_exact(&g2).expect("gcd divides"))
        };
        let num = &a * &c;
        if num.is_zero() {
            return Self::from_poly(num);
        }
        let den = &b * &d;
        if num.term_count() + den.term_count() > DEFAULT_TERM_CAP {
            return Self::scaled(num, den, false);
        }
        Self::scaled(num, den, true)
    }
}

impl Neg for RationalFunction {
    type Output = Self;
    fn neg(self) -> Self {
        RationalFunction { num: -self.num, den: self.den, reduced: self.reduced }
    }
}

impl Scalar for RationalFunction {
    fn constant_like(&self, c: &BigRational) -> Self {
        Self::constant(self.nvars(), c.clone())
    }

    fn try_recip(&self) -> Result<Self, Singular> {
        if self.num.is_zero() {
            return Err(Singular);
        }
        Ok(Self::scaled(self.den.clone(), self.num.clone(), self.reduced))
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

impl fmt::Display for RationalFunction {
    /// `num` when the denominator is one, otherwise `(num)/(den)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl From<MultiPoly> for RationalFunction {
    fn from(p: MultiPoly) -> Self {
        Self::from_poly(p)
    }
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::constant(0, BigRational::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::parse_rational;
    use num_complex::Complex64;

    fn r(s: &str, n: usize) -> RationalFunction {
        parse_rational(s, n).unwrap()
    }

    #[test]
    fn compose_identity_projection() {
        let f = r("(y1^2+1)/(y1-3)", 1);
        assert_eq!(r("y1", 1).compose(&[f.clone()]).unwrap(), f);
    }

    #[test]
    fn compose_involution() {
        let inv = r("1/y1", 1);
        assert_eq!(inv.compose(&[inv.clone()]).unwrap(), r("y1", 1));
    }

    #[test]
    fn compose_to_zero_denominator_fails() {
        let f = r("1/(y1-y2)", 2);
        let g = r("y1", 2);
        assert_eq!(f.compose(&[g.clone(), g]), Err(RatFunError::ZeroDenominator));
    }

    #[test]
    fn derivatives() {
        assert_eq!(r("y1*y2", 2).derivative(0).unwrap(), r("y2", 2));
        assert_eq!(r("1/y1", 1).derivative(0).unwrap(), r("-1/y1^2", 1));
    }

    #[test]
    fn evaluation() {
        let f = r("(y1+y2)/y3", 3);
        let pt = [1.0, 2.0, 3.0].map(|x| Complex64::new(x, 0.0));
        assert!((f.eval(&pt).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let bad = [1.0, 2.0, 0.0].map(|x| Complex64::new(x, 0.0));
        assert_eq!(f.eval(&bad), Err(RatFunError::EvaluationSingular));
    }

    #[test]
    fn normal_form_is_canonical() {
        let a = r("(2*y1^2-2)/(-4*y1-4)", 1);
        assert_eq!(a.numerator(), &crate::ratfun::parse_poly("-1/2*y1+1/2", 1).unwrap());
        assert_eq!(a.denominator(), &MultiPoly::one(1));
        assert!(a.is_reduced());
    }

    #[test]
    fn addition_uses_common_factor() {
        let a = r("1/(y1*(1+y2))", 2);
        let b = r("1/(y1*(1-y2))", 2);
        let s = a + b;
        assert_eq!(s, r("2/(y1-y1*y2^2)", 2));
    }

    #[test]
    fn unreduced_values_compare_by_value() {
        let f = r("(y1^2-1)/(y1-1)", 1);
        let g = f.normalize_with_cap(0);
        assert!(f.is_reduced());
        assert_eq!(f, g);
    }
}
