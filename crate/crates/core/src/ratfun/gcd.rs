//! Multivariate GCD over Q by recursive content / primitive-part Euclid.
//!
//! A polynomial is viewed as univariate in its highest-index variable with
//! coefficients in the remaining ones. The content (gcd of those
//! coefficients) is handled recursively; the primitive parts are reduced by
//! a primitive pseudo-remainder sequence. Modular degree bounds pick the
//! main variable and settle coprime inputs without any elimination.

use num_rational::BigRational;
use num_traits::One;

use super::modular::gcd_degree_bounds;
use super::poly::{Monomial, MultiPoly};

/// Greatest common divisor, normalized to an integer primitive polynomial
/// with positive leading coefficient. `gcd(0, b)` is `b` normalized;
/// `gcd(0, 0)` is zero.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    assert_eq!(a.nvars(), b.nvars(), "variable count mismatch");
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    gcd_nonzero(a, b).primitive()
}

fn highest_var(p: &MultiPoly) -> Option<usize> {
    (0..p.nvars()).rev().find(|&v| p.uses_var(v))
}

fn monomial_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let ea = a.min_exponents();
    let eb = b.min_exponents();
    let e = ea.exponents().iter().zip(eb.exponents()).map(|(x, y)| *x.min(y)).collect();
    MultiPoly::monomial(Monomial::new(e), BigRational::one())
}

/// Result is correct up to a nonzero rational factor.
fn gcd_nonzero(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let n = a.nvars();
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(n);
    }
    if a.is_monomial() || b.is_monomial() {
        return monomial_gcd(a, b);
    }
    if a == b {
        return a.clone();
    }
    let va = highest_var(a).expect("non-constant");
    let vb = highest_var(b).expect("non-constant");
    let top = va.max(vb);
    if !a.uses_var(top) {
        return gcd_nonzero(a, &content_in(b, top));
    }
    if !b.uses_var(top) {
        return gcd_nonzero(&content_in(a, top), b);
    }
    if gcd_degree_bounds(a, b).iter().all(|d| *d == Some(0)) {
        return MultiPoly::one(n);
    }
    let v = top;
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd_nonzero(&ca, &cb);
    let g = primitive_prs(pa, pb, v);
    &c * &g
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `var`.
fn content_in(p: &MultiPoly, var: usize) -> MultiPoly {
    let mut coeffs = p.coefficients_in(var).into_iter().filter(|c| !c.is_zero());
    let mut g = coeffs.next().expect("nonzero polynomial").primitive();
    for c in coeffs {
        if g.is_constant() {
            break;
        }
        g = gcd_nonzero(&g, &c).primitive();
    }
    g
}

fn primitive_in(p: &MultiPoly, var: usize) -> MultiPoly {
    let c = content_in(p, var);
    p.div_exact(&c).expect("content divides").primitive()
}

/// `lc(b)^k * a mod b` in `var`, for some `k ≥ 0`.
fn pseudo_remainder(a: &MultiPoly, b: &MultiPoly, var: usize) -> MultiPoly {
    let db = b.degree_in(var);
    let lcb = b.coefficients_in(var).pop().expect("nonzero");
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(var) >= db {
        let dr = r.degree_in(var);
        let lcr = r.coefficients_in(var).pop().expect("nonzero");
        r = &(&lcb * &r) - &(&lcr * &b.shift(var, dr - db));
    }
    r
}

/// Gcd of two polynomials that are primitive with respect to `var`.
fn primitive_prs(a: MultiPoly, b: MultiPoly, var: usize) -> MultiPoly {
    let (mut a, mut b) = if a.degree_in(var) >= b.degree_in(var) { (a, b) } else { (b, a) };
    loop {
        if b.degree_in(var) == 0 {
            // b primitive in var and free of var means b is a unit here
            return MultiPoly::one(a.nvars());
        }
        let r = pseudo_remainder(&a, &b, var);
        if r.is_zero() {
            return b.primitive();
        }
        if r.degree_in(var) == 0 {
            return MultiPoly::one(a.nvars());
        }
        a = b;
        b = primitive_in(&r, var);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::parse_poly;

    fn p(s: &str) -> MultiPoly {
        parse_poly(s, 8).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(gcd(&p("y1^2-y2^2"), &p("y1-y2")), p("y1-y2"));
    }

    #[test]
    fn gcd_with_one() {
        assert!(gcd(&p("y1^3*y4 + 7*y2 - 1"), &p("1")).is_one());
    }

    #[test]
    fn gcd_with_zero_normalizes_the_other() {
        assert_eq!(gcd(&p("0"), &p("-2*y1-4")), p("y1+2"));
    }

    #[test]
    fn repeated_factors() {
        let a = p("(1+y3)^2*(1+y6)");
        let b = p("(1+y3)*(1+y6)^2");
        let g = gcd(&a, &b);
        let expected = p("(1+y3)*(1+y6)");
        assert_eq!(g, expected);
        // independent check: the cofactors are exact and coprime
        let ca = a.div_exact(&g).unwrap();
        let cb = b.div_exact(&g).unwrap();
        assert_eq!(ca, p("1+y3"));
        assert_eq!(cb, p("1+y6"));
    }

    #[test]
    fn coprime_multivariate() {
        let a = p("1+y3+y3*y8+y3*y6*y8");
        let b = p("1+y6+y4*y6+y3*y4*y6");
        assert!(gcd(&a, &b).is_one());
        let c = p("y1*y2 + y5 - 3");
        assert_eq!(gcd(&(&a * &c), &(&b * &c)), c);
    }

    #[test]
    fn monomial_content_is_extracted() {
        assert_eq!(gcd(&p("y1^2*y3*(1+y2)"), &p("y1*y3^2*(1+y2)^2")), p("y1*y3*(1+y2)"));
    }
}
