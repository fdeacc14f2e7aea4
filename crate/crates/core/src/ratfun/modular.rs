//! Univariate images modulo a prime, used to bound gcd degrees.
//!
//! If `g = gcd(a, b)` and `a(x) mod p` keeps its degree in `v` after
//! substituting values for the other variables, then the image of `g` keeps
//! its degree too and divides the gcd of the images. The image gcd's degree
//! is therefore an upper bound for `deg_v g`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::poly::MultiPoly;

const P: u64 = (1 << 61) - 1;

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn add(a: u64, b: u64) -> u64 {
    (a + b) % P
}

fn sub(a: u64, b: u64) -> u64 {
    (a + P - b) % P
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}

fn reduce(x: &BigInt) -> u64 {
    let m = BigInt::from(P);
    let r = ((x % &m) + &m) % &m;
    r.to_u64().expect("reduced below the modulus")
}

/// SplitMix64, for reproducible evaluation points.
struct Points(u64);

impl Points {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        (z ^ (z >> 31)) % (P - 1) + 1
    }
}

/// Image of `p` in `F_p[y_var]` at `point`; `None` if a denominator vanishes.
fn image(p: &MultiPoly, var: usize, point: &[u64]) -> Option<Vec<u64>> {
    let mut out = vec![0; p.degree_in(var) as usize + 1];
    for (m, c) in p.terms() {
        let den = reduce(c.denom());
        if den == 0 {
            return None;
        }
        let mut t = mul(reduce(c.numer()), inv(den));
        for (i, &e) in m.exponents().iter().enumerate() {
            if i != var && e > 0 {
                t = mul(t, pow(point[i], e as u64));
            }
        }
        let k = m.exponents()[var] as usize;
        out[k] = add(out[k], t);
    }
    Some(out)
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn uni_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let lb = inv(*b.last().expect("nonempty"));
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let f = mul(*a.last().expect("nonempty"), lb);
            for (i, &bi) in b.iter().enumerate() {
                a[i + shift] = sub(a[i + shift], mul(f, bi));
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Upper bounds for `deg_v gcd(a, b)` for every variable `v`, or `None` for
/// variables where no degree-preserving point was found.
pub(crate) fn gcd_degree_bounds(a: &MultiPoly, b: &MultiPoly) -> Vec<Option<u32>> {
    let n = a.nvars();
    let mut rng = Points(0x5EED ^ (a.term_count() as u64) << 20 ^ b.term_count() as u64);
    (0..n)
        .map(|v| {
            let (da, db) = (a.degree_in(v), b.degree_in(v));
            if da == 0 || db == 0 {
                return Some(0);
            }
            for _ in 0..3 {
                let point: Vec<u64> = (0..n).map(|_| rng.next()).collect();
                let (Some(ia), Some(ib)) = (image(a, v, &point), image(b, v, &point)) else { continue };
                if ia.last() == Some(&0) || ib.last() == Some(&0) {
                    continue;
                }
                return Some(uni_gcd_degree(ia, ib) as u32);
            }
            None
        })
        .collect()
}
