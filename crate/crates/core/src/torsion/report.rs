use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::exact::{rational_string, ExactCheck};
use crate::ratfun::{format_integer_poly, Quadratic, UniPoly};

/// Outcome of a torsion computation.
///
/// Complex numbers serialize as `[re, im]`, polynomials as ascending
/// coefficient arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorsionReport {
    pub rank: usize,
    pub punctures: usize,
    /// `"reference"` or `"canonical"` variable order.
    pub labeling: String,
    pub seed: String,
    pub fixed_point: Vec<Complex64>,
    /// `max_i |φ*(y)_i − y_i|`.
    pub residual: f64,
    pub degenerate: bool,
    /// Coefficients of `det(tJ − I)`, ascending.
    pub alexander: Vec<Complex64>,
    pub alexander_integers: Option<Vec<i64>>,
    /// `"faddeev-leverrier"`, or `"interpolation"` when the former disagreed
    /// with direct determinants.
    pub polynomial_method: String,
    pub t1_multiplicity: usize,
    /// `m(n−1)`.
    pub normalization_exponent: usize,
    /// The limit up to sign, normalized to positive real part.
    pub torsion: Option<Complex64>,
    pub torsion_raw: Option<Complex64>,
    pub diagnosis: Option<String>,
    pub exact: Option<ExactReport>,
    pub iterations: usize,
    pub trace: Vec<f64>,
    pub starts: usize,
    pub distinct_fixed_points: usize,
}

/// Exact data in `Q(√d)`, rationals written `p/q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactReport {
    pub d: i64,
    pub fixed_point: Vec<String>,
    pub alexander: Vec<String>,
    pub alexander_integers: Option<Vec<i64>>,
    pub t1_multiplicity: usize,
    pub torsion: Option<String>,
    pub torsion_raw: Option<String>,
    /// Largest coefficient distance to the numeric polynomial.
    pub deviation: f64,
}

fn exact_string(q: &Quadratic) -> String {
    if q.is_rational() {
        rational_string(&q.a)
    } else {
        q.to_string()
    }
}

impl ExactReport {
    pub fn new(check: &ExactCheck, numeric: &[Complex64]) -> Self {
        ExactReport {
            d: check.d,
            fixed_point: check.point.iter().map(exact_string).collect(),
            alexander: check.alexander.coeffs().iter().map(exact_string).collect(),
            alexander_integers: check.integer_coefficients(),
            t1_multiplicity: check.t1_multiplicity,
            torsion: check.torsion.as_ref().map(|v| exact_string(&v.canonical)),
            torsion_raw: check.torsion.as_ref().map(|v| exact_string(&v.raw)),
            deviation: check.deviation_from(&UniPoly::new(numeric.to_vec())),
        }
    }
}

/// `a`, `bi`, or `a + bi` with 12 significant digits and tiny parts dropped.
pub fn format_complex(z: Complex64) -> String {
    let scale = z.norm().max(1.0);
    let clean = |x: f64| if x.abs() < 1e-13 * scale { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    let num = |x: f64| {
        let s = format!("{:.12}", x);
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    };
    match (re == 0.0, im == 0.0) {
        (_, true) => num(re),
        (true, false) => format!("{}i", num(im)),
        (false, false) => {
            let sign = if im < 0.0 { '-' } else { '+' };
            format!("{} {sign} {}i", num(re), num(im.abs()))
        }
    }
}

impl TorsionReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serializes")
    }

    /// `true` when the torsion limit exists.
    pub fn is_regular(&self) -> bool {
        self.torsion.is_some()
    }

    /// Human-readable summary.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "rank n = {}, punctures m = {}, {} labeling", self.rank, self.punctures, self.labeling);
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(
            s,
            "fixed point (residual {:.2e}, {} iterations){}:",
            self.residual,
            self.iterations,
            if self.degenerate { ", degenerate: every point is fixed" } else { "" }
        );
        let exact = self.exact.as_ref();
        for (i, z) in self.fixed_point.iter().enumerate() {
            match exact {
                Some(e) => {
                    let _ = writeln!(s, "  y{} = {}    ({})", i + 1, e.fixed_point[i], format_complex(*z));
                }
                None => {
                    let _ = writeln!(s, "  y{} = {}", i + 1, format_complex(*z));
                }
            }
        }
        let _ = writeln!(s, "twisted Alexander polynomial det(tJ - I) ({}):", self.polynomial_method);
        match &self.alexander_integers {
            Some(ints) => {
                let _ = writeln!(s, "  {}", format_integer_poly(ints, "t"));
            }
            None => {
                for (k, c) in self.alexander.iter().enumerate().rev() {
                    let _ = writeln!(s, "  t^{k}: {}", format_complex(*c));
                }
            }
        }
        if let Some(e) = exact {
            let _ = writeln!(s, "exact in Q(sqrt({})), deviation from numeric {:.2e}:", e.d, e.deviation);
            match &e.alexander_integers {
                Some(ints) => {
                    let _ = writeln!(s, "  {}", format_integer_poly(ints, "t"));
                }
                None => {
                    for (k, c) in e.alexander.iter().enumerate().rev() {
                        let _ = writeln!(s, "  t^{k}: {c}");
                    }
                }
            }
        }
        let _ = writeln!(
            s,
            "multiplicity of t = 1: {} (m(n-1) = {})",
            self.t1_multiplicity, self.normalization_exponent
        );
        match (self.torsion, self.torsion_raw) {
            (Some(t), Some(raw)) => {
                match exact.and_then(|e| Some((e.torsion.clone()?, e.torsion_raw.clone()?))) {
                    Some((canonical, limit)) => {
                        let _ = writeln!(
                            s,
                            "torsion (up to sign): {canonical}    limit: {limit}    numeric: {}",
                            format_complex(t)
                        );
                    }
                    None => {
                        let _ = writeln!(
                            s,
                            "torsion (up to sign): {}    limit: {}",
                            format_complex(t),
                            format_complex(raw)
                        );
                    }
                }
            }
            _ => {
                let _ = writeln!(s, "torsion: undefined");
            }
        }
        if let Some(d) = &self.diagnosis {
            let _ = writeln!(s, "diagnosis: {d}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_formatting() {
        assert_eq!(format_complex(Complex64::new(1.0, 0.0)), "1");
        assert_eq!(format_complex(Complex64::new(-0.5, 0.8660254037844386)), "-0.5 + 0.866025403784i");
        assert_eq!(format_complex(Complex64::new(0.0, -2.0)), "-2i");
        assert_eq!(format_complex(Complex64::new(84.0, 1e-15)), "84");
    }
}
