//! Damped Gauss–Newton for `φ*(y) = y`.
//!
//! At a fixed point `J − I` always has a kernel containing the directions
//! that change the puncture invariants (the monomials `Π y_i^{k_i}` for `k`
//! in the kernel of `ε`), so the fixed locus is never isolated. The solver
//! appends the equations `Π y_i^{k_i} = 1` of unipotent boundary holonomy and
//! takes minimum-norm least-squares steps through an SVD.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TorsionError;
use crate::cluster::{ClusterError, ClusterMap};
use crate::ratfun::DualScalar;

/// Singular values below this fraction of the largest are treated as zero.
const RANK_CUTOFF: f64 = 1e-10;

const POLISH_STEPS: usize = 3;

/// Coordinates below this magnitude count as having left `(C*)^l`.
const ZERO_COORDINATE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Bound on the max-norm of the residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Impose `Π y^k = 1` for every kernel vector `k` of the exchange matrix.
    pub unipotent: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tolerance: 1e-12, max_iterations: 100, max_halvings: 20, unipotent: true }
    }
}

/// A converged fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub point: Vec<Complex64>,
    /// `max_i |φ*(y)_i − y_i|`.
    pub residual: f64,
    pub iterations: usize,
    /// Euclidean norm of the full residual before each iteration.
    pub trace: Vec<f64>,
    /// `φ*` is the identity to first order here: `J = I`.
    pub degenerate: bool,
}

struct System {
    map: ClusterMap,
    casimirs: Vec<Vec<i64>>,
}

impl System {
    fn new(map: &ClusterMap, unipotent: bool) -> Self {
        let casimirs = if unipotent { map.initial().kernel_basis() } else { Vec::new() };
        System { map: map.clone(), casimirs }
    }

    fn casimir(k: &[i64], y: &[Complex64]) -> Complex64 {
        y.iter().zip(k).map(|(v, &e)| v.powi(e as i32)).product()
    }

    fn residual(&self, y: &[Complex64]) -> Result<Vec<Complex64>, ClusterError> {
        let image = self.map.apply(y)?;
        let mut f: Vec<Complex64> = image.iter().zip(y).map(|(a, b)| a - b).collect();
        f.extend(self.casimirs.iter().map(|k| Self::casimir(k, y) - 1.0));
        Ok(f)
    }

    /// Residual and its Jacobian (rows: equations, columns: variables).
    fn linearize(&self, y: &[Complex64]) -> Result<(Vec<Complex64>, DMatrix<Complex64>), ClusterError> {
        let l = y.len();
        let image = self.map.apply(&DualScalar::seed(y))?;
        let rows = l + self.casimirs.len();
        let mut f = Vec::with_capacity(rows);
        let mut df = DMatrix::zeros(rows, l);
        for (j, out) in image.iter().enumerate() {
            f.push(out.value - y[j]);
            for i in 0..l {
                df[(j, i)] = out.gradient[i];
            }
            df[(j, j)] -= 1.0;
        }
        for (r, k) in self.casimirs.iter().enumerate() {
            let c = Self::casimir(k, y);
            f.push(c - 1.0);
            for i in 0..l {
                df[(l + r, i)] = c * k[i] as f64 / y[i];
            }
        }
        Ok((f, df))
    }
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn two_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_torus(y: &[Complex64]) -> Result<(), TorsionError> {
    match y.iter().position(|z| !(z.norm() > ZERO_COORDINATE) || !z.is_finite()) {
        Some(vertex) => Err(TorsionError::LeftTorus { vertex }),
        None => Ok(()),
    }
}

/// Solves `φ*(y) = y` from `seed`.
///
/// A seed that is already fixed to within the tolerance is returned as is.
pub fn solve_fixed_point(map: &ClusterMap, seed: &[Complex64], opts: &SolveOptions) -> Result<FixedPoint, TorsionError> {
    let l = map.dimension();
    if seed.len() != l {
        return Err(ClusterError::LengthMismatch { expected: l, got: seed.len() }.into());
    }
    check_torus(seed)?;
    let system = System::new(map, opts.unipotent);
    let mut y = seed.to_vec();
    let (mut f, mut df) = system.linearize(&y)?;
    if max_norm(&f[..l]) < opts.tolerance {
        return finish(&system, y, 0, vec![two_norm(&f)]);
    }
    let mut trace = Vec::new();
    for iteration in 0..opts.max_iterations {
        trace.push(two_norm(&f));
        if max_norm(&f) < opts.tolerance {
            let y = polish(&system, y, f, df);
            return finish(&system, y, iteration, trace);
        }
        let step = gauss_newton_step(&f, &df)?;
        let current = two_norm(&f);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<Complex64> = y.iter().zip(step.iter()).map(|(a, d)| a + d * lambda).collect();
            if check_torus(&trial).is_ok() {
                if let Ok(ft) = system.residual(&trial) {
                    if two_norm(&ft) < current || max_norm(&ft) < opts.tolerance {
                        accepted = Some(trial);
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        let Some(next) = accepted else {
            return Err(TorsionError::NoConvergence { iterations: iteration, residual: max_norm(&f) });
        };
        y = next;
        (f, df) = system.linearize(&y)?;
    }
    if max_norm(&f) < opts.tolerance {
        trace.push(two_norm(&f));
        return finish(&system, y, opts.max_iterations, trace);
    }
    Err(TorsionError::NoConvergence { iterations: opts.max_iterations, residual: max_norm(&f) })
}

/// Minimum-norm solution of `df · step = −f`.
fn gauss_newton_step(f: &[Complex64], df: &DMatrix<Complex64>) -> Result<DVector<Complex64>, TorsionError> {
    let svd = df.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.iter().copied().filter(|s| *s > smax * RANK_CUTOFF).fold(smax, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let rhs = DVector::from_iterator(f.len(), f.iter().map(|z| -z));
    let step = svd.solve(&rhs, smax * RANK_CUTOFF).map_err(|_| TorsionError::SingularStep { condition })?;
    if smax == 0.0 || !step.iter().all(|z| z.is_finite()) {
        return Err(TorsionError::SingularStep { condition });
    }
    Ok(step)
}

/// A few undamped steps past convergence, each kept only if it lowers the
/// residual.
fn polish(system: &System, mut y: Vec<Complex64>, mut f: Vec<Complex64>, mut df: DMatrix<Complex64>) -> Vec<Complex64> {
    for _ in 0..POLISH_STEPS {
        let Ok(step) = gauss_newton_step(&f, &df) else { break };
        let trial: Vec<Complex64> = y.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
        match system.linearize(&trial) {
            Ok((ft, dft)) if two_norm(&ft) < two_norm(&f) => (y, f, df) = (trial, ft, dft),
            _ => break,
        }
    }
    y
}

fn finish(system: &System, y: Vec<Complex64>, iterations: usize, trace: Vec<f64>) -> Result<FixedPoint, TorsionError> {
    check_torus(&y)?;
    let l = y.len();
    let image = system.map.apply(&DualScalar::seed(&y))?;
    let residual = image.iter().zip(&y).map(|(a, b)| (a.value - b).norm()).fold(0.0, f64::max);
    let degenerate = image
        .iter()
        .enumerate()
        .all(|(j, out)| (0..l).all(|i| (out.gradient[i] - if i == j { 1.0 } else { 0.0 }).norm() < 1e-12));
    Ok(FixedPoint { point: y, residual, iterations, trace, degenerate })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultistartOptions {
    pub starts: usize,
    /// Master seed; start `i` draws from ChaCha stream `i`.
    pub seed: u64,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

impl Default for MultistartOptions {
    fn default() -> Self {
        MultistartOptions { starts: 100, seed: 0, inner_radius: 0.2, outer_radius: 5.0 }
    }
}

/// The outcome of one start.
#[derive(Debug, Clone, PartialEq)]
pub struct Start {
    pub index: usize,
    pub seed_point: Vec<Complex64>,
    pub outcome: Result<FixedPoint, TorsionError>,
}

/// A point with coordinates log-uniform in modulus on the annulus and
/// uniform in argument.
pub fn sample_annulus(len: usize, opts: &MultistartOptions, index: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index as u64);
    let (lo, hi) = (opts.inner_radius.ln(), opts.outer_radius.ln());
    (0..len)
        .map(|_| {
            let r = rng.random_range(lo..hi).exp();
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(r, theta)
        })
        .collect()
}

/// Solves from `opts.starts` random seeds in parallel. The result is in
/// start order and does not depend on the thread count.
pub fn multistart(map: &ClusterMap, opts: &MultistartOptions, solve: &SolveOptions) -> Vec<Start> {
    (0..opts.starts)
        .into_par_iter()
        .map(|index| {
            let seed_point = sample_annulus(map.dimension(), opts, index);
            let outcome = solve_fixed_point(map, &seed_point, solve);
            Start { index, seed_point, outcome }
        })
        .collect()
}

/// Converged solutions with duplicates (max-norm distance below `merge`)
/// removed. Order: lowest residual first, where residuals under the solver
/// tolerance count as tied, then by start index.
pub fn distinct_fixed_points(starts: &[Start], tolerance: f64, merge: f64) -> Vec<(usize, FixedPoint)> {
    let mut found: Vec<(usize, FixedPoint)> =
        starts.iter().filter_map(|s| s.outcome.as_ref().ok().map(|p| (s.index, p.clone()))).collect();
    found.sort_by(|(ia, a), (ib, b)| {
        let ka = a.residual.max(tolerance);
        let kb = b.residual.max(tolerance);
        ka.total_cmp(&kb).then(ia.cmp(ib))
    });
    let mut out: Vec<(usize, FixedPoint)> = Vec::new();
    for (i, p) in found {
        let dup = out.iter().any(|(_, q)| {
            p.point.iter().zip(&q.point).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) < merge
        });
        if !dup {
            out.push((i, p));
        }
    }
    out
}
