use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::alexander::{
    alexander_discrepancy, alexander_poly, alexander_poly_interpolated, jacobian_at, multiplicity_tolerance, torsion_value,
};
use super::exact::ExactCheck;
use super::report::{ExactReport, TorsionReport};
use super::solve::{distinct_fixed_points, multistart, solve_fixed_point, FixedPoint, MultistartOptions, SolveOptions};
use super::TorsionError;
use crate::cluster::{embed_pgl2, mapping_class_map, ClusterError, ClusterMap};
use crate::quiver::torus_reference_order;
use crate::surface::{MappingWord, Triangulation};

/// Relative disagreement with LU determinants beyond which the
/// Faddeev–LeVerrier coefficients are replaced by interpolated ones.
const POLYNOMIAL_AGREEMENT: f64 = 1e-9;

/// Two multistart solutions closer than this are the same fixed point.
const MERGE_DISTANCE: f64 = 1e-8;

/// For each puncture, `Σ_k y_{e_1} ⋯ y_{e_k}` over the cyclic edge
/// sequence of [`Triangulation::puncture_cycles`] at a rank-2 point in
/// canonical order. When the puncture's Casimir is 1 the monodromy around it
/// is unipotent, and trivial exactly when this sum vanishes.
pub fn peripheral_sums(tri: &Triangulation, point: &[Complex64]) -> Vec<Complex64> {
    peripheral_terms(tri, point).into_iter().map(|(sum, _)| sum).collect()
}

/// Each puncture's sum together with the sum of its terms' magnitudes.
fn peripheral_terms(tri: &Triangulation, point: &[Complex64]) -> Vec<(Complex64, f64)> {
    tri.puncture_cycles()
        .iter()
        .map(|cycle| {
            let mut prefix = Complex64::new(1.0, 0.0);
            let (mut sum, mut size) = (Complex64::new(0.0, 0.0), 0.0);
            for &e in cycle {
                prefix *= point[e];
                sum += prefix;
                size += prefix.norm();
            }
            (sum, size)
        })
        .collect()
}

/// Some puncture of the rank-2 point has trivial monodromy.
fn peripherally_trivial(tri: &Triangulation, point: &[Complex64]) -> bool {
    peripheral_terms(tri, point).iter().any(|(sum, size)| sum.norm() < 1e-8 * size)
}

/// Of a complex-conjugate pair, the member whose first non-real coordinate
/// has negative imaginary part ranks second.
fn conjugate_rank(point: &[Complex64]) -> bool {
    point.iter().find(|z| z.im.abs() > 1e-8).is_some_and(|z| z.im < 0.0)
}

/// A mapping class map together with the variable order it is reported in.
///
/// On the built-in once-punctured torus, ranks with a reference order use
/// it; everything else uses the canonical vertex order.
#[derive(Debug, Clone)]
pub struct Chart {
    pub map: ClusterMap,
    /// Reported variable `i` is canonical vertex `order[i]`.
    pub order: Option<Vec<usize>>,
}

impl Chart {
    pub fn new(tri: &Triangulation, word: &MappingWord, n: usize) -> Result<Self, ClusterError> {
        let map = mapping_class_map(tri, word, n)?;
        let order = if *tri == Triangulation::once_punctured_torus() { torus_reference_order(n) } else { None };
        match order {
            Some(order) => Ok(Chart { map: map.relabeled(&order)?, order: Some(order) }),
            None => Ok(Chart { map, order: None }),
        }
    }

    pub fn labeling(&self) -> &'static str {
        if self.order.is_some() {
            "reference"
        } else {
            "canonical"
        }
    }

    pub fn to_canonical<T: Clone>(&self, p: &[T]) -> Vec<T> {
        match &self.order {
            Some(order) => {
                let mut out = p.to_vec();
                for (i, &o) in order.iter().enumerate() {
                    out[o] = p[i].clone();
                }
                out
            }
            None => p.to_vec(),
        }
    }

    pub fn from_canonical<T: Clone>(&self, p: &[T]) -> Vec<T> {
        match &self.order {
            Some(order) => order.iter().map(|&o| p[o].clone()).collect(),
            None => p.to_vec(),
        }
    }
}

/// Where the solver starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedStrategy {
    /// An explicit point in the chart's labeling.
    Point(Vec<Complex64>),
    /// The rank-`n` image of rank-2 fixed points found by multistart.
    Lift(MultistartOptions),
    /// Multistart directly at rank `n`.
    Multistart(MultistartOptions),
}

impl SeedStrategy {
    /// Lift for `n > 2`, multistart for `n = 2`.
    pub fn default_for(n: usize, seed: u64) -> Self {
        let opts = MultistartOptions { seed, ..MultistartOptions::default() };
        if n > 2 {
            SeedStrategy::Lift(opts)
        } else {
            SeedStrategy::Multistart(opts)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub solve: SolveOptions,
    /// Recompute exactly in `Q(√d)`.
    pub exact: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Map,
    Seed,
    Solve,
    Jacobian,
    Exact,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Map => "map",
            Stage::Seed => "seed",
            Stage::Solve => "solve",
            Stage::Jacobian => "jacobian",
            Stage::Exact => "exact",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{stage} stage: {error}")]
pub struct PipelineError {
    pub stage: Stage,
    pub error: TorsionError,
}

fn at(stage: Stage) -> impl Fn(TorsionError) -> PipelineError {
    move |error| PipelineError { stage, error }
}

struct Job<'a> {
    tri: &'a Triangulation,
    chart: Chart,
    n: usize,
    opts: &'a PipelineOptions,
}

impl Job<'_> {
    /// Jacobian, polynomial and torsion at a converged fixed point.
    fn analyze(&self, fixed: FixedPoint, seed: String, starts: usize, found: usize) -> Result<TorsionReport, PipelineError> {
        let jacobian =
            jacobian_at(&self.chart.map, &fixed.point).map_err(|e| at(Stage::Jacobian)(e.into()))?;
        let leverrier = alexander_poly(&jacobian);
        let discrepancy = alexander_discrepancy(&leverrier, &jacobian);
        let (alexander, polynomial_method) = if discrepancy <= POLYNOMIAL_AGREEMENT {
            (leverrier, "faddeev-leverrier")
        } else {
            (alexander_poly_interpolated(&jacobian), "interpolation")
        };
        let tol = multiplicity_tolerance(&alexander);
        let punctures = self.tri.puncture_count();
        let expected = punctures * (self.n - 1);
        let t1_multiplicity = alexander.multiplicity_at_one(tol);
        let (torsion, diagnosis) = match torsion_value(&alexander, punctures, self.n, tol) {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Ok(TorsionReport {
            rank: self.n,
            punctures,
            labeling: self.chart.labeling().to_string(),
            seed,
            fixed_point: fixed.point.clone(),
            residual: fixed.residual,
            degenerate: fixed.degenerate,
            alexander_integers: alexander.integer_coefficients_scaled(),
            alexander: alexander.into_coeffs(),
            polynomial_method: polynomial_method.to_string(),
            t1_multiplicity,
            normalization_exponent: expected,
            torsion: torsion.as_ref().map(|v| v.canonical),
            torsion_raw: torsion.as_ref().map(|v| v.raw),
            diagnosis,
            exact: None,
            iterations: fixed.iterations,
            trace: fixed.trace,
            starts,
            distinct_fixed_points: found,
        })
    }

    /// Tries candidate seeds in order; the first regular report wins, else
    /// the first report.
    fn first_regular(
        &self,
        candidates: Vec<(String, Vec<Complex64>)>,
        starts: usize,
    ) -> Result<TorsionReport, PipelineError> {
        let found = candidates.len();
        let mut fallback: Option<Result<TorsionReport, PipelineError>> = None;
        for (label, seed) in candidates {
            let attempt = solve_fixed_point(&self.chart.map, &seed, &self.opts.solve)
                .map_err(at(Stage::Solve))
                .and_then(|fixed| self.analyze(fixed, label, starts, found));
            match attempt {
                Ok(r) if r.diagnosis.is_none() => return Ok(r),
                Ok(r) => {
                    if !matches!(fallback, Some(Ok(_))) {
                        fallback = Some(Ok(r));
                    }
                }
                Err(e) => {
                    if fallback.is_none() {
                        fallback = Some(Err(e));
                    }
                }
            }
        }
        fallback.unwrap_or(Err(PipelineError { stage: Stage::Seed, error: TorsionError::NoFixedPoint { starts } }))
    }

    /// Distinct converged multistart solutions, ranked: rank-2 points with a
    /// puncture of trivial monodromy last, then conjugate-pair order, then
    /// start order.
    fn multistart_candidates(&self, chart: &Chart, rank: usize, ms: &MultistartOptions) -> Vec<(usize, FixedPoint)> {
        let starts = multistart(&chart.map, ms, &self.opts.solve);
        let mut found = distinct_fixed_points(&starts, self.opts.solve.tolerance, MERGE_DISTANCE);
        found.sort_by_key(|(i, f)| {
            let trivial = rank == 2 && peripherally_trivial(self.tri, &chart.to_canonical(&f.point));
            (trivial, conjugate_rank(&f.point), *i)
        });
        found
    }

    fn run(&self, strategy: &SeedStrategy, word: &MappingWord) -> Result<TorsionReport, PipelineError> {
        match strategy {
            SeedStrategy::Point(p) => self.first_regular(vec![("explicit point".into(), p.clone())], 1),
            SeedStrategy::Multistart(ms) => {
                let found = self.multistart_candidates(&self.chart, self.n, ms);
                let candidates =
                    found.into_iter().map(|(i, f)| (format!("multistart start {i} (seed {})", ms.seed), f.point)).collect();
                self.first_regular(candidates, ms.starts)
            }
            SeedStrategy::Lift(ms) if self.n == 2 => self.run(&SeedStrategy::Multistart(ms.clone()), word),
            SeedStrategy::Lift(ms) => {
                let low = Chart::new(self.tri, word, 2).map_err(|e| at(Stage::Map)(e.into()))?;
                let found = self.multistart_candidates(&low, 2, ms);
                let mut candidates = Vec::with_capacity(found.len());
                for (i, f) in found {
                    let canonical = low.to_canonical(&f.point);
                    let lifted = embed_pgl2(self.tri, &canonical, self.n).map_err(|e| at(Stage::Seed)(e.into()))?;
                    candidates.push((
                        format!("rank-2 fixed point from start {i} (seed {}), lifted", ms.seed),
                        self.chart.from_canonical(&lifted),
                    ));
                }
                self.first_regular(candidates, ms.starts)
            }
        }
    }
}

/// Mapping class map, seed, fixed point, Jacobian, `det(tJ − I)` and the
/// torsion limit, with an optional exact recomputation.
///
/// A `t = 1` multiplicity other than `m(n−1)` is not an error: the report
/// carries it as a diagnosis and leaves the torsion empty.
pub fn full_pipeline(
    tri: &Triangulation,
    word: &MappingWord,
    n: usize,
    strategy: &SeedStrategy,
    opts: &PipelineOptions,
) -> Result<TorsionReport, PipelineError> {
    let chart = Chart::new(tri, word, n).map_err(|e| at(Stage::Map)(e.into()))?;
    let job = Job { tri, chart, n, opts };
    let mut report = job.run(strategy, word)?;
    if let Some(d) = opts.exact {
        let check = ExactCheck::run(&job.chart.map, &report.fixed_point, d, report.punctures, n)
            .map_err(at(Stage::Exact))?;
        report.exact = Some(ExactReport::new(&check, &report.alexander));
    }
    Ok(report)
}
