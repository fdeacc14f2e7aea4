//! Fixed points of `φ*`, the twisted Alexander polynomial `det(tJ − I)` of
//! the Jacobian there, and the torsion limit at `t = 1`.

mod alexander;
mod exact;
mod pipeline;
mod report;
mod solve;

pub use alexander::{
    alexander_discrepancy, alexander_poly, alexander_poly_interpolated, characteristic_coefficients, determinant, jacobian_at, multiplicity_tolerance, torsion_value,
    Jacobian, SignClass, TorsionValue,
};
pub use exact::{snap_point, snap_quadratic, snap_rational, ExactCheck, MAX_SNAP_DENOMINATOR, SNAP_TOLERANCE};
pub use pipeline::{full_pipeline, peripheral_sums, Chart, PipelineError, PipelineOptions, SeedStrategy, Stage};
pub use report::{format_complex, ExactReport, TorsionReport};
pub use solve::{
    distinct_fixed_points, multistart, sample_annulus, solve_fixed_point, FixedPoint, MultistartOptions, SolveOptions,
    Start,
};

use crate::cluster::ClusterError;
use crate::ratfun::QuadraticError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TorsionError {
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Newton step is singular (condition estimate {condition:.3e})")]
    SingularStep { condition: f64 },
    #[error("iterate left the torus: coordinate y{} vanished", .vertex + 1)]
    LeftTorus { vertex: usize },
    #[error("t = 1 is a root of multiplicity {found}, expected m(n-1) = {expected}")]
    MultiplicityMismatch { found: usize, expected: usize },
    #[error("no fixed point found from {starts} starts")]
    NoFixedPoint { starts: usize },
    #[error("exact mode: {0}")]
    Exact(String),
    #[error(transparent)]
    Quadratic(#[from] QuadraticError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}
