//! Scalars and symbolic algebra: multivariate polynomials over Q, reduced
//! rational functions, dual numbers, quadratic fields and univariate
//! polynomials in `t`.

mod dual;
mod gcd;
mod modular;
mod poly;
mod quadratic;
mod rational;
mod scalar;
mod text;
mod unipoly;

pub use dual::{Dual, DualScalar};
pub use gcd::gcd;
pub use poly::{Monomial, MultiPoly, PolyError};
pub use quadratic::{is_square_free, Quadratic, QuadraticError};
pub use rational::{RatFunError, RationalFunction, DEFAULT_TERM_CAP};
pub use scalar::{snap_integer, snap_integer_within, Scalar, Singular, INTEGER_SNAP_TOLERANCE, SINGULARITY_THRESHOLD};
pub use text::{parse_poly, parse_rational, ParseError};
pub use unipoly::{format_integer_poly, UniPoly, UniPolyError};
