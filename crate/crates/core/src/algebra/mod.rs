//! Scalars, polynomials and exponential sums.

mod expsum;
mod poly;
mod scalar;

pub use expsum::{ExpSum, Term, DEFAULT_MERGE_TOL};
pub use poly::{Poly, Var};
pub use scalar::{binomial_table, falling_factorial, Field, GaussRat, Mode, Scalar};

pub(crate) use scalar::bigint_to_field;

use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("cannot mix exact and approximate scalars")]
    ModeMismatch,
    #[error("polynomial variables differ: {0:?} vs {1:?}")]
    VarMismatch(Var, Var),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0}")]
    Parse(String),
    #[error("frequencies {a} and {b} are linked within tolerance {tol} but not mutually close")]
    AmbiguousMerge { a: Complex64, b: Complex64, tol: f64 },
}
