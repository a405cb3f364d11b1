//! Finite-order exponential-sum solutions of linear ODEs whose coefficients
//! are exponential sums with rational frequencies.
//!
//! Pipeline: [`normalize`] → [`transform`] → [`roots`] → [`solver`], with
//! [`verify`] re-checking every result against the original equation.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod corpus;
pub mod document;
pub mod linalg;
pub mod normalize;
pub mod roots;
pub mod solver;
pub mod transform;
pub mod verify;

pub use algebra::{ExpSum, GaussRat, Mode, Poly, Scalar};
pub use normalize::{normalize, NormalizedProblem, RawProblem};
pub use solver::{solve, SolveError, SolveReport, SolverConfig};
