//! Exact numeric substrate: rationals, polynomials, rational functions,
//! truncated Laurent series and linear algebra over ℚ.

mod linalg;
mod parse;
mod poly;
mod ratfunc;
mod rational;
mod series;

pub use linalg::{ConstraintSystem, Matrix};
pub use parse::parse_rational_function;
pub use poly::Poly;
pub use ratfunc::RationalFunction;
pub use rational::{q, ParseRationalError, Rational};
pub use series::LaurentSeries;

/// Default truncation window for local computations:
/// `2 * max_conductor + k * max_pole + 4`.
pub fn default_truncation(max_conductor: u32, k: u32, max_pole: u32) -> usize {
    (2 * max_conductor + k * max_pole + 4) as usize
}
