//! Exact rational and interval arithmetic.
//!
//! Nothing in the verified path touches floating point; `to_f64` and
//! `to_decimal` exist for display columns only.

mod interval;
mod quad;
pub mod rational;

pub use interval::Interval;
pub use quad::Quad;
pub use rational::Rational;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum NumericsError {
    #[error("malformed rational `{0}`")]
    BadRational(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}
