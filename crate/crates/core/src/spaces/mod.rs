//! Points, balls and embeddings for `[0,1]` and Cantor space `2^ω`.

mod cantor;
mod embed;
mod unit;

pub use cantor::{ball_cylinder, bits_str, cantor_dist, parse_bits, CantorPoint, Cylinder};
pub use embed::{
    cantor_gap, cantor_preimage, dist_to_cantor_set, phi, phi_cylinder, psi, psi_cylinder,
    psi_preimage_prefix, psi_separation,
};
pub use unit::{UnitPoint, MAX_REFINEMENT};

use thiserror::Error;

use crate::numerics::rational::fmt_rational;
use crate::numerics::Rational;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SpacesError {
    #[error("malformed point `{0}`")]
    BadPoint(String),
    #[error("point {0} lies outside [0,1]")]
    OutOfRange(String),
    #[error("point is not in the Cantor set{}", .distance.as_ref().map(|d| format!(" (distance {})", fmt_rational(d))).unwrap_or_default())]
    NotInCantorSet { distance: Option<Rational> },
    #[error("membership undecided at the refinement ceiling")]
    Undecided,
}

/// A point of either ambient space.
#[derive(Clone, Debug)]
pub enum Point {
    Unit(UnitPoint),
    Cantor(CantorPoint),
}

impl From<UnitPoint> for Point {
    fn from(p: UnitPoint) -> Self {
        Point::Unit(p)
    }
}

impl From<CantorPoint> for Point {
    fn from(p: CantorPoint) -> Self {
        Point::Cantor(p)
    }
}

impl From<crate::numerics::Quad> for Point {
    fn from(q: crate::numerics::Quad) -> Self {
        Point::Unit(UnitPoint::Exact(q))
    }
}

impl From<Rational> for Point {
    fn from(r: Rational) -> Self {
        Point::Unit(UnitPoint::rational(r))
    }
}
