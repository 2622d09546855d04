//! Reversal gauges, each with a demonstration and a checkable postcondition.

mod cauchy;
mod heine_borel;
mod oracle;

pub use cauchy::{cauchy_gap_gauge, gap_obstruction_demo, CauchySpec};
pub use heine_borel::{
    check_star, finite_subcover, heine_borel_demo, heine_borel_gauge, parse_cover_file, union_covers,
    HeineBorelReport, OpenCoverSpec, OpenInterval, TWO_COV,
};
pub use oracle::{oracle_pin_demo, oracle_pin_gauge, pin_index, OraclePinReport, OracleSpec};

use thiserror::Error;

use crate::fine::FineError;
use crate::gauges::GaugeError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GalleryError {
    #[error("unexpected cover: {0}")]
    UnexpectedCover(String),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error("{0}")]
    Spec(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Fine(#[from] FineError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
}

pub type Result<T> = std::result::Result<T, GalleryError>;
