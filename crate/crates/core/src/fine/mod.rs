//! δ-fine tagged partitions and covers: verifiers, the factor-2 conversions
//! between them, subdivision searches, and transfers between the unit
//! interval and Cantor space.

mod cover;
pub mod io;
mod partition;
mod search;
mod transfer;

pub use cover::{
    cover_to_partition, minimize_cover, partition_to_cover, uncovered_cantor, uncovered_unit,
    verify_cover, Ball, CoverPoint, CoverReport, FineCover,
};
pub use partition::{verify_partition, PartitionReport, TaggedPartition};
pub use search::{
    find_cover_cantor, find_cover_unit, CantorSearch, Obstruction, RegionTrace, SampleTrace,
    SearchResult, UnitSearch,
};
pub use transfer::{
    cantor_samples_unit, compose_phi, psi_radius, transfer_cover_phi, transfer_cover_psi,
    transfer_gauge_psi,
};

use thiserror::Error;

use crate::gauges::GaugeError;
use crate::spaces::SpacesError;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FineError {
    #[error("malformed partition: {0}")]
    Structure(String),
    #[error("not a cover: {witness} is uncovered")]
    NotACover { witness: String },
    #[error("ball {index} has non-positive radius")]
    BadRadius { index: usize },
    #[error("cover point {0} must be exact")]
    InexactPoint(String),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error(transparent)]
    Spaces(#[from] SpacesError),
}

pub type Result<T> = std::result::Result<T, FineError>;
