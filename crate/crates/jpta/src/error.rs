use thiserror::Error;

/// Errors produced by array construction, planning, solving, and evaluation.
#[derive(Debug, Error)]
pub enum JptaError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("subcarrier index {index} out of range (n_sc = {n_sc})")]
    SubcarrierOutOfRange { index: usize, n_sc: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("azimuth-only architecture requires all subband beams on one elevation row; got elevations {0:?} deg")]
    AzimuthOnlyElevationMismatch(Vec<f64>),
    #[error("subband {0} has fewer than 2 design-grid points")]
    DegenerateSubband(usize),
    #[error("numeric failure in solver: {0}")]
    NumericFailure(String),
}

pub type Result<T> = std::result::Result<T, JptaError>;
