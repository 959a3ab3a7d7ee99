use thiserror::Error;

use crate::linear::Trajectory;

pub type Result<T> = std::result::Result<T, KsError>;

#[derive(Debug, Error)]
pub enum KsError {
    #[error("invalid torus: {0}")]
    InvalidTorus(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("time grid is not uniform (relative deviation {deviation:.3e})")]
    NonUniformGrid { deviation: f64 },

    #[error("no gap: alpha = {alpha} is not in (0, A) with A = {gap}")]
    NoGap { alpha: f64, gap: f64 },

    #[error("spectral gap minimiser k = ({k1}, {k2}) is not well inside the resolved lattice")]
    UnderResolvedGap { k1: i64, k2: i64 },

    #[error("insufficient decay range: {usable} usable shells (need at least {required})")]
    InsufficientDecayRange { usable: usize, required: usize },

    #[error("blow-up suspected at t = {last_valid_time}")]
    BlowUp {
        last_valid_time: f64,
        partial: Box<Trajectory>,
    },

    #[error("hierarchy level {level} blew up at t = {last_valid_time}")]
    LevelBlowUp { level: usize, last_valid_time: f64 },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("malformed spectra file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
