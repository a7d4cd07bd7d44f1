use thiserror::Error;

use crate::model::ChiralityClass;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no preset entry for {0} tubes")]
    MissingPreset(ChiralityClass),

    #[error("invalid preset: {0}")]
    InvalidPreset(String),

    #[error("invalid tube: {0}")]
    InvalidTube(String),

    #[error("invalid chirality: {0}")]
    InvalidChirality(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("crack depth ratio {0} outside [0, 1)")]
    OutOfRange(f64),

    #[error("invalid compliance model: {0}")]
    InvalidModel(String),

    #[error("crack segment of zero length (alpha = {alpha}, beta = {beta})")]
    DegenerateSegment { alpha: f64, beta: f64 },

    #[error("invalid search configuration: {0}")]
    InvalidSearch(String),

    #[error("no determinant roots in K range [{k_min}, {k_max}]")]
    NoRootsInRange { k_min: f64, k_max: f64 },

    #[error("bracket [{lo}, {hi}] does not straddle a sign change")]
    NotBracketed { lo: f64, hi: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
}
