use std::io;

use thiserror::Error;

use crate::world::ObstacleId;

pub type Result<T> = std::result::Result<T, NavError>;

#[derive(Debug, Error)]
pub enum NavError {
    /// An argument lies outside the domain of a geometric operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// The projection chain revisited an obstacle or exceeded its cap.
    #[error("projection chain diagnostic: {reason} (chain {chain:?})")]
    Chain {
        reason: String,
        chain: Vec<ObstacleId>,
    },

    #[error("no path from start to goal in the tangent graph")]
    NoPath,

    /// The straight-line or analytic lower bound was violated by a trajectory.
    #[error("oracle lower bound violated: trajectory {trajectory} < oracle {oracle}")]
    LowerBound { trajectory: f64, oracle: f64 },

    #[error("world generation failed after {attempts} attempts")]
    Generation { attempts: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl NavError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        NavError::Domain(msg.into())
    }
}

impl From<serde_json::Error> for NavError {
    fn from(err: serde_json::Error) -> Self {
        NavError::Parse(err.to_string())
    }
}
