use thiserror::Error;

use crate::scenario::ScenarioError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Green function is singular at the origin")]
    Singularity,

    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix {name} is singular or ill-conditioned (condition number {condition:.3e})")]
    SingularMatrix { name: &'static str, condition: f64 },

    #[error("boundary-condition pair is invalid: {0}")]
    InvalidPair(String),

    #[error(
        "matrix A is not invertible (condition number {condition:.3e}); singular-A pencils \
         need a differential-algebraic solver, which is not supported"
    )]
    UnsupportedPencil { condition: f64 },

    #[error("step {step} exceeds the smallest inter-point delay {min_delay}")]
    StepTooLarge { step: f64, min_delay: f64 },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("time {time} lies beyond the computed charge history (ends at {end})")]
    BeyondHistory { time: f64, end: f64 },

    #[error("evaluation point is within {distance:.3e} of interaction point {index}")]
    NearSingularPoint { index: usize, distance: f64 },

    #[error("initial data is not admissible: {0}")]
    Inadmissible(String),

    #[error(
        "nearest-point separation violated: interaction points {first} and {second} are \
         equally close to the initial support"
    )]
    SeparationViolated { first: usize, second: usize },

    #[error(transparent)]
    Scenario(#[from] ScenarioError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
