use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("subgroup is not isotropic: the multiplier is not symmetric on it")]
    NotIsotropic,
    #[error("representation inconsistency: {0}")]
    RepresentationInconsistency(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("inequivalent representations: no nonzero intertwiner")]
    Inequivalent,
    #[error("numerical degeneracy: {0}")]
    Degeneracy(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
