use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MftError {
    #[error("vacuum: {0}")]
    Vacuum(String),
    #[error("inadmissible shock: {0}")]
    NotAdmissible(String),
    #[error("states do not lie on the requested wave curve: {0}")]
    NotOnCurve(String),
    #[error("root finder did not converge: {0}")]
    NoConvergence(String),
    #[error("no sign change found: {0}")]
    NoBracket(String),
    #[error("zero conserved jump with nonzero flux jump")]
    ZeroJump,
    #[error("zero-strength wave has no center")]
    DegenerateWidth,
    #[error("infeasible split: {0}")]
    Infeasible(String),
    #[error("event budget of {0} exceeded")]
    EventBudgetExceeded(usize),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MftError {
    fn from(e: std::io::Error) -> Self {
        MftError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MftError>;
