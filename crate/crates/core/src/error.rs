use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KrylovError {
    #[error("gamma pole at non-positive integer {0}")]
    Pole(f64),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("series did not converge after {0} terms")]
    NoConvergence(usize),
    #[error("argument on the branch cut: {0}")]
    Branch(String),
    #[error("invalid representation weight {0}")]
    InvalidWeight(f64),
    #[error("unknown generator label `{0}`")]
    UnknownLabel(String),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("seed vector is zero or not normalized")]
    ZeroSeed,
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("kick period sits on the resonance pole (|1-e^(i w0 T)| = {0:.3e})")]
    ResonantKickPole(f64),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("tolerance not met: {0}")]
    ToleranceNotMet(String),
    #[error("degenerate propagator entry: {0}")]
    DegenerateEntry(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("state not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, KrylovError>;
