use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown profile name `{0}`")]
    UnknownProfile(String),
    #[error("polynomial degree {degree} exceeds the cap of {cap}")]
    DegreeTooHigh { degree: usize, cap: usize },
    #[error("non-finite coefficient in {0}")]
    NonFiniteCoefficient(&'static str),
    #[error("parameter `{name}` must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("grid order {0} is below the minimum of 16")]
    GridTooSmall(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("wave number must be positive, got {0}")]
    InvalidWaveNumber(f64),
    #[error("degenerate normalisation: denominator {0:e} is below 1e-12")]
    DegenerateDenominator(f64),
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
    #[error("growth-rate bound requested but R1 <= R2 (r1 = {r1}, r2 = {r2})")]
    NotApplicable { r1: f64, r2: f64 },
    #[error("generalized eigendecomposition failed (n = {dim}, |A|_F = {a_norm:e}, |B|_F = {b_norm:e})")]
    Decomposition { dim: usize, a_norm: f64, b_norm: f64 },
    #[error("every eigenvalue of the pencil is infinite or undefined")]
    AllSpurious,
    #[error("boundary conditions violated by input: {0}")]
    BoundaryViolation(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
