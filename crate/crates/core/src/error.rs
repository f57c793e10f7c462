use thiserror::Error;

use crate::quad::Field;

/// Errors raised by the arithmetic, geometry, factorization and certificate layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements live in different fields ({0} and {1})")]
    MixedFields(Field, Field),
    #[error("field parameter d = {0} must be a squarefree integer >= 2")]
    InvalidField(u64),
    #[error("exponent {0} exceeds the cap of {cap}", cap = crate::quad::MAX_EXPONENT)]
    ExponentTooLarge(u64),
    #[error("value {0} is negative at the identity embedding")]
    NegativeAtIdentity(String),
    #[error("dimension mismatch: expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid quadratic form: {0}")]
    InvalidForm(String),
    #[error("invalid normal vector: {0}")]
    InvalidNormalVector(String),
    #[error("hyperplanes are {0}, not ultraparallel")]
    NotUltraparallel(crate::geometry::PairClass),
    #[error("cosh^2 value {0} is below 1")]
    CoshBelowOne(String),
    #[error("interval width must be positive")]
    InvalidWidth,
    #[error("cannot certify the factorization of {0}")]
    FactorizationFailed(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("{0} is not an algebraic integer of the expected ring")]
    NonIntegral(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("rho = {0} does not satisfy sigma(rho)^2 > rho > sigma(rho) > 1")]
    InvalidRho(String),
    #[error("three-squares search exhausted its budget of {0} candidate pairs")]
    NotFoundWithinBudget(u64),
    #[error("certificates mix ambient groups {0} and {1}")]
    MixedAmbientGroups(String, String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported schema version {0}")]
    UnsupportedSchema(u32),
    #[error("empty input")]
    EmptyInput,
}

pub type Result<T> = std::result::Result<T, Error>;
