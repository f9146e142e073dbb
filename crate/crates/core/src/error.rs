use thiserror::Error;

/// Domain errors. Parse errors live in [`crate::text::ParseError`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("torsion order must be at least 2, got {0}")]
    BadTorsionOrder(u32),
    #[error("generator out of range: {0}")]
    GeneratorOutOfRange(String),
    #[error("bad generator names: {0}")]
    BadNames(String),
    #[error("element has finite order")]
    FiniteOrder,
    #[error("element is a proper power")]
    ProperPower,
    #[error("invalid quasimorphism base: {0}")]
    InvalidBase(String),
    #[error("quasimorphism combination has no terms")]
    EmptyCombination,
    #[error("invalid orbifold: {0}")]
    InvalidOrbifold(String),
    #[error("orbifold is not hyperbolic (euler characteristic {0})")]
    NotHyperbolic(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("internal consistency check failed: {0}")]
    Assertion(String),
}
