use thiserror::Error;

use crate::abelian::FgAbGroup;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid torsion coefficients: {0}")]
    InvalidTorsion(String),

    #[error("invalid generator names: {0}")]
    InvalidNames(String),

    #[error("homomorphism is not well defined: {0}")]
    NotWellDefined(String),

    #[error("ladder map does not commute with the bonds")]
    NotCommuting,

    #[error("unsupported colimit shape: {0}")]
    UnsupportedColimitShape(String),

    #[error("kernel chain or eventual image did not stabilize within {0} steps")]
    StabilizationOverflow(usize),

    #[error("colimit term {0} is not finitely generated")]
    NotFinitelyGenerated(String),

    #[error("extension in degree {degree} is not resolved: quotient {quotient} is not free")]
    UnresolvedExtension {
        degree: u8,
        sub: FgAbGroup,
        quotient: FgAbGroup,
    },

    #[error("invalid K-input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },

    #[error("undeclared generator `{name}` at byte {pos}")]
    UndeclaredGenerator { name: String, pos: usize },

    #[error("relator is a proper power ({exponent}-th power); the group has torsion")]
    ProperPowerRelator { exponent: usize },

    #[error("point of depth {depth} cannot serve level {needed}")]
    DepthExceeded { depth: usize, needed: usize },

    #[error("no trace value declared for generator `{0}`")]
    UnspecifiedTraceValue(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
