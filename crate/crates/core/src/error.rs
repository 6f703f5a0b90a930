use thiserror::Error;

use crate::complex::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("invalid complex:\n{0}")]
    Validation(ValidationReport),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("map entries do not share a single bigrading shift: {0}")]
    NonHomogeneous(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("map is not a chain map: {0}")]
    NotAChainMap(String),

    #[error("element is not a cycle")]
    NotACycle,

    #[error("elements live in different complexes")]
    ComplexMismatch,

    #[error("{0}")]
    InvalidElement(String),

    #[error("{0}")]
    InvalidParameter(String),

    #[error("slice is infinite: {0}")]
    InfiniteSlice(String),

    #[error("{invariant}: no answer up to the search cap {cap}")]
    SearchCapExceeded { invariant: &'static str, cap: i64 },

    #[error("kappa is only defined for surfaces of equal positive genus")]
    GenusZero,

    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(u32, u32),

    #[error("not a metric filtration: {0}")]
    NotUltrametric(String),
}

impl CoreError {
    /// Stable machine-readable code for the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            CoreError::Syntax { .. } => "syntax_error",
            CoreError::Validation(_) => "validation_error",
            CoreError::UnknownName(_) => "unknown_name",
            CoreError::NonHomogeneous(_) => "non_homogeneous",
            CoreError::ShapeMismatch(_) => "shape_mismatch",
            CoreError::NotAChainMap(_) => "not_a_chain_map",
            CoreError::NotACycle => "not_a_cycle",
            CoreError::ComplexMismatch => "complex_mismatch",
            CoreError::InvalidElement(_) => "invalid_element",
            CoreError::InvalidParameter(_) => "invalid_parameter",
            CoreError::InfiniteSlice(_) => "infinite_slice",
            CoreError::SearchCapExceeded { .. } => "search_cap_exceeded",
            CoreError::GenusZero => "genus_zero",
            CoreError::GenusMismatch(..) => "genus_mismatch",
            CoreError::NotUltrametric(_) => "not_ultrametric",
        }
    }
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
