use thiserror::Error;

use crate::hypernet::Infeasibility;

/// Errors raised by the cubic-matrix toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Operand dimensions do not conform for the requested operation.
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    /// Operands live in different scalar domains (e.g. Z_12 vs Z_8).
    #[error("domain mismatch in {op}: {left} vs {right}")]
    DomainMismatch {
        op: &'static str,
        left: String,
        right: String,
    },

    #[error("index {index} out of range for {what} (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    /// Entry not admissible in the declared domain (NaN, infinity, bad modulus).
    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("singular: {0}")]
    Singular(String),

    /// A matrix expected to be block circulant is not.
    #[error("structure violation: {0}")]
    Structure(String),

    #[error("series radius violated{}: norm {norm} >= radius {radius}", step.map(|k| format!(" at step {k}")).unwrap_or_default())]
    Radius {
        norm: f64,
        radius: f64,
        step: Option<usize>,
    },

    #[error("no convergence in {what}: last term norm {last_term_norm:e}")]
    Convergence { what: String, last_term_norm: f64 },

    #[error("linear congruence infeasible: {0}")]
    Infeasible(Infeasibility),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Shape {
            op,
            detail: detail.into(),
        }
    }

    /// True for numeric non-convergence (series truncation, radius, QR).
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::Radius { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
