use thiserror::Error;

/// Errors raised by the operator kernel and the automaton constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch in {context}: {left:?} vs {right:?}")]
    Shape {
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("expected {expected} entries for a {rows}x{cols} operator, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("transition is not an isometry (defect {defect:e})")]
    NotIsometry { defect: f64 },

    #[error("transition is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("interface mismatch: {0}")]
    Interface(String),

    #[error("kernel-image factorization residual {residual:e} exceeds {bound:e}")]
    Factorization { residual: f64, bound: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
