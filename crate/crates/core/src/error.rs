use thiserror::Error;

use crate::solver::SolveResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix must have at least one row")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("vector entry {index} is not strictly positive and finite: {value}")]
    NotPositive { index: usize, value: f64 },

    #[error("negative entry {value} at ({row}, {col})")]
    NonNegativity { row: usize, col: usize, value: f64 },

    /// Row `row` has zero diagonal and zero coupling to the current point, so
    /// `x_i * 0 = 1` has no solution.
    #[error("row {row} is zero: x_{row} * (Mx)_{row} = 1 has no solution")]
    ZeroRow { row: usize },

    #[error("bracketing needs a positive diagonal; m_{row}{row} = 0")]
    ZeroDiagonal { row: usize },

    #[error("matrix is not primitive")]
    NotPrimitive,

    #[error("contraction condition fails at ({row}, {col}): 2*m_ii = {twice_diag} <= m_ij = {entry}")]
    ContractionPrecondition {
        row: usize,
        col: usize,
        twice_diag: f64,
        entry: f64,
    },

    #[error("singular Jacobian: pivot {pivot:e} in column {col}")]
    SingularJacobian { col: usize, pivot: f64 },

    /// Budget exhausted; the best iterate found is carried in the result.
    #[error("no convergence after {} iterations (residual {:e})", .0.iterations, .0.residual)]
    Convergence(Box<SolveResult>),

    #[error("power iteration did not converge (eigenvalue estimate {eigenvalue}, defect {defect:e})")]
    PerronConvergence {
        best: Vec<f64>,
        eigenvalue: f64,
        defect: f64,
    },

    #[error("oracle coordinate sweep did not reach tolerance (residual {residual:e})")]
    OracleDivergence { residual: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid value at line {line}, column {column}: {message}")]
    Validation {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence(_)
                | Error::SingularJacobian { .. }
                | Error::PerronConvergence { .. }
                | Error::OracleDivergence { .. }
        )
    }
}
