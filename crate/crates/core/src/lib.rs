//! Symmetric diagonal scaling of nonnegative matrices.
//!
//! Given a nonnegative square matrix `M`, find the positive vector `x` with
//! `Mx = (1/x_1, ..., 1/x_n)`. Equivalently `diag(x) M diag(x)` is
//! row-stochastic, and equivalently `x` is a fixed point of the map `F`
//! that solves each row's quadratic `m_ii x_i^2 + b_i x_i = 1` for `x_i`.
//!
//! ```
//! use inversepoint::{solve, Matrix, SolverConfig};
//!
//! let m = Matrix::from_rows(&[[1.0, 3.0], [5.0, 2.0]]).unwrap();
//! let res = solve(&m, &SolverConfig::default()).unwrap();
//! assert!(res.converged && res.residual <= 1e-12);
//! ```

pub mod classify;
pub mod cli;
pub mod error;
pub mod fixedpoint;
pub mod io;
mod linalg;
pub mod matrix;
pub mod oracle;
pub mod solver;
pub mod stochastic;

pub use classify::{classify, Classification};
pub use error::{Error, Result};
pub use fixedpoint::{f_map, residual, RowContext};
pub use matrix::{diag_sandwich, inverse_elementwise, matvec, Matrix, PositiveVector};
pub use solver::{
    multistart_uniqueness, solve, solve_auto, solve_bracket, solve_contraction, solve_newton,
    BracketState, Method, SolveResult, SolverConfig,
};
pub use stochastic::{certify, StochasticCertificate};
