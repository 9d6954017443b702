//! Which existence/uniqueness hypotheses a matrix satisfies.
//!
//! The [`Classification`] drives strategy selection in [`crate::solver`]:
//! a contraction certificate selects the Banach iteration, a positive
//! diagonal selects nested-box bracketing, anything else falls through to
//! plain iteration with a Newton fallback.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{max_norm, Matrix, PositiveVector};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub nonnegative: bool,
    pub positive_diagonal: bool,
    pub primitive: bool,
    pub contraction_condition: bool,
    /// `max_{i,j} m_ij / (2 m_ii)` over all pairs, present iff the
    /// contraction condition holds.
    pub contraction_constant: Option<f64>,
    pub has_zero_row: bool,
}

pub fn is_nonnegative(m: &Matrix) -> bool {
    m.entries().iter().all(|&v| v >= 0.0)
}

pub fn has_positive_diagonal(m: &Matrix) -> bool {
    m.diagonal().all(|d| d > 0.0)
}

pub fn has_zero_row(m: &Matrix) -> bool {
    m.rows().any(|row| row.iter().all(|&v| v == 0.0))
}

/// Boolean zero/nonzero pattern, row-major.
#[derive(Clone, PartialEq, Eq)]
struct Pattern {
    n: usize,
    bits: Vec<bool>,
}

impl Pattern {
    fn of(m: &Matrix) -> Self {
        Pattern {
            n: m.n(),
            bits: m.entries().iter().map(|&v| v != 0.0).collect(),
        }
    }

    fn square(&self) -> Self {
        let n = self.n;
        let mut bits = vec![false; n * n];
        for i in 0..n {
            for k in 0..n {
                if !self.bits[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    bits[i * n + j] |= self.bits[k * n + j];
                }
            }
        }
        Pattern { n, bits }
    }

    fn all_set(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }
}

/// Whether some power of `m` is entrywise positive.
///
/// Squares the boolean pattern until the exponent reaches the Wielandt bound
/// `(n-1)^2 + 1`; a primitive matrix is positive at every power from there
/// on, so checking one power `>=` the bound decides the question.
pub fn is_primitive(m: &Matrix) -> bool {
    let n = m.n();
    let bound = (n - 1) * (n - 1) + 1;
    let mut p = Pattern::of(m);
    let mut exponent = 1usize;
    while exponent < bound {
        if p.all_set() {
            return true;
        }
        let next = p.square();
        if next == p {
            // Fixed pattern: every further power is the same.
            return p.all_set();
        }
        p = next;
        exponent *= 2;
    }
    p.all_set()
}

/// `(true, Some(C))` iff `2 m_ii > m_ij` for every `i, j`, with
/// `C = max_{i,j} m_ij / (2 m_ii)`.
pub fn contraction_condition(m: &Matrix) -> (bool, Option<f64>) {
    match contraction_violation(m) {
        Some(_) => (false, None),
        None => {
            let c = m
                .rows()
                .enumerate()
                .flat_map(|(i, row)| {
                    let twice = 2.0 * row[i];
                    row.iter().map(move |&v| v / twice)
                })
                .fold(0.0, f64::max);
            (true, Some(c))
        }
    }
}

/// First `(i, j)` with `2 m_ii <= m_ij`, if any.
pub(crate) fn contraction_violation(m: &Matrix) -> Option<(usize, usize)> {
    for (i, row) in m.rows().enumerate() {
        let twice = 2.0 * row[i];
        if let Some(j) = row.iter().position(|&v| !(twice > v)) {
            return Some((i, j));
        }
    }
    None
}

/// Power iteration for the Perron root and vector of a primitive matrix.
///
/// Starts from the all-ones vector, normalizes by the max-norm every step and
/// stops once `||Mv - lambda v||_inf <= tol` with `||v||_inf = 1`.
pub fn perron_vector(m: &Matrix, tol: f64, max_iter: usize) -> Result<(PositiveVector, f64)> {
    if !is_nonnegative(m) || !is_primitive(m) {
        return Err(Error::NotPrimitive);
    }
    let n = m.n();
    let mut v = vec![1.0; n];
    let mut lambda = 0.0;
    let mut defect = f64::INFINITY;
    for _ in 0..max_iter {
        let mv = m.apply(&v)?;
        lambda = max_norm(&mv);
        defect = mv
            .iter()
            .zip(&v)
            .fold(0.0, |acc, (a, b)| acc.max((a - lambda * b).abs()));
        if defect <= tol {
            return Ok((PositiveVector::new(v)?, lambda));
        }
        v = mv.into_iter().map(|a| a / lambda).collect();
    }
    Err(Error::PerronConvergence {
        best: v,
        eigenvalue: lambda,
        defect,
    })
}

pub fn classify(m: &Matrix) -> Classification {
    let nonnegative = is_nonnegative(m);
    let (contraction, constant) = if nonnegative {
        contraction_condition(m)
    } else {
        (false, None)
    };
    Classification {
        nonnegative,
        positive_diagonal: has_positive_diagonal(m),
        primitive: nonnegative && is_primitive(m),
        contraction_condition: contraction,
        contraction_constant: constant,
        has_zero_row: has_zero_row(m),
    }
}
