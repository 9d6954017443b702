//! Brute-force reference solver used to cross-check [`crate::solver`].
//!
//! Shares nothing with the main iteration: each coordinate is updated in
//! turn (Gauss-Seidel order `0..n`) to the positive root of its row
//! quadratic, found by bisection rather than by formula.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, PositiveVector};

const BRACKET_LO: f64 = 1e-12;
const BRACKET_HI: f64 = 1e6;
const MAX_SWEEPS: usize = 1_000_000;

/// Root of `a t^2 + b t - 1` on `[BRACKET_LO, BRACKET_HI]` by bisection.
/// The polynomial is increasing in `t > 0` for `a, b >= 0`.
fn bisect_root(a: f64, b: f64) -> f64 {
    let p = |t: f64| a * t * t + b * t - 1.0;
    let (mut lo, mut hi) = (BRACKET_LO, BRACKET_HI);
    if p(hi) <= 0.0 {
        return hi;
    }
    if p(lo) >= 0.0 {
        return lo;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Adjacent floats; keep the one with the smaller defect.
    if p(hi).abs() < p(lo).abs() {
        hi
    } else {
        lo
    }
}

fn oracle_residual(m: &Matrix, x: &[f64]) -> f64 {
    let n = m.n();
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += m.get(i, j) * x[j];
        }
        worst = worst.max((x[i] * s - 1.0).abs());
    }
    worst
}

/// Coordinate-descent solution of `x_i (Mx)_i = 1` to residual `tol`.
pub fn oracle_solve(m: &Matrix, tol: f64) -> Result<PositiveVector> {
    let n = m.n();
    let mut x = vec![1.0; n];
    let mut r = oracle_residual(m, &x);
    for _ in 0..MAX_SWEEPS {
        if r <= tol {
            return PositiveVector::new(x);
        }
        let before = x.clone();
        for i in 0..n {
            let mut b = 0.0;
            for j in 0..n {
                if j != i {
                    b += m.get(i, j) * x[j];
                }
            }
            x[i] = bisect_root(m.get(i, i), b);
        }
        r = oracle_residual(m, &x);
        if x == before && r > tol {
            // A sweep that changes nothing will never change anything.
            return Err(Error::OracleDivergence { residual: r });
        }
    }
    Err(Error::OracleDivergence { residual: r })
}
