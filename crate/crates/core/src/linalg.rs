use crate::error::{Error, Result};

/// Absolute pivot magnitude below which a system is declared singular.
pub const PIVOT_THRESHOLD: f64 = 1e-300;

/// Solves `A x = rhs` in place by Gaussian elimination with partial
/// pivoting. `a` is row-major `n x n` and is destroyed.
pub fn solve_dense(a: &mut [f64], rhs: &mut [f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    debug_assert_eq!(a.len(), n * n);

    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a[r * n + col]))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .expect("non-empty pivot column");
        if !(pivot.abs() >= PIVOT_THRESHOLD) {
            return Err(Error::SingularJacobian { col, pivot });
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            rhs.swap(col, pivot_row);
        }
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            a[r * n + col] = 0.0;
            for k in col + 1..n {
                a[r * n + k] -= factor * a[col * n + k];
            }
            rhs[r] -= factor * rhs[col];
        }
    }

    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
        x[r] = (rhs[r] - tail) / a[r * n + r];
    }
    Ok(x)
}
