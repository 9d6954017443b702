//! Row-wise positive roots and the map whose fixed points solve
//! `x_i (Mx)_i = 1`.
//!
//! Row `i` of the system is the scalar quadratic `m_ii t^2 + b_i t - 1 = 0`
//! in `t = x_i`, where `b_i = sum_{j != i} m_ij x_j`. Its positive root,
//! as a function of the other coordinates, is `f_i`. Stacking the `f_i`
//! gives `F`, and `x = F(x)` exactly when `Mx` is the element-wise inverse
//! of `x`.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, PositiveVector};

/// One row of `M` split into diagonal and off-diagonal parts.
#[derive(Debug, Clone, PartialEq)]
pub struct RowContext {
    pub row_index: usize,
    pub diagonal: f64,
    /// `m_ij` for `j != i`, in increasing `j`.
    pub off_diagonal: Vec<f64>,
}

impl RowContext {
    pub fn new(row_index: usize, diagonal: f64, off_diagonal: Vec<f64>) -> Self {
        RowContext {
            row_index,
            diagonal,
            off_diagonal,
        }
    }

    pub fn from_matrix(m: &Matrix, i: usize) -> Self {
        let row = m.row(i);
        let off = row
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        RowContext::new(i, row[i], off)
    }

    /// `b_i = sum_{j != i} m_ij x_j`; `others` excludes coordinate `i`.
    pub fn b_value(&self, others: &[f64]) -> f64 {
        debug_assert_eq!(others.len(), self.off_diagonal.len());
        self.off_diagonal.iter().zip(others).map(|(m, x)| m * x).sum()
    }

    pub fn f_value(&self, others: &[f64]) -> Result<f64> {
        positive_root(self.row_index, self.diagonal, self.b_value(others))
    }

    /// Gradient of `f_i` with respect to the other coordinates. Every
    /// component is `<= 0`.
    pub fn f_gradient(&self, others: &[f64]) -> Result<Vec<f64>> {
        let b = self.b_value(others);
        let scale = gradient_scale(self.row_index, self.diagonal, b)?;
        Ok(self.off_diagonal.iter().map(|m| scale * m).collect())
    }
}

/// Positive root of `a t^2 + b t - 1 = 0` for `a, b >= 0`.
///
/// Uses `2 / (b + sqrt(b^2 + 4a))`, equal to the textbook root but free of
/// cancellation when `b^2 >> a`. With `a = 0` this is `1 / b`.
pub fn positive_root(row: usize, a: f64, b: f64) -> Result<f64> {
    if a == 0.0 {
        if b > 0.0 {
            return Ok(1.0 / b);
        }
        return Err(Error::ZeroRow { row });
    }
    Ok(2.0 / (b + (b * b + 4.0 * a).sqrt()))
}

/// Factor `g` with `grad f_i = g * (m_ij)_{j != i}`.
///
/// For `a = 0` this is `-1/b^2`. Otherwise
/// `(b / s - 1) / (2a)` with `s = sqrt(b^2 + 4a)`, rewritten as
/// `-2 / (s (b + s))` to avoid cancellation.
pub fn gradient_scale(row: usize, a: f64, b: f64) -> Result<f64> {
    if a == 0.0 {
        if b > 0.0 {
            return Ok(-1.0 / (b * b));
        }
        return Err(Error::ZeroRow { row });
    }
    let s = (b * b + 4.0 * a).sqrt();
    Ok(-2.0 / (s * (b + s)))
}

/// `b_i` for row `i` of `m` at the full point `x`.
#[inline]
fn coupling(m: &Matrix, i: usize, x: &[f64]) -> f64 {
    m.row(i)
        .iter()
        .zip(x)
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, (a, b))| a * b)
        .sum()
}

/// `F(x)_i = f_i(x without coordinate i)` for a nonnegative point `x`.
pub fn f_map(m: &Matrix, x: &[f64]) -> Result<PositiveVector> {
    let n = m.n();
    if x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: x.len(),
        });
    }
    let out = (0..n)
        .map(|i| positive_root(i, m.get(i, i), coupling(m, i, x)))
        .collect::<Result<Vec<_>>>()?;
    PositiveVector::new(out)
}

/// `max_i |x_i (Mx)_i - 1|`.
pub fn residual(m: &Matrix, x: &[f64]) -> f64 {
    residual_vector(m, x)
        .into_iter()
        .fold(0.0, |acc, r| acc.max(r.abs()))
}

/// `G(x)_i = x_i (Mx)_i - 1`.
pub fn residual_vector(m: &Matrix, x: &[f64]) -> Vec<f64> {
    m.rows()
        .zip(x)
        .map(|(row, xi)| xi * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - 1.0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::max_distance;

    fn triangular() -> Matrix {
        Matrix::from_rows(&[[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 1.0, 1.0]]).unwrap()
    }

    fn triangular_solution() -> Vec<f64> {
        let s5 = 5f64.sqrt();
        vec![
            1.0,
            (s5 - 1.0) / 2.0,
            ((2.0 * s5 + 22.0).sqrt() - s5 - 1.0) / 4.0,
        ]
    }

    #[test]
    fn b_value_examples() {
        let ctx = RowContext::new(0, 1.0, vec![0.0, 0.0]);
        assert_eq!(ctx.b_value(&[3.0, 7.0]), 0.0);

        let ctx = RowContext::from_matrix(&triangular(), 1);
        assert_eq!(ctx.off_diagonal, vec![1.0, 0.0]);
        assert_eq!(ctx.b_value(&[1.0, 123.0]), 1.0);

        let m = Matrix::from_rows(&[[1.0, 3.0], [5.0, 2.0]]).unwrap();
        let ctx = RowContext::from_matrix(&m, 0);
        assert!((ctx.b_value(&[0.2]) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn f_value_examples() {
        let ctx = RowContext::new(0, 1.0, vec![0.0]);
        assert_eq!(ctx.f_value(&[5.0]).unwrap(), 1.0);

        let ctx = RowContext::new(1, 1.0, vec![1.0]);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((ctx.f_value(&[1.0]).unwrap() - golden).abs() < 1e-15);
        assert!((golden - 0.618_033_988_7).abs() < 1e-10);

        let ctx = RowContext::new(0, 0.0, vec![1.0]);
        assert_eq!(ctx.f_value(&[2.0]).unwrap(), 0.5);

        let x = triangular_solution();
        let ctx = RowContext::from_matrix(&triangular(), 2);
        let got = ctx.f_value(&[x[0], x[1]]).unwrap();
        assert!((got - x[2]).abs() < 1e-15);
        assert!((got - 0.477_259_9).abs() < 1e-7);
    }

    #[test]
    fn zero_row_is_an_error() {
        let ctx = RowContext::new(4, 0.0, vec![0.0, 1.0]);
        assert!(matches!(ctx.f_value(&[1.0, 0.0]), Err(Error::ZeroRow { row: 4 })));
        assert!(matches!(ctx.f_gradient(&[1.0, 0.0]), Err(Error::ZeroRow { row: 4 })));
    }

    #[test]
    fn gradient_examples() {
        let ctx = RowContext::new(0, 3.0, vec![0.0, 0.0]);
        assert_eq!(ctx.f_gradient(&[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);

        let ctx = RowContext::new(0, 0.0, vec![2.0]);
        assert_eq!(ctx.f_gradient(&[1.0]).unwrap(), vec![-0.5]);

        // b = 0, m_ii = 1: (0 - 1) / 2 * c.
        let c = 0.75;
        let ctx = RowContext::new(0, 1.0, vec![c, 0.0]);
        let g = ctx.f_gradient(&[0.0, 9.0]).unwrap();
        assert!((g[0] + c / 2.0).abs() < 1e-15);
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn gradient_matches_textbook_form() {
        // Moderate b only; for b^2 >> a the textbook form itself cancels.
        for &(a, b) in &[(1.0f64, 0.3f64), (0.01, 5.0), (7.0, 2.0), (1e-2, 1e1)] {
            let s: f64 = (b * b + 4.0 * a).sqrt();
            let textbook = (b / s - 1.0) / (2.0 * a);
            let stable = gradient_scale(0, a, b).unwrap();
            assert!(((stable - textbook) / textbook).abs() < 1e-8, "{a} {b}");
        }
    }

    #[test]
    fn f_map_examples() {
        let id = Matrix::identity(4);
        assert_eq!(f_map(&id, &[0.3, 2.0, 5.0, 0.0]).unwrap().as_slice(), &[1.0; 4]);

        let x = triangular_solution();
        let fx = f_map(&triangular(), &x).unwrap();
        assert!(max_distance(fx.as_slice(), &x) < 1e-15);

        let m = Matrix::from_rows(&[[4.0, 1.0], [2.0, 0.25]]).unwrap();
        let f0 = f_map(&m, &[0.0, 0.0]).unwrap();
        assert_eq!(f0.as_slice(), &[0.5, 2.0]);
    }

    #[test]
    fn f_map_reports_offending_row() {
        let m = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!(matches!(f_map(&m, &[1.0, 1.0, 0.0]), Err(Error::ZeroRow { row: 1 })));
        assert!(f_map(&m, &[1.0, 1.0, 1.0]).is_ok());
        assert!(matches!(f_map(&m, &[1.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn residual_examples() {
        assert_eq!(residual(&Matrix::identity(3), &[1.0; 3]), 0.0);
        assert!(residual(&triangular(), &triangular_solution()) <= 1e-14);
        let m = Matrix::from_rows(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 1.0]]).unwrap();
        let s2 = 2f64.sqrt();
        assert!(residual(&m, &[s2, 1.0 / s2, 1.0 / s2]) <= 1e-14);
        assert_eq!(residual(&Matrix::identity(2), &[2.0, 1.0]), 3.0);
    }

    mod props {
        use super::*;
        use crate::classify::contraction_condition;
        use proptest::prelude::*;

        fn row() -> impl Strategy<Value = (RowContext, Vec<f64>)> {
            (1usize..5).prop_flat_map(|k| {
                (
                    prop_oneof![Just(0.0), 1e-3f64..10.0],
                    prop::collection::vec(0.0f64..10.0, k),
                    prop::collection::vec(0.0f64..10.0, k),
                )
                    .prop_map(|(d, off, x)| (RowContext::new(0, d, off), x))
            })
        }

        fn positive_diagonal(n: usize) -> impl Strategy<Value = Matrix> {
            prop::collection::vec(0.0f64..3.0, n * n).prop_map(move |mut e| {
                for i in 0..n {
                    e[i * n + i] += 0.05;
                }
                Matrix::new(n, e).unwrap()
            })
        }

        proptest! {
            #[test]
            fn root_solves_the_row_quadratic((ctx, x) in row()) {
                let b = ctx.b_value(&x);
                prop_assume!(ctx.diagonal > 0.0 || b > 0.0);
                let t = ctx.f_value(&x).unwrap();
                prop_assert!(t > 0.0);
                let defect = ctx.diagonal * t * t + b * t - 1.0;
                prop_assert!(defect.abs() <= 1e-12 * (1.0 + b + ctx.diagonal));
            }

            #[test]
            fn gradient_is_nonpositive((ctx, x) in row()) {
                let b = ctx.b_value(&x);
                prop_assume!(ctx.diagonal > 0.0 || b > 0.0);
                for g in ctx.f_gradient(&x).unwrap() {
                    prop_assert!(g <= 0.0);
                }
            }

            #[test]
            fn f_map_is_antitone(
                (m, x, t) in (2usize..6).prop_flat_map(|n| (
                    positive_diagonal(n),
                    prop::collection::vec(0.0f64..5.0, n),
                    prop::collection::vec(0.0f64..5.0, n),
                ))
            ) {
                let y: Vec<f64> = x.iter().zip(&t).map(|(a, b)| a + b).collect();
                let fx = f_map(&m, &x).unwrap();
                let fy = f_map(&m, &y).unwrap();
                for (a, b) in fy.as_slice().iter().zip(fx.as_slice()) {
                    prop_assert!(a <= b);
                }
            }

            #[test]
            fn contraction_constant_bounds_lipschitz_ratio(
                (m, a, b) in (2usize..6).prop_flat_map(|n| (
                    positive_diagonal(n),
                    prop::collection::vec(0.0f64..5.0, n),
                    prop::collection::vec(0.0f64..5.0, n),
                ))
            ) {
                if let (true, Some(c)) = contraction_condition(&m) {
                    let fa = f_map(&m, &a).unwrap();
                    let fb = f_map(&m, &b).unwrap();
                    let lhs = max_distance(fa.as_slice(), fb.as_slice());
                    prop_assert!(lhs <= c * max_distance(&a, &b) + 1e-15);
                }
            }
        }
    }
}
