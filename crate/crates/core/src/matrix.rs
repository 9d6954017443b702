//! Dense square matrices and strictly positive vectors.

use std::ops::Index;

use serde::Serialize;

use crate::error::{Error, Result};

/// Dense `n x n` real matrix stored row-major. Entries are finite; sign is
/// not checked here (see [`crate::classify`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    entries: Vec<f64>,
}

impl Matrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if entries.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: entries.len(),
            });
        }
        if let Some(k) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / n,
                col: k % n,
            });
        }
        Ok(Matrix { n, entries })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Matrix::new(n, entries)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Matrix::new(n, entries).expect("identity dimension must be positive")
    }

    pub fn zeros(n: usize) -> Self {
        Matrix::new(n, vec![0.0; n * n]).expect("zero matrix dimension must be positive")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.n)
    }

    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.get(i, i))
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Entrywise scaling by a finite factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Matrix::new(self.n, self.entries.iter().map(|v| v * factor).collect())
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Matrix::new(n, out)
    }

    /// `M v` for an arbitrary real vector.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, v.len())?;
        Ok(self
            .rows()
            .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum())
            .collect())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.n + j]
    }
}

/// Vector with every entry finite and strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PositiveVector(Vec<f64>);

impl PositiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NotPositive { index, value });
        }
        Ok(PositiveVector(values))
    }

    pub fn ones(n: usize) -> Self {
        PositiveVector(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn max_norm(&self) -> f64 {
        max_norm(&self.0)
    }
}

impl AsRef<[f64]> for PositiveVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for PositiveVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

pub fn matvec(m: &Matrix, v: &PositiveVector) -> Result<Vec<f64>> {
    m.apply(v.as_slice())
}

/// `diag(x) M diag(x)`, entry `(i, j)` equal to `x_i m_ij x_j`.
pub fn diag_sandwich(m: &Matrix, x: &PositiveVector) -> Result<Matrix> {
    let n = m.n();
    check_dim(n, x.len())?;
    let mut out = Vec::with_capacity(n * n);
    for (i, row) in m.rows().enumerate() {
        out.extend(row.iter().zip(x.as_slice()).map(|(v, xj)| x[i] * v * xj));
    }
    Matrix::new(n, out)
}

pub fn inverse_elementwise(v: &PositiveVector) -> PositiveVector {
    PositiveVector(v.as_slice().iter().map(|x| 1.0 / x).collect())
}

pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// `max_i |a_i - b_i|`.
pub fn max_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}
