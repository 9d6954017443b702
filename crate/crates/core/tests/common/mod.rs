#![allow(dead_code)]

use inversepoint::classify::is_primitive;
use inversepoint::Matrix;
use rand::Rng;

pub fn triangular() -> Matrix {
    Matrix::from_rows(&[[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 1.0, 1.0]]).unwrap()
}

pub fn triangular_solution() -> [f64; 3] {
    let s5 = 5f64.sqrt();
    [
        1.0,
        (s5 - 1.0) / 2.0,
        ((2.0 * s5 + 22.0).sqrt() - s5 - 1.0) / 4.0,
    ]
}

pub fn zero_diagonal() -> Matrix {
    Matrix::from_rows(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 1.0]]).unwrap()
}

pub fn zero_diagonal_solution() -> [f64; 3] {
    let s2 = 2f64.sqrt();
    [s2, 1.0 / s2, 1.0 / s2]
}

pub fn figure_left() -> Matrix {
    Matrix::from_rows(&[[1.0, 3.0], [5.0, 2.0]]).unwrap()
}

pub fn figure_right() -> Matrix {
    Matrix::from_rows(&[[1.0, 2.0, 2.0], [1.0, 1.0, 1.0], [1.0, 3.0, 1.0]]).unwrap()
}

pub fn counterexample() -> Matrix {
    Matrix::from_rows(&[[1.0, 2.0, 2.0], [2.0, 1.0, 2.0], [2.0, 2.0, 1.0]]).unwrap()
}

/// Entries uniform on `[0, 2]`, diagonal shifted by `+0.1`.
pub fn random_positive_diagonal<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let mut e: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.0..=2.0)).collect();
    for i in 0..n {
        e[i * n + i] += 0.1;
    }
    Matrix::new(n, e).unwrap()
}

/// Primitive matrix with positive diagonal and roughly a third of the
/// off-diagonal entries zeroed.
pub fn random_primitive_positive_diagonal<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    loop {
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                e[i * n + j] = if i == j {
                    rng.random_range(0.1..=2.1)
                } else if rng.random_bool(0.35) {
                    0.0
                } else {
                    rng.random_range(0.0..=2.0)
                };
            }
        }
        let m = Matrix::new(n, e).unwrap();
        if is_primitive(&m) {
            return m;
        }
    }
}

/// Primitive nonnegative matrix, diagonal entries allowed to be zero.
pub fn random_primitive<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    loop {
        let e: Vec<f64> = (0..n * n)
            .map(|_| {
                if rng.random_bool(0.4) {
                    0.0
                } else {
                    rng.random_range(0.1..=2.0)
                }
            })
            .collect();
        let m = Matrix::new(n, e).unwrap();
        if is_primitive(&m) {
            return m;
        }
    }
}

/// Matrix with `2 m_ii > m_ij` for every `i, j`.
pub fn random_contracting<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        let d = rng.random_range(0.2..=3.0);
        for j in 0..n {
            e[i * n + j] = if i == j {
                d
            } else {
                rng.random_range(0.0..2.0 * d * 0.999)
            };
        }
    }
    Matrix::new(n, e).unwrap()
}

pub fn random_point<R: Rng>(rng: &mut R, n: usize, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..=hi)).collect()
}
