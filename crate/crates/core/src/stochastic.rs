//! Certificates for the three equivalent characterizations of a solution:
//! `Mx = 1/x`, `diag(x) M diag(x)` row-stochastic, and `x_i (Mx)_i = 1`.

use serde::Serialize;

use crate::fixedpoint::residual;
use crate::matrix::{diag_sandwich, inverse_elementwise, matvec, max_distance, Matrix, PositiveVector};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StochasticCertificate {
    /// Row sums of `diag(x) M diag(x)`.
    pub row_sums: Vec<f64>,
    /// `max_i |row_sums_i - 1|`.
    pub max_row_sum_defect: f64,
    /// `max_i |x_i (Mx)_i - 1|`.
    pub eq2_defect: f64,
    /// `||Mx - 1/x||_inf`.
    pub inverse_defect: f64,
}

impl StochasticCertificate {
    pub fn worst_defect(&self) -> f64 {
        self.max_row_sum_defect
            .max(self.eq2_defect)
            .max(self.inverse_defect)
    }
}

pub fn certify(m: &Matrix, x: &PositiveVector) -> Result<StochasticCertificate> {
    let mx = matvec(m, x)?;
    let inverse_defect = max_distance(&mx, inverse_elementwise(x).as_slice());
    let row_sums: Vec<f64> = diag_sandwich(m, x)?
        .rows()
        .map(|r| r.iter().sum())
        .collect();
    let max_row_sum_defect = row_sums.iter().fold(0.0f64, |acc, s| acc.max((s - 1.0).abs()));
    Ok(StochasticCertificate {
        row_sums,
        max_row_sum_defect,
        eq2_defect: residual(m, x.as_slice()),
        inverse_defect,
    })
}
