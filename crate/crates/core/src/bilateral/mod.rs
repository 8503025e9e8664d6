//! Bilateral projection of a central increment on `j` neighbours per side,
//!
//! ```text
//! E(Delta_n | Delta_{n-j}, .., Delta_{n-1}, Delta_{n+1}, .., Delta_{n+j})
//!     = sum_{k=1}^{j} Q_j^k (Delta_{n-k} + Delta_{n+k}).
//! ```
//!
//! With `n = j + 1` the coefficients solve the reduced symmetric system
//! `rho_{n-l} = sum_k Q^{n-k} (rho_{|k-l|} + rho_{2n-k-l})`, `l = 1..j`,
//! whose unknowns are ordered `Q^j, ..., Q^1`. Results are always exposed in
//! ascending `k`.

mod determinants;
mod recursion;

use serde::Serialize;

pub use determinants::{
    bilateral_determinants, d32_derivative_profile, d32_second_derivative_limit, d32_value,
    reduced_matrix_with_column, D32ProfileRow, DeterminantBundle,
};
pub use recursion::{q_recursive, BilateralLadder};

use crate::autocov::{rho_prefix, AutocovTable, HurstIndex};
use crate::error::{FgnError, Result};
use crate::gramians::{solve_symmetric, FactorPath, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BilateralMethod {
    Solve,
    Closed,
    Recursive,
}

/// `Q_j^k`, `k = 1..j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BilateralCoefficients {
    pub hurst: HurstIndex,
    pub window: usize,
    pub method: BilateralMethod,
    q: Vec<f64>,
    /// Residual of the reduced system.
    pub residual: f64,
    /// 1-norm condition estimate of the reduced matrix (direct solve only).
    pub condition_estimate: Option<f64>,
    /// Elimination that produced the solution (direct solve only).
    pub path: Option<FactorPath>,
}

impl BilateralCoefficients {
    pub(crate) fn from_parts(
        hurst: HurstIndex,
        method: BilateralMethod,
        q: Vec<f64>,
        rho: &AutocovTable,
    ) -> Self {
        let residual = reduced_residual(rho, &q);
        Self {
            hurst,
            window: q.len(),
            method,
            q,
            residual,
            condition_estimate: None,
            path: None,
        }
    }

    /// `Q_j^k` for `1 <= k <= j`.
    pub fn get(&self, k: usize) -> f64 {
        assert!(
            (1..=self.window).contains(&k),
            "k = {k} outside 1..={}",
            self.window
        );
        self.q[k - 1]
    }

    /// Values in order `k = 1, ..., j`.
    pub fn as_slice(&self) -> &[f64] {
        &self.q
    }

    pub fn sum(&self) -> f64 {
        self.q.iter().sum()
    }

    /// Residual of the full `2j x 2j` system solved by the symmetric vector
    /// `(Q^j, .., Q^1, Q^1, .., Q^j)`.
    pub fn embedding_residual(&self) -> f64 {
        let j = self.window;
        let n = j + 1;
        let rho = rho_prefix(self.hurst, 2 * j as u64);
        let idx: Vec<usize> = (1..2 * n).filter(|&k| k != n).collect();
        idx.iter()
            .map(|&l| {
                let s: f64 = idx
                    .iter()
                    .map(|&k| self.q[k.abs_diff(n) - 1] * rho[k.abs_diff(l)])
                    .sum();
                (rho[n.abs_diff(l)] - s).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn check_window(j: usize) -> Result<()> {
    if j == 0 {
        Err(FgnError::UnsupportedWindow(j))
    } else {
        Ok(())
    }
}

/// Reduced matrix `A*_j` with entries `rho_{|k-l|} + rho_{2n-k-l}`, `n = j + 1`.
pub fn reduced_matrix(rho: &AutocovTable, j: usize) -> SymMatrix {
    let n = j + 1;
    SymMatrix::from_fn(j, |r, c| {
        let (l, k) = (r + 1, c + 1);
        rho[k.abs_diff(l)] + rho[2 * n - k - l]
    })
}

/// Right-hand side `(rho_j, ..., rho_1)` of the reduced system.
pub fn reduced_rhs(rho: &AutocovTable, j: usize) -> Vec<f64> {
    (1..=j).map(|l| rho[j + 1 - l]).collect()
}

fn reduced_residual(rho: &AutocovTable, q: &[f64]) -> f64 {
    let j = q.len();
    let a = reduced_matrix(rho, j);
    let unknowns: Vec<f64> = q.iter().rev().copied().collect();
    a.mul_vec(&unknowns)
        .iter()
        .zip(reduced_rhs(rho, j))
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

/// Direct solve of the reduced system.
pub fn q_solve(h: HurstIndex, j: usize) -> Result<BilateralCoefficients> {
    check_window(j)?;
    let h = h.require_open()?;
    let rho = rho_prefix(h, 2 * j as u64);
    let sol = solve_symmetric(&reduced_matrix(&rho, j), &reduced_rhs(&rho, j))?;
    Ok(BilateralCoefficients {
        hurst: h,
        window: j,
        method: BilateralMethod::Solve,
        q: sol.x.iter().rev().copied().collect(),
        residual: sol.residual,
        condition_estimate: Some(sol.condition_estimate),
        path: Some(sol.path),
    })
}

/// Closed forms for windows one and two.
pub fn q_closed_small(h: HurstIndex, j: usize) -> Result<BilateralCoefficients> {
    let h = h.require_open()?;
    let rho = rho_prefix(h, 4);
    let (r1, r2, r3, r4) = (rho[1], rho[2], rho[3], rho[4]);
    let q = match j {
        1 => vec![r1 / (1.0 + r2)],
        2 => {
            let den = (1.0 + r2) * (1.0 + r4) - (r1 + r3).powi(2);
            vec![
                (r1 * (1.0 + r4) - r2 * (r1 + r3)) / den,
                (r2 * (1.0 + r2) - r1 * (r1 + r3)) / den,
            ]
        }
        _ => return Err(FgnError::UnsupportedWindow(j)),
    };
    Ok(BilateralCoefficients::from_parts(
        h,
        BilateralMethod::Closed,
        q,
        &rho,
    ))
}

pub fn q_coefficients(
    h: HurstIndex,
    j: usize,
    method: BilateralMethod,
) -> Result<BilateralCoefficients> {
    match method {
        BilateralMethod::Solve => q_solve(h, j),
        BilateralMethod::Closed => q_closed_small(h, j),
        BilateralMethod::Recursive => q_recursive(h, j),
    }
}

/// `R_2(n) = 2 sum_{k=1}^{n-1} Q_{n-1}^k rho_k`.
pub fn norm_bilateral(h: HurstIndex, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(FgnError::Domain(format!(
            "bilateral norm needs n >= 2, got {n}"
        )));
    }
    Ok(norm_from_coefficients(&q_solve(h, n - 1)?))
}

pub(crate) fn norm_from_coefficients(q: &BilateralCoefficients) -> f64 {
    let rho = rho_prefix(q.hurst, q.window as u64);
    2.0 * q
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, v)| v * rho[i + 1])
        .sum::<f64>()
}

/// `E|H|^2` as `2 sum_k Q^k sum_l Q^l (rho_{|k-l|} + rho_{k+l})`.
pub fn norm_bilateral_quadratic(q: &BilateralCoefficients) -> f64 {
    let j = q.window;
    let rho = rho_prefix(q.hurst, 2 * j as u64);
    let v = q.as_slice();
    2.0 * (1..=j)
        .map(|k| {
            v[k - 1]
                * (1..=j)
                    .map(|l| v[l - 1] * (rho[k.abs_diff(l)] + rho[k + l]))
                    .sum::<f64>()
        })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autocov::rho;
    use approx::assert_abs_diff_eq;

    fn hu(v: f64) -> HurstIndex {
        HurstIndex::new(v).unwrap()
    }

    #[test]
    fn window_one() {
        for v in [0.3, 0.51, 0.77] {
            let h = hu(v);
            let q = q_solve(h, 1).unwrap();
            assert_abs_diff_eq!(q.get(1), rho(h, 1) / (1.0 + rho(h, 2)), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(
            q_solve(hu(0.51), 1).unwrap().get(1),
            0.013884,
            epsilon = 1e-6
        );
    }

    #[test]
    fn reduced_matrix_layout_for_window_three() {
        let h = hu(0.8);
        let r = rho_prefix(h, 6);
        let a = reduced_matrix(&r, 3);
        let expected = [
            [1.0 + r[6], r[1] + r[5], r[2] + r[4]],
            [r[1] + r[5], 1.0 + r[4], r[1] + r[3]],
            [r[2] + r[4], r[1] + r[3], 1.0 + r[2]],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert_eq!(a.get(i, c), *v);
            }
        }
        assert_eq!(reduced_rhs(&r, 3), vec![r[3], r[2], r[1]]);
    }

    #[test]
    fn table_two_row_ten() {
        let expected = [
            0.125746, 0.035767, 0.022962, 0.016511, 0.012891, 0.010609, 0.009077, 0.008029,
            0.007354, 0.007498,
        ];
        let q = q_solve(hu(0.6), 10).unwrap();
        for (k, e) in expected.iter().enumerate() {
            assert_abs_diff_eq!(q.get(k + 1), *e, epsilon = 1e-6);
        }
        assert!(q.embedding_residual() < 1e-9);
        assert_eq!(q.path, Some(FactorPath::Cholesky));
    }

    #[test]
    fn closed_forms() {
        let q = q_closed_small(hu(0.5), 2).unwrap();
        assert_abs_diff_eq!(q.get(1), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(q.get(2), 0.0, epsilon = 1e-14);
        let q = q_closed_small(hu(0.6), 2).unwrap();
        assert_abs_diff_eq!(q.get(1), 0.130739, epsilon = 1e-6);
        assert_abs_diff_eq!(q.get(2), 0.043422, epsilon = 1e-6);
        let h = hu(0.8);
        let (a, b) = (q_closed_small(h, 2).unwrap(), q_solve(h, 2).unwrap());
        for k in 1..=2 {
            assert_abs_diff_eq!(a.get(k), b.get(k), epsilon = 1e-12);
        }
        assert!(matches!(
            q_closed_small(h, 3),
            Err(FgnError::UnsupportedWindow(3))
        ));
    }

    #[test]
    fn norms() {
        assert_abs_diff_eq!(
            norm_bilateral(hu(0.6), 2).unwrap(),
            0.041283,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(norm_bilateral(hu(0.5), 10).unwrap(), 0.0, epsilon = 1e-14);
        let q = q_solve(hu(0.75), 9).unwrap();
        assert_abs_diff_eq!(
            norm_bilateral_quadratic(&q),
            norm_from_coefficients(&q),
            epsilon = 1e-12
        );
        assert!(norm_bilateral(hu(0.6), 1).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(q_solve(hu(0.6), 0).is_err());
        assert!(q_solve(HurstIndex::one(), 2).is_err());
    }
}
