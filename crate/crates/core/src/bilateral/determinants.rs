//! Cramer determinants of the window-three reduced system and the behaviour
//! of the middle one near `H = 1`.

use serde::Serialize;

use crate::autocov::{rho_dh, rho_prefix, AutocovTable, HurstIndex};
use crate::error::{FgnError, Result};
use crate::gramians::determinant_general;

use super::{reduced_matrix, reduced_rhs};

const CROSS_CHECK_TOLERANCE: f64 = 1e-10;
const FD_STEP: f64 = 1e-5;

/// `D_3^*` and the column-replaced `D_{3,k}^*`, so that `Q_3^k = D_{3,k}^* / D_3^*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterminantBundle {
    pub hurst: HurstIndex,
    pub d3: f64,
    pub d31: f64,
    pub d32: f64,
    pub d33: f64,
}

impl DeterminantBundle {
    pub fn get(&self, k: usize) -> f64 {
        match k {
            1 => self.d31,
            2 => self.d32,
            3 => self.d33,
            _ => panic!("no determinant D_3,{k}"),
        }
    }

    /// `Q_3^k` by Cramer's rule.
    pub fn coefficient(&self, k: usize) -> f64 {
        self.get(k) / self.d3
    }
}

fn expansions(r: &AutocovTable) -> [f64; 4] {
    let (r1, r2, r3, r4, r5, r6) = (r[1], r[2], r[3], r[4], r[5], r[6]);
    let d3 = (1.0 + r6) * (1.0 + r4) * (1.0 + r2)
        - (1.0 + r6) * (r1 + r3).powi(2)
        - (1.0 + r4) * (r2 + r4).powi(2)
        - (1.0 + r2) * (r1 + r5).powi(2)
        + 2.0 * (r1 + r3) * (r2 + r4) * (r1 + r5);
    let d31 = (1.0 + r6) * (r1 * (1.0 + r4) - r2 * (r1 + r3))
        - (r1 + r5) * (r1 * (r1 + r5) - r3 * (r1 + r3))
        + (r2 + r4) * (r2 * (r1 + r5) - r3 * (1.0 + r4));
    let d32 = (1.0 + r6) * (r2 * (1.0 + r2) - r1 * (r1 + r3))
        - (r1 + r5) * (r3 * (1.0 + r2) - r1 * (r2 + r4))
        + (r2 + r4) * (r3 * (r1 + r3) - r2 * (r2 + r4));
    let d33 = r3 * ((1.0 + r4) * (1.0 + r2) - (r1 + r3).powi(2))
        - (r1 + r5) * (r2 * (1.0 + r2) - r1 * (r1 + r3))
        + (r2 + r4) * (r2 * (r1 + r3) - r1 * (1.0 + r4));
    [d3, d31, d32, d33]
}

/// `A*_3` with the column of unknown `Q^k` replaced by the right-hand side.
/// `k = 0` leaves the matrix untouched.
pub fn reduced_matrix_with_column(rho: &AutocovTable, k: usize) -> Vec<Vec<f64>> {
    let mut rows = reduced_matrix(rho, 3).to_rows();
    if k > 0 {
        let col = 3 - k;
        for (row, b) in rows.iter_mut().zip(reduced_rhs(rho, 3)) {
            row[col] = b;
        }
    }
    rows
}

fn cross_check(context: &'static str, lhs: f64, rhs: f64) -> Result<()> {
    if (lhs - rhs).abs() <= CROSS_CHECK_TOLERANCE * lhs.abs().max(rhs.abs()).max(1.0) {
        Ok(())
    } else {
        Err(FgnError::CrossCheck { context, lhs, rhs })
    }
}

/// Evaluates the expanded determinants and checks each against an
/// elimination-based determinant of the same matrix. Accepts `H = 1`.
pub fn bilateral_determinants(h: HurstIndex) -> Result<DeterminantBundle> {
    let rho = rho_prefix(h, 6);
    let d = expansions(&rho);
    const CONTEXTS: [&str; 4] = ["D3", "D31", "D32", "D33"];
    for k in 0..4 {
        cross_check(
            CONTEXTS[k],
            d[k],
            determinant_general(&reduced_matrix_with_column(&rho, k))?,
        )?;
    }
    Ok(DeterminantBundle {
        hurst: h,
        d3: d[0],
        d31: d[1],
        d32: d[2],
        d33: d[3],
    })
}

/// `D_{3,2}^*` alone, without cross-checks.
pub fn d32_value(h: HurstIndex) -> f64 {
    expansions(&rho_prefix(h, 6))[2]
}

/// Limit of the second `H`-derivative of `D_{3,2}^*` at `H = 1`, written in
/// terms of `p_k = d rho_k / dH` at `H = 1`.
pub fn d32_second_derivative_limit() -> f64 {
    let p: Vec<f64> = (0..=6)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                rho_dh(HurstIndex::one(), k, 1).expect("first order is supported")
            }
        })
        .collect();
    6.0 * p[1] * p[2] - 4.0 * p[1] * p[3] + 8.0 * p[1] * p[4] + 4.0 * p[1] * p[5]
        - 6.0 * p[1] * p[6]
        - 6.0 * p[2] * p[2]
        + 2.0 * p[2] * p[3]
        - 12.0 * p[2] * p[4]
        + 6.0 * p[2] * p[6]
        + 4.0 * p[3] * p[3]
        + 6.0 * p[3] * p[4]
        - 4.0 * p[3] * p[5]
        - 2.0 * p[3] * p[6]
        - 2.0 * p[4] * p[4]
        + 2.0 * p[4] * p[5]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct D32ProfileRow {
    pub hurst: f64,
    pub d32: f64,
    pub d1: f64,
    pub d2: f64,
}

fn d32_at(v: f64) -> Result<f64> {
    Ok(d32_value(HurstIndex::with_limit(v)?))
}

/// `D_{3,2}^*` with finite-difference first and second derivatives. Central
/// differences with step `1e-5`; points within one step of `H = 1` switch to
/// backward differences.
pub fn d32_derivative_profile(grid: &[f64]) -> Result<Vec<D32ProfileRow>> {
    grid.iter()
        .map(|&v| {
            if !(v > 0.5 && v <= 1.0) {
                return Err(FgnError::Domain(format!(
                    "profile grid point {v} outside (0.5, 1]"
                )));
            }
            let s = FD_STEP;
            let f0 = d32_at(v)?;
            let (d1, d2) = if v + s <= 1.0 {
                let (fp, fm) = (d32_at(v + s)?, d32_at(v - s)?);
                ((fp - fm) / (2.0 * s), (fp - 2.0 * f0 + fm) / (s * s))
            } else {
                let (f1, f2, f3) = (d32_at(v - s)?, d32_at(v - 2.0 * s)?, d32_at(v - 3.0 * s)?);
                (
                    (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * s),
                    (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (s * s),
                )
            };
            Ok(D32ProfileRow {
                hurst: v,
                d32: f0,
                d1,
                d2,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilateral::q_solve;
    use approx::assert_abs_diff_eq;

    fn hu(v: f64) -> HurstIndex {
        HurstIndex::new(v).unwrap()
    }

    #[test]
    fn white_noise_values() {
        let d = bilateral_determinants(hu(0.5)).unwrap();
        assert_abs_diff_eq!(d.d3, 1.0, epsilon = 1e-15);
        for k in 1..=3 {
            assert_abs_diff_eq!(d.get(k), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn vanishes_at_one() {
        let d = bilateral_determinants(HurstIndex::one()).unwrap();
        assert_abs_diff_eq!(d.d32, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.d3, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cramer_matches_solver() {
        for v in [0.55, 0.7, 0.9, 0.99] {
            let d = bilateral_determinants(hu(v)).unwrap();
            assert!(d.d3 > 0.0);
            let q = q_solve(hu(v), 3).unwrap();
            for k in 1..=3 {
                assert_abs_diff_eq!(d.coefficient(k), q.get(k), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn second_derivative_limit() {
        let v = d32_second_derivative_limit();
        assert_abs_diff_eq!(v, -0.277226176, epsilon = 1e-8);
        // third derivative is about -124 near the endpoint
        let rows = d32_derivative_profile(&[1.0 - 1e-4, 1.0 - 1e-6]).unwrap();
        assert_abs_diff_eq!(rows[0].d2, -0.2648116683, epsilon = 1e-5);
        assert_abs_diff_eq!(rows[1].d2, v, epsilon = 1e-3);
    }

    #[test]
    fn profile_at_the_endpoint() {
        let row = d32_derivative_profile(&[1.0]).unwrap()[0];
        assert_abs_diff_eq!(row.d32, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(row.d1, 0.0, epsilon = 1e-4);
        assert!(d32_value(hu(0.995)) < 0.0);
        assert!(d32_value(hu(0.99)) > 0.0);
        assert!(d32_derivative_profile(&[0.5]).is_err());
    }
}
