use serde::Serialize;

use crate::autocov::HurstIndex;
use crate::bilateral::{norm_bilateral, q_solve};
use crate::error::{FgnError, Result};
use crate::gramians::sample_fgn;

/// Empirical variance of the bilateral interpolation error against
/// `1 - R_2(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McReport {
    pub hurst: HurstIndex,
    pub n: usize,
    pub paths: usize,
    pub seed: u64,
    pub empirical: f64,
    pub expected: f64,
    pub std_error: f64,
    /// `(empirical - expected) / std_error`.
    pub z: f64,
}

impl McReport {
    pub fn within(&self, sigmas: f64) -> bool {
        self.z.abs() <= sigmas
    }
}

/// Samples `paths` windows `(Delta_1, ..., Delta_{2n-1})` and averages
/// `(Delta_n - sum_k Q_{n-1}^k (Delta_{n-k} + Delta_{n+k}))^2`.
pub fn mc_residual_check(h: HurstIndex, n: usize, paths: usize, seed: u64) -> Result<McReport> {
    if n < 2 || paths < 2 {
        return Err(FgnError::Domain(format!(
            "need n >= 2 and at least two paths, got n = {n}, paths = {paths}"
        )));
    }
    let q = q_solve(h, n - 1)?;
    let batch = sample_fgn(h, 2 * n - 1, paths, seed)?;
    let centre = n - 1;
    let sq: Vec<f64> = batch
        .paths()
        .map(|p| {
            let fit: f64 = (1..n)
                .map(|k| q.get(k) * (p[centre - k] + p[centre + k]))
                .sum();
            (p[centre] - fit).powi(2)
        })
        .collect();
    let mean = sq.iter().sum::<f64>() / paths as f64;
    let var = sq.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (paths - 1) as f64;
    let std_error = (var / paths as f64).sqrt();
    let expected = 1.0 - norm_bilateral(h, n)?;
    Ok(McReport {
        hurst: h,
        n,
        paths,
        seed,
        empirical: mean,
        expected,
        std_error,
        z: (mean - expected) / std_error,
    })
}
