//! Window-by-window recursion for the bilateral coefficients driven by the
//! one-sided coefficients of orders `2n - 2` and `2n - 1`.
//!
//! For target window `n - 1` (`n >= 3`) and the previous window `n - 2`:
//!
//! ```text
//! T^k   = Gamma_{2n-2}^k + Gamma_{2n-2}^n Q_{n-2}^{|n-k|}            k = 2..2n-2, k != n
//! S^end = (rho_{n-1} - sum T^{2n-k} rho_{|n-k|}) / (1 - sum T^{2n-k} rho_{|2n-1-k|})
//! S^k   = Q_{n-2}^{|n-k|} - S^end T^{2n-k}                          k = 2..2n-2, k != n
//! G^k   = Gamma_{2n-1}^k + Gamma_{2n-1}^n S^k                       k = 2..2n-1, k != n
//! Q_{n-1}^{n-1} = (rho_{n-1} - sum G^k rho_{|n-k|}) / (1 - sum G^k rho_{k-1})
//! Q_{n-1}^k     = Q_{n-2}^k - Q_{n-1}^{n-1} (T^{n-k} + T^{n+k})     k = 1..n-2
//! ```
//!
//! `T` carries the projection of `Delta_1` on the window with the centre
//! removed; `S` the projection of the centre on the window extended by one;
//! `G` the projection of `Delta_1` on the same extended window.

use super::{BilateralCoefficients, BilateralMethod};
use crate::autocov::{AutocovTable, HurstIndex};
use crate::error::{FgnError, Result};
use crate::onesided::{check_denominator, GammaLadder};

/// Every window `1..=j_max` from a single pass of the recursion.
#[derive(Debug, Clone)]
pub struct BilateralLadder {
    hurst: HurstIndex,
    rho: AutocovTable,
    windows: Vec<Vec<f64>>,
}

impl BilateralLadder {
    pub fn new(h: HurstIndex, j_max: usize) -> Result<Self> {
        if j_max == 0 {
            return Err(FgnError::UnsupportedWindow(0));
        }
        let h = h.require_open()?;
        let gammas = GammaLadder::new(h, 2 * j_max + 1)?;
        let rho = gammas.rho();
        let mut windows = Vec::with_capacity(j_max);
        windows.push(vec![rho[1] / (1.0 + rho[2])]);

        // buffers indexed directly by k, unused slots stay at zero
        let mut t = Vec::new();
        let mut s = Vec::new();
        let mut g = Vec::new();
        for n in 3..=j_max + 1 {
            let g_even = gammas.row(2 * n - 2);
            let g_odd = gammas.row(2 * n - 1);
            let prev = windows.last().expect("base window");
            let q_prev = |m: usize| prev[m - 1];

            t.clear();
            t.resize(2 * n, 0.0);
            for k in (2..=2 * n - 2).filter(|&k| k != n) {
                t[k] = g_even[k - 2] + g_even[n - 2] * q_prev(k.abs_diff(n));
            }

            let mut num = rho[n - 1];
            let mut den = 1.0;
            for k in (2..=2 * n - 2).filter(|&k| k != n) {
                num -= t[2 * n - k] * rho[k.abs_diff(n)];
                den -= t[2 * n - k] * rho[2 * n - 1 - k];
            }
            let s_end = num / check_denominator("bilateral recursion (S)", den)?;

            s.clear();
            s.resize(2 * n, 0.0);
            for k in (2..=2 * n - 2).filter(|&k| k != n) {
                s[k] = q_prev(k.abs_diff(n)) - s_end * t[2 * n - k];
            }
            s[2 * n - 1] = s_end;

            g.clear();
            g.resize(2 * n, 0.0);
            let mut num = rho[n - 1];
            let mut den = 1.0;
            for k in (2..=2 * n - 1).filter(|&k| k != n) {
                g[k] = g_odd[k - 2] + g_odd[n - 2] * s[k];
                num -= g[k] * rho[k.abs_diff(n)];
                den -= g[k] * rho[k - 1];
            }
            let q_last = num / check_denominator("bilateral recursion (Q)", den)?;

            let mut next: Vec<f64> = (1..=n - 2)
                .map(|k| q_prev(k) - q_last * (t[n - k] + t[n + k]))
                .collect();
            next.push(q_last);
            windows.push(next);
        }
        Ok(Self {
            hurst: h,
            rho: rho.clone(),
            windows,
        })
    }

    pub fn hurst(&self) -> HurstIndex {
        self.hurst
    }

    pub fn max_window(&self) -> usize {
        self.windows.len()
    }

    /// `Q_j^k` for `k = 1..j`, without residual bookkeeping.
    pub fn values(&self, j: usize) -> &[f64] {
        &self.windows[j - 1]
    }

    pub fn window(&self, j: usize) -> BilateralCoefficients {
        BilateralCoefficients::from_parts(
            self.hurst,
            BilateralMethod::Recursive,
            self.windows[j - 1].clone(),
            &self.rho,
        )
    }

    /// `R_2(j + 1) = 2 sum_k Q_j^k rho_k`.
    pub fn norm(&self, j: usize) -> f64 {
        2.0 * self
            .values(j)
            .iter()
            .enumerate()
            .map(|(i, q)| q * self.rho[i + 1])
            .sum::<f64>()
    }
}

pub fn q_recursive(h: HurstIndex, j: usize) -> Result<BilateralCoefficients> {
    Ok(BilateralLadder::new(h, j)?.window(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autocov::rho;
    use crate::bilateral::q_solve;
    use approx::assert_abs_diff_eq;

    fn hu(v: f64) -> HurstIndex {
        HurstIndex::new(v).unwrap()
    }

    #[test]
    fn base_case() {
        let h = hu(0.62);
        assert_eq!(
            q_recursive(h, 1).unwrap().get(1),
            rho(h, 1) / (1.0 + rho(h, 2))
        );
    }

    #[test]
    fn matches_solver() {
        let h = hu(0.7);
        let ladder = BilateralLadder::new(h, 5).unwrap();
        for j in 1..=5 {
            let (a, b) = (ladder.window(j), q_solve(h, j).unwrap());
            for k in 1..=j {
                assert_abs_diff_eq!(a.get(k), b.get(k), epsilon = 1e-8);
            }
            assert!(a.residual < 1e-10);
        }
    }

    #[test]
    fn table_six_negative_second_coefficient() {
        let q = q_recursive(hu(0.99), 9).unwrap();
        assert_abs_diff_eq!(q.get(2), -0.005868, epsilon = 1e-6);
    }
}
