//! One-sided projection of `Delta_1` on `Delta_2, ..., Delta_n`.
//!
//! The coefficients `Gamma_n^k`, `k = 2..n`, solve the Toeplitz system
//! `rho_{l-1} = sum_k Gamma_n^k rho_{|l-k|}`, `l = 2..n`. They are computed
//! either by a direct Cholesky solve or by the order recurrence
//!
//! ```text
//! Gamma_{m+1}^{m+1} = (rho_m - sum_k Gamma_m^k rho_{m+1-k}) / (1 - sum_k Gamma_m^k rho_{k-1})
//! Gamma_{m+1}^k     = Gamma_m^k - Gamma_{m+1}^{m+1} Gamma_m^{m-k+2}
//! ```
//!
//! Coefficient vectors are stored with offset two (slot 0 holds `k = 2`);
//! every public accessor takes `k` itself.

use serde::Serialize;

use crate::autocov::{rho_prefix, AutocovTable, HurstIndex};
use crate::error::{FgnError, Result};
use crate::gramians::{solve_spd, SymMatrix};

/// Smallest admissible denominator in the recurrences.
pub const DEGENERATE_THRESHOLD: f64 = 1e-14;

pub(crate) fn check_denominator(context: &'static str, value: f64) -> Result<f64> {
    if value < DEGENERATE_THRESHOLD || !value.is_finite() {
        Err(FgnError::DegenerateDenominator {
            context,
            value,
            threshold: DEGENERATE_THRESHOLD,
        })
    } else {
        Ok(value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OneSidedMethod {
    Solve,
    Recursive,
}

/// `Gamma_n^k`, `k = 2..n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneSidedCoefficients {
    pub hurst: HurstIndex,
    pub n: usize,
    pub method: OneSidedMethod,
    gamma: Vec<f64>,
    /// `max_l |rho_{l-1} - sum_k Gamma_n^k rho_{|l-k|}|`.
    pub residual: f64,
    /// 1-norm condition estimate; present for the direct solve.
    pub condition_estimate: Option<f64>,
}

impl OneSidedCoefficients {
    /// `Gamma_n^k` for `2 <= k <= n`.
    pub fn get(&self, k: usize) -> f64 {
        assert!((2..=self.n).contains(&k), "k = {k} outside 2..={}", self.n);
        self.gamma[k - 2]
    }

    /// Values in order `k = 2, ..., n`.
    pub fn as_slice(&self) -> &[f64] {
        &self.gamma
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.gamma.iter().enumerate().map(|(i, &g)| (i + 2, g))
    }
}

fn check_order(n: usize) -> Result<()> {
    if n < 2 {
        Err(FgnError::Domain(format!(
            "one-sided projection needs n >= 2, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// Residual of the normal equations for a coefficient slice (offset two).
fn system_residual(rho: &AutocovTable, gamma: &[f64]) -> f64 {
    let m = gamma.len();
    (0..m)
        .map(|l| {
            let s: f64 = gamma
                .iter()
                .enumerate()
                .map(|(k, g)| g * rho[l.abs_diff(k)])
                .sum();
            (rho[l + 1] - s).abs()
        })
        .fold(0.0, f64::max)
}

/// Direct solve of the `(n-1) x (n-1)` Toeplitz system.
pub fn gamma_solve(h: HurstIndex, n: usize) -> Result<OneSidedCoefficients> {
    check_order(n)?;
    let h = h.require_open()?;
    let rho = rho_prefix(h, n as u64);
    let m = n - 1;
    let a = SymMatrix::from_fn(m, |r, c| rho[r.abs_diff(c)]);
    let rhs: Vec<f64> = (1..=m).map(|l| rho[l]).collect();
    let sol = solve_spd(&a, &rhs)?;
    Ok(OneSidedCoefficients {
        hurst: h,
        n,
        method: OneSidedMethod::Solve,
        residual: sol.residual,
        condition_estimate: Some(sol.condition_estimate),
        gamma: sol.x,
    })
}

/// All orders `Gamma_2, ..., Gamma_{n_max}` produced by the recurrence.
#[derive(Debug, Clone)]
pub struct GammaLadder {
    hurst: HurstIndex,
    rho: AutocovTable,
    /// `rows[m - 2]` holds `Gamma_m` (offset two).
    rows: Vec<Vec<f64>>,
    /// `1 - sum_k Gamma_m^k rho_{k-1}` for each order `m`.
    innovation: Vec<f64>,
}

impl GammaLadder {
    pub fn new(h: HurstIndex, n_max: usize) -> Result<Self> {
        check_order(n_max)?;
        let h = h.require_open()?;
        let rho = rho_prefix(h, n_max as u64 + 1);
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_max - 1);
        let mut innovation = Vec::with_capacity(n_max - 1);
        let mut cur = vec![rho[1]];
        for m in 2..=n_max {
            let den = 1.0
                - cur
                    .iter()
                    .enumerate()
                    .map(|(i, g)| g * rho[i + 1])
                    .sum::<f64>();
            innovation.push(den);
            if m < n_max {
                // slot i holds k = i + 2, so rho_{m+1-k} = rho[m - 1 - i]
                let num = rho[m]
                    - cur
                        .iter()
                        .enumerate()
                        .map(|(i, g)| g * rho[m - 1 - i])
                        .sum::<f64>();
                let last = num / check_denominator("one-sided recurrence", den)?;
                // Gamma_m^{m-k+2} sits in slot m - k = m - 2 - i
                let mut next: Vec<f64> = (0..cur.len())
                    .map(|i| cur[i] - last * cur[m - 2 - i])
                    .collect();
                next.push(last);
                rows.push(std::mem::replace(&mut cur, next));
            }
        }
        rows.push(cur);
        Ok(Self {
            hurst: h,
            rho,
            rows,
            innovation,
        })
    }

    pub fn max_order(&self) -> usize {
        self.rows.len() + 1
    }

    /// `Gamma_m` in order `k = 2..m`.
    pub fn row(&self, m: usize) -> &[f64] {
        &self.rows[m - 2]
    }

    /// `Gamma_m^k`.
    pub fn get(&self, m: usize, k: usize) -> f64 {
        self.rows[m - 2][k - 2]
    }

    /// `1 - R_1(m)`, the one-step innovation variance at order `m`.
    pub fn innovation_variance(&self, m: usize) -> f64 {
        self.innovation[m - 2]
    }

    pub fn rho(&self) -> &AutocovTable {
        &self.rho
    }

    pub fn coefficients(&self, m: usize) -> OneSidedCoefficients {
        let gamma = self.row(m).to_vec();
        OneSidedCoefficients {
            hurst: self.hurst,
            n: m,
            method: OneSidedMethod::Recursive,
            residual: system_residual(&self.rho, &gamma),
            condition_estimate: None,
            gamma,
        }
    }
}

pub fn gamma_recursive(h: HurstIndex, n: usize) -> Result<OneSidedCoefficients> {
    Ok(GammaLadder::new(h, n)?.coefficients(n))
}

pub fn gamma(h: HurstIndex, n: usize, method: OneSidedMethod) -> Result<OneSidedCoefficients> {
    match method {
        OneSidedMethod::Solve => gamma_solve(h, n),
        OneSidedMethod::Recursive => gamma_recursive(h, n),
    }
}

/// Pieces of the closed form for `Gamma_4^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gamma43Parts {
    /// `rho_1^2 rho_2 - rho_2^3 + rho_1 rho_2 rho_3 - rho_1^2 + rho_2 - rho_1 rho_3`.
    pub numerator: f64,
    /// `(1 - rho_2)(rho_2 + rho_2^2 - rho_1^2 - rho_1 rho_3)`.
    pub factored_numerator: f64,
    /// `1 + 2 rho_1^2 rho_2 - rho_2^2 - 2 rho_1^2`.
    pub denominator: f64,
    pub value: f64,
}

pub fn gamma43_parts(h: HurstIndex) -> Result<Gamma43Parts> {
    let h = h.require_open()?;
    let rho = rho_prefix(h, 3);
    let (r1, r2, r3) = (rho[1], rho[2], rho[3]);
    let numerator = r1 * r1 * r2 - r2 * r2 * r2 + r1 * r2 * r3 - r1 * r1 + r2 - r1 * r3;
    let factored_numerator = (1.0 - r2) * (r2 + r2 * r2 - r1 * r1 - r1 * r3);
    if (numerator - factored_numerator).abs() > 1e-12 {
        return Err(FgnError::CrossCheck {
            context: "gamma43 numerator factorization",
            lhs: numerator,
            rhs: factored_numerator,
        });
    }
    let denominator = 1.0 + 2.0 * r1 * r1 * r2 - r2 * r2 - 2.0 * r1 * r1;
    Ok(Gamma43Parts {
        numerator,
        factored_numerator,
        denominator,
        value: numerator / denominator,
    })
}

/// `Gamma_4^3` from its closed form.
pub fn gamma43_closed(h: HurstIndex) -> Result<f64> {
    Ok(gamma43_parts(h)?.value)
}

/// `rho_{n-1} - rho_n - sum_{k=2}^n Gamma_n^k (rho_{n-k} - rho_{n+1-k})`.
pub fn delta_n(h: HurstIndex, n: usize) -> Result<f64> {
    let g = gamma_solve(h, n)?;
    Ok(delta_from(&rho_prefix(h, n as u64), &g))
}

pub(crate) fn delta_from(rho: &AutocovTable, g: &OneSidedCoefficients) -> f64 {
    let n = g.n;
    rho[n - 1]
        - rho[n]
        - g.iter()
            .map(|(k, v)| v * (rho[n - k] - rho[n + 1 - k]))
            .sum::<f64>()
}

/// Denominator used for the martingale coefficients `R_k`, `k >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MartingaleDenominator {
    /// `1 - sum_i Gamma_{k-1}^i rho_i`.
    AsPrinted,
    /// `1 - sum_i Gamma_{k-1}^i rho_{i-1}`, the innovation variance.
    InnovationVariance,
}

/// Coefficients `R_k`, `k = 2..n`, of the projection on the orthogonal
/// innovations `Delta_k - E(Delta_k | Delta_2, ..., Delta_{k-1})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleCoefficients {
    pub hurst: HurstIndex,
    pub n: usize,
    pub denominator: MartingaleDenominator,
    r: Vec<f64>,
    /// Variance of the `k`-th innovation, same offset as `r`.
    innovation_variance: Vec<f64>,
}

impl MartingaleCoefficients {
    pub fn get(&self, k: usize) -> f64 {
        assert!((2..=self.n).contains(&k), "k = {k} outside 2..={}", self.n);
        self.r[k - 2]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.r
    }

    pub fn innovation_variance(&self, k: usize) -> f64 {
        self.innovation_variance[k - 2]
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.r.iter().map(|r| r * r).sum()
    }

    /// `sum_k R_k^2 Var(innovation_k)`, the norm of the projection.
    pub fn weighted_sum_of_squares(&self) -> f64 {
        self.r
            .iter()
            .zip(&self.innovation_variance)
            .map(|(r, v)| r * r * v)
            .sum()
    }
}

pub fn martingale_coeffs(
    h: HurstIndex,
    n: usize,
    denominator: MartingaleDenominator,
) -> Result<MartingaleCoefficients> {
    check_order(n)?;
    let ladder = GammaLadder::new(h, n.max(3))?;
    let rho = ladder.rho();
    let mut r = vec![rho[1]];
    let mut innovation_variance = vec![1.0];
    for k in 3..=n {
        let g = ladder.row(k - 1);
        // slot j holds i = j + 2
        let num = rho[k - 1]
            - g.iter()
                .enumerate()
                .map(|(j, v)| v * rho[k - 2 - j])
                .sum::<f64>();
        let lag_shift = match denominator {
            MartingaleDenominator::AsPrinted => 2,
            MartingaleDenominator::InnovationVariance => 1,
        };
        let den = 1.0
            - g.iter()
                .enumerate()
                .map(|(j, v)| v * rho[j + lag_shift])
                .sum::<f64>();
        r.push(num / check_denominator("martingale coefficient", den)?);
        innovation_variance.push(ladder.innovation_variance(k - 1));
    }
    Ok(MartingaleCoefficients {
        hurst: ladder.hurst,
        n,
        denominator,
        r,
        innovation_variance,
    })
}

/// Numerical status of `R_1(n) = sum_k R_k^2` for both denominators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleNormCheck {
    pub hurst: HurstIndex,
    pub n: usize,
    pub norm: f64,
    pub sum_sq_as_printed: f64,
    pub sum_sq_innovation_variance: f64,
    /// `sum_k R_k^2 Var(innovation_k)` with the innovation-variance denominator.
    pub weighted_sum_sq: f64,
    /// Denominators for which the unweighted identity holds to `tolerance`.
    pub unweighted_holds_for: Vec<MartingaleDenominator>,
    pub weighted_holds: bool,
    pub tolerance: f64,
}

pub fn martingale_norm_check(
    h: HurstIndex,
    n: usize,
    tolerance: f64,
) -> Result<MartingaleNormCheck> {
    let norm = norm_one_sided(h, n)?;
    let printed = martingale_coeffs(h, n, MartingaleDenominator::AsPrinted)?;
    let derived = martingale_coeffs(h, n, MartingaleDenominator::InnovationVariance)?;
    let (sp, sd, w) = (
        printed.sum_of_squares(),
        derived.sum_of_squares(),
        derived.weighted_sum_of_squares(),
    );
    let mut unweighted_holds_for = Vec::new();
    if (sp - norm).abs() <= tolerance {
        unweighted_holds_for.push(MartingaleDenominator::AsPrinted);
    }
    if (sd - norm).abs() <= tolerance {
        unweighted_holds_for.push(MartingaleDenominator::InnovationVariance);
    }
    Ok(MartingaleNormCheck {
        hurst: printed.hurst,
        n,
        norm,
        sum_sq_as_printed: sp,
        sum_sq_innovation_variance: sd,
        weighted_sum_sq: w,
        unweighted_holds_for,
        weighted_holds: (w - norm).abs() <= tolerance,
        tolerance,
    })
}

/// `R_1(n) = sum_{k=2}^n Gamma_n^k rho_{k-1}`.
pub fn norm_one_sided(h: HurstIndex, n: usize) -> Result<f64> {
    let g = gamma_solve(h, n)?;
    let rho = rho_prefix(h, n as u64);
    Ok(g.iter().map(|(k, v)| v * rho[k - 1]).sum())
}

/// `R_1(n)` as the quadratic form `sum_{k,l} Gamma^k Gamma^l rho_{|k-l|}`.
pub fn norm_one_sided_quadratic(g: &OneSidedCoefficients) -> f64 {
    let rho = rho_prefix(g.hurst, g.n as u64);
    let v = g.as_slice();
    v.iter()
        .enumerate()
        .map(|(a, x)| {
            x * v
                .iter()
                .enumerate()
                .map(|(b, y)| y * rho[a.abs_diff(b)])
                .sum::<f64>()
        })
        .sum()
}

/// `R_1(m)` for `m = 2..=n_max` from one pass of the recurrence.
pub fn norm_one_sided_ladder(h: HurstIndex, n_max: usize) -> Result<Vec<f64>> {
    let ladder = GammaLadder::new(h, n_max)?;
    Ok((2..=n_max)
        .map(|m| 1.0 - ladder.innovation_variance(m))
        .collect())
}

/// `E(Delta_n | Delta_1, ..., Delta_{n-1}) = sum_k Gamma_n^{n-k+1} Delta_k`
/// with `history = (Delta_1, ..., Delta_{n-1})`.
pub fn predict(h: HurstIndex, history: &[f64]) -> Result<f64> {
    if history.is_empty() {
        return Err(FgnError::Domain(
            "prediction needs a nonempty history".into(),
        ));
    }
    let n = history.len() + 1;
    let g = gamma_solve(h, n)?;
    Ok(history
        .iter()
        .enumerate()
        .map(|(i, x)| g.get(n - i) * x)
        .sum())
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
    fn brownian_case_is_zero() {
        for n in [2, 5, 12] {
            for v in gamma_solve(hu(0.5), n).unwrap().as_slice() {
                assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-14);
            }
        }
        for v in gamma_recursive(hu(0.5), 5).unwrap().as_slice() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(delta_n(hu(0.5), 4).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(norm_one_sided(hu(0.5), 50).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn order_two_is_rho_one() {
        for v in [0.2, 0.6, 0.95] {
            let h = hu(v);
            assert_abs_diff_eq!(
                gamma_solve(h, 2).unwrap().get(2),
                rho(h, 1),
                epsilon = 1e-15
            );
            assert_eq!(gamma_recursive(h, 2).unwrap().get(2), rho(h, 1));
        }
    }

    #[test]
    fn order_three_last_coefficient() {
        let h = hu(0.73);
        let (r1, r2) = (rho(h, 1), rho(h, 2));
        let g = gamma_recursive(h, 3).unwrap();
        assert_abs_diff_eq!(g.get(3), (r2 - r1 * r1) / (1.0 - r1 * r1), epsilon = 1e-15);
    }

    #[test]
    fn recursion_agrees_with_solver() {
        let h = hu(0.7);
        let a = gamma_solve(h, 10).unwrap();
        let b = gamma_recursive(h, 10).unwrap();
        for k in 2..=10 {
            assert_abs_diff_eq!(a.get(k), b.get(k), epsilon = 1e-9);
        }
        assert!(a.residual < 1e-12);
        assert!(b.residual < 1e-12);
    }

    #[test]
    fn gamma43_closed_form() {
        assert_abs_diff_eq!(gamma43_closed(hu(0.5)).unwrap(), 0.0, epsilon = 1e-14);
        let p = gamma43_parts(hu(0.8)).unwrap();
        assert_abs_diff_eq!(p.numerator, p.factored_numerator, epsilon = 1e-12);
        let h = hu(0.7);
        assert_abs_diff_eq!(
            gamma43_closed(h).unwrap(),
            gamma_solve(h, 4).unwrap().get(3),
            epsilon = 1e-12
        );
        // denominator is the 3x3 fGn determinant
        let det = crate::gramians::determinant_spd(
            &crate::gramians::build_gram(h, crate::gramians::GramKind::Fgn, 3)
                .unwrap()
                .matrix,
        )
        .unwrap();
        assert_abs_diff_eq!(gamma43_parts(h).unwrap().denominator, det, epsilon = 1e-14);
    }

    #[test]
    fn delta_is_negative() {
        let d5 = delta_n(hu(0.7), 5).unwrap();
        assert!(d5 < 0.0, "{d5}");
        assert!(delta_n(hu(0.9), 10).unwrap() < 0.0);
    }

    #[test]
    fn martingale_basics() {
        for den in [
            MartingaleDenominator::AsPrinted,
            MartingaleDenominator::InnovationVariance,
        ] {
            let h = hu(0.64);
            assert_eq!(martingale_coeffs(h, 2, den).unwrap().get(2), rho(h, 1));
            for v in martingale_coeffs(hu(0.5), 6, den).unwrap().as_slice() {
                assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn innovation_variant_is_partial_autocorrelation() {
        // R_k with the innovation-variance denominator equals Gamma_k^k
        let h = hu(0.7);
        let m = martingale_coeffs(h, 8, MartingaleDenominator::InnovationVariance).unwrap();
        for k in 2..=8 {
            assert_abs_diff_eq!(m.get(k), gamma_solve(h, k).unwrap().get(k), epsilon = 1e-12);
        }
    }

    #[test]
    fn martingale_norm_identity_status() {
        let c = martingale_norm_check(hu(0.7), 6, 1e-10).unwrap();
        assert!(c.weighted_holds, "{c:?}");
        assert!(c.unweighted_holds_for.is_empty(), "{c:?}");
    }

    #[test]
    fn table_norm_values() {
        assert_abs_diff_eq!(
            norm_one_sided(hu(0.6), 2).unwrap(),
            0.022111,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            norm_one_sided(hu(0.8), 100).unwrap(),
            0.306050,
            epsilon = 1e-6
        );
    }

    #[test]
    fn ladder_norms_match_direct() {
        let h = hu(0.85);
        let lad = norm_one_sided_ladder(h, 30).unwrap();
        for n in [2, 7, 30] {
            assert_abs_diff_eq!(lad[n - 2], norm_one_sided(h, n).unwrap(), epsilon = 1e-12);
        }
        let g = gamma_solve(h, 30).unwrap();
        assert_abs_diff_eq!(norm_one_sided_quadratic(&g), lad[28], epsilon = 1e-12);
    }

    #[test]
    fn prediction() {
        assert_abs_diff_eq!(
            predict(hu(0.5), &[1.0, -2.0, 3.0]).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        let h = hu(0.66);
        assert_abs_diff_eq!(
            predict(h, &[2.5]).unwrap(),
            rho(h, 1) * 2.5,
            epsilon = 1e-15
        );
        let h = hu(0.7);
        let total: f64 = gamma_solve(h, 4).unwrap().as_slice().iter().sum();
        assert_abs_diff_eq!(
            predict(h, &[1.0, 1.0, 1.0]).unwrap(),
            total,
            epsilon = 1e-14
        );
        assert!(predict(h, &[]).is_err());
    }

    #[test]
    fn invalid_orders() {
        assert!(gamma_solve(hu(0.7), 1).is_err());
        assert!(gamma_recursive(hu(0.7), 0).is_err());
        assert!(gamma_solve(HurstIndex::one(), 3).is_err());
    }
}
