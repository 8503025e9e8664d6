//! Covariance of fractional Brownian motion and the autocovariance sequence of
//! its unit increments (fractional Gaussian noise).
//!
//! All powers `a^{2H}` are evaluated as `exp(2H ln a)` with the convention
//! `0^{2H} = 0` and `0^{2H} ln 0 = 0`.

use serde::Serialize;

use crate::error::{FgnError, Result};

/// Hurst index of a fractional Brownian motion.
///
/// Projection computations require `0 < H < 1`. The closed endpoint `H = 1`
/// is admitted through [`HurstIndex::with_limit`] for derivative and limit
/// evaluations only.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct HurstIndex(f64);

impl HurstIndex {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(FgnError::InvalidHurst(value))
        }
    }

    /// Accepts `0 < H <= 1`.
    pub fn with_limit(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value <= 1.0 {
            Ok(Self(value))
        } else {
            Err(FgnError::InvalidHurst(value))
        }
    }

    /// The degenerate endpoint `H = 1`, where every increment equals the first.
    pub const fn one() -> Self {
        Self(1.0)
    }

    pub const fn value(self) -> f64 {
        self.0
    }

    pub fn is_limit(self) -> bool {
        self.0 == 1.0
    }

    /// Rejects the endpoint `H = 1` for routines that need a nonsingular
    /// covariance.
    pub(crate) fn require_open(self) -> Result<Self> {
        if self.is_limit() {
            Err(FgnError::InvalidHurst(self.0))
        } else {
            Ok(self)
        }
    }
}

impl TryFrom<f64> for HurstIndex {
    type Error = FgnError;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

/// Lag index of the autocovariance sequence.
pub type Lag = u64;

#[inline]
fn pow_2h(a: f64, h: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if h == 0.5 {
        a
    } else if h == 1.0 {
        a * a
    } else {
        (2.0 * h * a.ln()).exp()
    }
}

/// `a^{2H} (2 ln a)^order`, the `order`-th H-derivative of `a^{2H}`.
#[inline]
fn pow_2h_dh(a: f64, h: f64, order: u32) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        pow_2h(a, h) * (2.0 * a.ln()).powi(order as i32)
    }
}

/// Covariance `R(t, s) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2` of fBm.
pub fn fbm_covariance(h: HurstIndex, t: f64, s: f64) -> Result<f64> {
    if !(t >= 0.0 && s >= 0.0) || !t.is_finite() || !s.is_finite() {
        return Err(FgnError::Domain(format!(
            "fBm covariance needs nonnegative times, got t={t}, s={s}"
        )));
    }
    let h = h.value();
    Ok(0.5 * (pow_2h(t, h) + pow_2h(s, h) - pow_2h((t - s).abs(), h)))
}

/// Autocovariance `rho_k = E[Delta_1 Delta_{k+1}]` of fractional Gaussian noise.
pub fn rho(h: HurstIndex, k: Lag) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let h = h.value();
    let k = k as f64;
    0.5 * (pow_2h(k + 1.0, h) - 2.0 * pow_2h(k, h) + pow_2h(k - 1.0, h))
}

/// `rho_0, ..., rho_m` for a fixed Hurst index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutocovTable {
    hurst: HurstIndex,
    values: Vec<f64>,
}

impl AutocovTable {
    pub fn hurst(&self) -> HurstIndex {
        self.hurst
    }

    /// Largest lag held by the table.
    pub fn max_lag(&self) -> Lag {
        (self.values.len() - 1) as Lag
    }

    /// `rho_k`; panics when `k` exceeds [`Self::max_lag`].
    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

impl std::ops::Index<usize> for AutocovTable {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.values[k]
    }
}

pub fn rho_prefix(h: HurstIndex, m: Lag) -> AutocovTable {
    let values = (0..=m).map(|k| rho(h, k)).collect();
    AutocovTable { hurst: h, values }
}

/// H-derivative of `rho_k` of order 1 or 2, obtained term by term.
pub fn rho_dh(h: HurstIndex, k: Lag, order: u32) -> Result<f64> {
    if !(1..=2).contains(&order) {
        return Err(FgnError::UnsupportedOrder(order));
    }
    if k == 0 {
        return Ok(0.0);
    }
    let h = h.value();
    let k = k as f64;
    Ok(0.5
        * (pow_2h_dh(k + 1.0, h, order) - 2.0 * pow_2h_dh(k, h, order)
            + pow_2h_dh(k - 1.0, h, order)))
}

/// First and second H-derivatives of `rho_0, ..., rho_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoDerivativeTable {
    pub hurst: HurstIndex,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

pub fn rho_derivatives(h: HurstIndex, m: Lag) -> RhoDerivativeTable {
    let eval = |order| {
        (0..=m)
            .map(|k| rho_dh(h, k, order).expect("order is 1 or 2"))
            .collect()
    };
    RhoDerivativeTable {
        hurst: h,
        first: eval(1),
        second: eval(2),
    }
}

/// `rho_2 + rho_2^2 - rho_1^2 - rho_1 rho_3`.
///
/// Evaluated both from the autocovariances and from the expanded power sum
/// `(9^{2H} - 8^{2H} - 2*6^{2H} + 4*4^{2H} - 2*2^{2H} - 1) / 4`; the two must
/// agree to `1e-12`.
pub fn hat_rho(h: HurstIndex) -> Result<f64> {
    let (r1, r2, r3) = (rho(h, 1), rho(h, 2), rho(h, 3));
    let from_rho = r2 + r2 * r2 - r1 * r1 - r1 * r3;
    let x = h.value();
    let expanded = 0.25
        * (pow_2h(9.0, x) - pow_2h(8.0, x) - 2.0 * pow_2h(6.0, x) + 4.0 * pow_2h(4.0, x)
            - 2.0 * pow_2h(2.0, x)
            - 1.0);
    if (from_rho - expanded).abs() > 1e-12 {
        return Err(FgnError::CrossCheck {
            context: "hat_rho",
            lhs: from_rho,
            rhs: expanded,
        });
    }
    Ok(from_rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hu(v: f64) -> HurstIndex {
        HurstIndex::new(v).unwrap()
    }

    #[test]
    fn hurst_validation() {
        assert!(HurstIndex::new(0.0).is_err());
        assert!(HurstIndex::new(1.0).is_err());
        assert!(HurstIndex::new(f64::NAN).is_err());
        assert!(HurstIndex::with_limit(1.0).unwrap().is_limit());
        assert!(HurstIndex::with_limit(1.5).is_err());
        assert!(HurstIndex::one().require_open().is_err());
    }

    #[test]
    fn fbm_covariance_examples() {
        assert_abs_diff_eq!(
            fbm_covariance(hu(0.7), 1.0, 1.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            fbm_covariance(hu(0.5), 2.0, 3.0).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        // 2^{1.6} / 2 at 30 digits
        assert_abs_diff_eq!(
            fbm_covariance(hu(0.8), 1.0, 2.0).unwrap(),
            1.515_716_566_510_398,
            epsilon = 1e-14
        );
        let h = hu(0.3);
        assert_eq!(
            fbm_covariance(h, 1.5, 4.0).unwrap(),
            fbm_covariance(h, 4.0, 1.5).unwrap()
        );
        assert!(fbm_covariance(h, -1.0, 1.0).is_err());
    }

    #[test]
    fn rho_examples() {
        for v in [0.1, 0.5, 0.9] {
            assert_eq!(rho(hu(v), 0), 1.0);
        }
        for k in 1..20 {
            assert_abs_diff_eq!(rho(hu(0.5), k), 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(rho(hu(0.6), 1), 0.148_698_354_997_035, epsilon = 1e-14);
    }

    #[test]
    fn prefix_matches_pointwise() {
        let t = rho_prefix(hu(0.7), 2);
        assert_eq!(t.max_lag(), 2);
        for k in 0..=2 {
            assert_eq!(t.get(k as usize).to_bits(), rho(hu(0.7), k).to_bits());
        }
        let t = rho_prefix(hu(0.5), 3);
        for (k, v) in t.as_slice().iter().enumerate() {
            assert_abs_diff_eq!(*v, if k == 0 { 1.0 } else { 0.0 }, epsilon = 1e-14);
        }
        let near_one = rho_prefix(hu(1.0 - 1e-6), 50);
        for v in near_one.as_slice() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-4);
        }
    }

    #[test]
    fn derivative_constants_at_one() {
        let one = HurstIndex::one();
        let (l2, l3, l5, l6, l7) = (2f64.ln(), 3f64.ln(), 5f64.ln(), 6f64.ln(), 7f64.ln());
        let expected = [
            4.0 * l2,
            9.0 * l3 - 8.0 * l2,
            36.0 * l2 - 18.0 * l3,
            -64.0 * l2 + 9.0 * l3 + 25.0 * l5,
            // term-by-term: 36 ln 6 - 50 ln 5 + 16 ln 4
            32.0 * l2 - 50.0 * l5 + 36.0 * l6,
            25.0 * l5 - 72.0 * l6 + 49.0 * l7,
        ];
        for (k, e) in expected.iter().enumerate() {
            assert_abs_diff_eq!(rho_dh(one, k as u64 + 1, 1).unwrap(), *e, epsilon = 1e-12);
        }
        assert_eq!(rho_dh(one, 0, 1).unwrap(), 0.0);
        assert_eq!(rho_dh(hu(0.3), 0, 2).unwrap(), 0.0);
        assert!(matches!(
            rho_dh(one, 1, 3),
            Err(FgnError::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn first_derivative_matches_central_differences() {
        let step = 1e-6;
        for h in [0.6, 0.9, 1.0] {
            for k in 0..=10u64 {
                // at H = 1 the formula is still well defined slightly above one
                let f = |x: f64| rho(HurstIndex(x), k);
                let fd = (f(h + step) - f(h - step)) / (2.0 * step);
                let an = rho_dh(HurstIndex(h), k, 1).unwrap();
                assert!((fd - an).abs() < 1e-6, "H={h} k={k}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn second_derivative_matches_differences_of_first() {
        let step = 1e-5;
        for h in [0.6, 0.8] {
            for k in 1..=8u64 {
                let f = |x: f64| rho_dh(HurstIndex(x), k, 1).unwrap();
                let fd = (f(h + step) - f(h - step)) / (2.0 * step);
                assert_abs_diff_eq!(rho_dh(hu(h), k, 2).unwrap(), fd, epsilon = 1e-6);
            }
        }
        let t = rho_derivatives(hu(0.7), 4);
        assert_eq!(t.first[0], 0.0);
        assert_eq!(t.second[0], 0.0);
    }

    #[test]
    fn hat_rho_endpoints_and_midpoint() {
        assert_abs_diff_eq!(hat_rho(hu(0.5)).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hat_rho(HurstIndex::one()).unwrap(), 0.0, epsilon = 1e-12);
        // (58 - 20 sqrt 2 - 12 sqrt 6) / 4
        assert_abs_diff_eq!(
            hat_rho(hu(0.75)).unwrap(),
            0.080_462_959_784_990_46,
            epsilon = 1e-13
        );
    }
}
