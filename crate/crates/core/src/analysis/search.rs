//! One-dimensional searches in `H`: sign changes of `Q_j^2`, maxima of
//! `Q_j^k`, the minimum of `D_{3,2}^*`, and extrapolated values at `H = 1`.

use serde::Serialize;

use crate::autocov::HurstIndex;
use crate::bilateral::{d32_value, q_solve};
use crate::error::{FgnError, Result};

/// Searches stop this far below `H = 1`.
pub const SEARCH_CAP: f64 = 1.0 - 1e-6;
/// Extrapolation nodes are `H_m = 1 - 2^{-m} LIMIT_GRID_SCALE`.
pub const LIMIT_GRID_SCALE: f64 = 1e-2;
const ROOT_BRACKET_LO: f64 = 0.9;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn q_at(v: f64, j: usize, k: usize) -> Result<f64> {
    Ok(q_solve(HurstIndex::new(v)?, j)?.get(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootResult {
    pub window: usize,
    pub root: f64,
    pub lo: f64,
    pub hi: f64,
    pub bracket_width: f64,
    /// `|Q_j^2(root)|`.
    pub residual: f64,
    /// Central-difference slope of `Q_j^2` at the root.
    pub slope: f64,
}

/// Zero of `H -> Q_j^2(H)` by bisection on `[0.9, 1 - 1e-6]`.
pub fn find_q2_root(j: usize, tol: f64) -> Result<RootResult> {
    if !(3..=10).contains(&j) {
        return Err(FgnError::UnsupportedWindow(j));
    }
    if !(tol >= 1e-7) {
        return Err(FgnError::Domain(format!("tolerance {tol} below 1e-7")));
    }
    let f = |v: f64| q_at(v, j, 2);
    let (mut lo, mut hi) = (ROOT_BRACKET_LO, SEARCH_CAP);
    let (mut flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(FgnError::NoSignChange { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let step = tol.max(1e-6);
    Ok(RootResult {
        window: j,
        root,
        lo,
        hi,
        bracket_width: hi - lo,
        residual: f(root)?.abs(),
        slope: (f(root + step)? - f(root - step)?) / (2.0 * step),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxResult {
    pub window: usize,
    pub k: usize,
    pub argmax: f64,
    pub value: f64,
    pub tolerance: f64,
    /// `value` is not below `Q_j^k` at `argmax -/+ tolerance`.
    pub certified: bool,
}

fn golden_section(
    lo: f64,
    hi: f64,
    tol: f64,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Maximum of `H -> Q_j^k(H)` on `(0.5, 1 - 1e-6)` by golden-section search.
pub fn find_max(j: usize, k: usize, tol: f64) -> Result<MaxResult> {
    if j == 0 || !(1..=j).contains(&k) {
        return Err(FgnError::Domain(format!(
            "need 1 <= k <= j, got j = {j}, k = {k}"
        )));
    }
    if !(tol > 0.0) {
        return Err(FgnError::Domain(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let f = |v: f64| q_at(v, j, k);
    let (argmax, value) = golden_section(0.5 + 1e-9, SEARCH_CAP, tol, f)?;
    let left = f((argmax - tol).max(0.5 + 1e-9))?;
    let right = f((argmax + tol).min(SEARCH_CAP))?;
    Ok(MaxResult {
        window: j,
        k,
        argmax,
        value,
        tolerance: tol,
        certified: value >= left && value >= right,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct D32Minimum {
    pub lo: f64,
    pub hi: f64,
    pub argmin: f64,
    pub value: f64,
}

/// Minimum of `D_{3,2}^*` on `[lo, hi]` by golden-section search.
pub fn d32_minimum(lo: f64, hi: f64, tol: f64) -> Result<D32Minimum> {
    if !(0.5 < lo && lo < hi && hi <= 1.0) {
        return Err(FgnError::Domain(format!("bad interval [{lo}, {hi}]")));
    }
    let f = |v: f64| Ok(-d32_value(HurstIndex::with_limit(v)?));
    let (argmin, neg) = golden_section(lo, hi, tol, f)?;
    Ok(D32Minimum {
        lo,
        hi,
        argmin,
        value: -neg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum LimitSelector {
    Coefficient { window: usize, k: usize },
    Sum { window: usize },
}

impl LimitSelector {
    fn window(self) -> usize {
        match self {
            LimitSelector::Coefficient { window, .. } | LimitSelector::Sum { window } => window,
        }
    }

    fn eval(self, h: HurstIndex) -> Result<f64> {
        let q = q_solve(h, self.window())?;
        Ok(match self {
            LimitSelector::Coefficient { k, .. } => q.get(k),
            LimitSelector::Sum { .. } => q.sum(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub selector: LimitSelector,
    pub value: f64,
    /// Difference of the last two diagonal extrapolants.
    pub uncertainty: f64,
    pub depth: usize,
    /// `(H_m, value)` for `m = 0..=depth`.
    pub samples: Vec<(f64, f64)>,
}

/// Richardson table for values sampled at steps halving from one node to
/// the next, assuming an error expansion in integer powers of the step.
fn richardson(values: &[f64]) -> Vec<Vec<f64>> {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for (m, &v) in values.iter().enumerate() {
        let mut row = vec![v];
        for i in 1..=m {
            let p = 2f64.powi(i as i32);
            row.push((p * row[i - 1] - table[m - 1][i - 1]) / (p - 1.0));
        }
        table.push(row);
    }
    table
}

/// Richardson extrapolation of the selected quantity to `H = 1` from the
/// nodes `H_m = 1 - 2^{-m} 1e-2`, `m = 0..=depth`.
pub fn limit_at_one(selector: LimitSelector, depth: usize) -> Result<LimitEstimate> {
    let j = selector.window();
    if !(1..=10).contains(&j) {
        return Err(FgnError::UnsupportedWindow(j));
    }
    if let LimitSelector::Coefficient { k, .. } = selector {
        if !(1..=j).contains(&k) {
            return Err(FgnError::Domain(format!("k = {k} outside 1..={j}")));
        }
    }
    if !(1..=12).contains(&depth) {
        return Err(FgnError::Domain(format!("depth {depth} outside 1..=12")));
    }
    let samples = (0..=depth)
        .map(|m| {
            let v = 1.0 - LIMIT_GRID_SCALE * 0.5f64.powi(m as i32);
            Ok((v, selector.eval(HurstIndex::new(v)?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let table = richardson(&values);
    let value = table[depth][depth];
    Ok(LimitEstimate {
        selector,
        value,
        uncertainty: (value - table[depth - 1][depth - 1]).abs(),
        depth,
        samples,
    })
}
