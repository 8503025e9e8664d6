//! Covariance (Gram) matrices of fBm and fGn on integer times, their Cholesky
//! triangles, and the symmetric solve and determinant primitives shared by
//! the projection modules.

mod factor;
mod sample;

use std::fmt::Write as _;

use serde::Serialize;

pub use factor::{
    cholesky_factor, determinant_general, determinant_spd, solve_spd, solve_spd_columns,
    solve_symmetric, FactorPath, LowerFactor, SpdSolution, SymMatrix, SymmetricFactor,
    ILL_CONDITIONED_THRESHOLD,
};
pub use sample::{sample_fgn, SamplePathBatch};

use crate::autocov::{fbm_covariance, rho_prefix, HurstIndex};
use crate::error::{FgnError, Result};
use crate::format::fmt_raw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GramKind {
    /// `R(p, r)` for `p, r = 1..n`.
    Fbm,
    /// `rho_{|p - r|}` for `p, r = 1..n`.
    Fgn,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramMatrix {
    pub kind: GramKind,
    pub hurst: HurstIndex,
    pub matrix: SymMatrix,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.matrix.size()
    }
}

pub fn build_gram(h: HurstIndex, kind: GramKind, n: usize) -> Result<GramMatrix> {
    if n == 0 {
        return Err(FgnError::Domain("Gram matrix size must be positive".into()));
    }
    let matrix = match kind {
        GramKind::Fbm => SymMatrix::from_fn(n, |r, c| {
            fbm_covariance(h, (r + 1) as f64, (c + 1) as f64).expect("positive times")
        }),
        GramKind::Fgn => {
            let rho = rho_prefix(h, n as u64 - 1);
            SymMatrix::from_fn(n, |r, c| rho[r.abs_diff(c)])
        }
    };
    Ok(GramMatrix {
        kind,
        hurst: h,
        matrix,
    })
}

/// Cholesky triangle of an fBm (`d_{j,k}`) or fGn (`l_{j,k}`) Gram matrix.
///
/// Row `k` (1-based) holds `d_{1,k}, ..., d_{k,k}`, so that
/// `sum_{j <= p ^ r} d_{j,p} d_{j,r}` reproduces the Gram entry `(p, r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CholeskyTriangle {
    pub kind: GramKind,
    factor: LowerFactor,
}

impl CholeskyTriangle {
    pub fn size(&self) -> usize {
        self.factor.size()
    }

    /// `d_{j,k}` (or `l_{j,k}`) with 1-based `1 <= j <= k <= n`.
    pub fn entry(&self, j: usize, k: usize) -> f64 {
        assert!(
            1 <= j && j <= k && k <= self.size(),
            "index ({j}, {k}) out of range"
        );
        self.factor.get(k - 1, j - 1)
    }

    /// Row `k` (1-based): `d_{1,k}, ..., d_{k,k}`.
    pub fn row(&self, k: usize) -> &[f64] {
        self.factor.row(k - 1)
    }

    pub fn factor(&self) -> &LowerFactor {
        &self.factor
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.factor.reconstruct()
    }

    /// Row-major CSV of the lower triangle, 17 significant digits, zeros
    /// above the diagonal.
    pub fn to_csv(&self) -> String {
        matrix_csv(self.size(), |r, c| self.factor.get(r, c))
    }
}

pub fn cholesky(g: &GramMatrix) -> Result<CholeskyTriangle> {
    Ok(CholeskyTriangle {
        kind: g.kind,
        factor: cholesky_factor(&g.matrix)?,
    })
}

/// Row-major CSV of a square matrix, 17 significant digits.
pub fn matrix_csv(n: usize, f: impl Fn(usize, usize) -> f64) -> String {
    let mut out = String::new();
    for r in 0..n {
        for c in 0..n {
            if c > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", fmt_raw(f(r, c)));
        }
        out.push('\n');
    }
    out
}

impl SymMatrix {
    pub fn to_csv(&self) -> String {
        matrix_csv(self.size(), |r, c| self.get(r, c))
    }
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
    fn brownian_fgn_is_identity() {
        let g = build_gram(hu(0.5), GramKind::Fgn, 3).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                assert_abs_diff_eq!(
                    g.matrix.get(r, c),
                    if r == c { 1.0 } else { 0.0 },
                    epsilon = 1e-15
                );
            }
        }
        let t = cholesky(&g).unwrap();
        for k in 1..=3 {
            for j in 1..=k {
                assert_abs_diff_eq!(
                    t.entry(j, k),
                    if j == k { 1.0 } else { 0.0 },
                    epsilon = 1e-15
                );
            }
        }
    }

    #[test]
    fn fbm_two_by_two() {
        let h = hu(0.7);
        let g = build_gram(h, GramKind::Fbm, 2).unwrap();
        let r12 = 0.5 * (1.0 + 2f64.powf(1.4) - 1.0);
        assert_abs_diff_eq!(g.matrix.get(0, 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.matrix.get(0, 1), r12, epsilon = 1e-14);
        assert_abs_diff_eq!(g.matrix.get(1, 1), 2f64.powf(1.4), epsilon = 1e-14);
    }

    #[test]
    fn fgn_toeplitz_first_row() {
        let h = hu(0.8);
        let g = build_gram(h, GramKind::Fgn, 4).unwrap();
        for r in 0..4 {
            assert_eq!(g.matrix.get(r, r), 1.0);
            for c in 0..4 {
                assert_eq!(g.matrix.get(r, c), rho(h, r.abs_diff(c) as u64));
            }
        }
    }

    #[test]
    fn fgn_two_by_two_triangle() {
        let h = hu(0.7);
        let r1 = rho(h, 1);
        let t = cholesky(&build_gram(h, GramKind::Fgn, 2).unwrap()).unwrap();
        assert_abs_diff_eq!(t.entry(1, 1), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.entry(1, 2), r1, epsilon = 1e-15);
        assert_abs_diff_eq!(t.entry(2, 2), (1.0 - r1 * r1).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn fbm_reconstruction() {
        let g = build_gram(hu(0.6), GramKind::Fbm, 5).unwrap();
        let back = cholesky(&g).unwrap().reconstruct();
        for r in 0..5 {
            for c in 0..5 {
                assert_abs_diff_eq!(back.get(r, c), g.matrix.get(r, c), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn fgn_determinants() {
        let h = hu(0.7);
        let (r1, r2) = (rho(h, 1), rho(h, 2));
        let d2 = determinant_spd(&build_gram(h, GramKind::Fgn, 2).unwrap().matrix).unwrap();
        assert_abs_diff_eq!(d2, 1.0 - r1 * r1, epsilon = 1e-14);
        let d3 = determinant_spd(&build_gram(h, GramKind::Fgn, 3).unwrap().matrix).unwrap();
        assert_abs_diff_eq!(
            d3,
            1.0 + 2.0 * r1 * r1 * r2 - r2 * r2 - 2.0 * r1 * r1,
            epsilon = 1e-14
        );
    }

    #[test]
    fn cramer_two_by_two() {
        let h = hu(0.7);
        let (r1, r2) = (rho(h, 1), rho(h, 2));
        let g = build_gram(h, GramKind::Fgn, 2).unwrap();
        let s = solve_spd(&g.matrix, &[r1, r2]).unwrap();
        let det = 1.0 - r1 * r1;
        assert_abs_diff_eq!(s.x[0], (r1 - r1 * r2) / det, epsilon = 1e-14);
        assert_abs_diff_eq!(s.x[1], (r2 - r1 * r1) / det, epsilon = 1e-14);
        assert!(!s.ill_conditioned());
    }

    #[test]
    fn size_zero_rejected() {
        assert!(build_gram(hu(0.6), GramKind::Fgn, 0).is_err());
    }

    #[test]
    fn csv_layout() {
        let g = GramMatrix {
            kind: GramKind::Fgn,
            hurst: hu(0.5),
            matrix: SymMatrix::identity(2),
        };
        let t = cholesky(&g).unwrap();
        assert_eq!(
            t.to_csv(),
            "1.0000000000000000e0,0.0000000000000000e0\n0.0000000000000000e0,1.0000000000000000e0\n"
        );
    }
}
