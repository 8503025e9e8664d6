//! Dense symmetric factorizations: unpivoted Cholesky, a partial-pivoting LU
//! fallback for symmetric matrices that fail to factor, and a Hager-style
//! 1-norm condition estimate.

use serde::Serialize;

use crate::error::{FgnError, Result};

/// Condition estimates above this are reported as ill-conditioned.
pub const ILL_CONDITIONED_THRESHOLD: f64 = 1e12;

/// Dense symmetric matrix stored in full row-major form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds an `n x n` matrix from `f(row, col)` evaluated on the lower
    /// triangle and mirrored, so the result is exactly symmetric.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..=r {
                let v = f(r, c);
                data[r * n + c] = v;
                data[c * n + r] = v;
            }
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |r, c| if r == c { 1.0 } else { 0.0 })
    }

    /// Takes ownership of row-major data; fails unless square and symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(FgnError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        for r in 0..n {
            for c in 0..r {
                if data[r * n + c] != data[c * n + r] {
                    return Err(FgnError::Domain(format!(
                        "matrix not symmetric at ({r}, {c})"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|c| (0..self.n).map(|r| self.get(r, c).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Lower-triangular factor `L` with `L L^T = A`, rows packed contiguously.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerFactor {
    n: usize,
    /// Row `r` occupies `packed[r(r+1)/2 .. r(r+1)/2 + r + 1]`.
    packed: Vec<f64>,
}

impl LowerFactor {
    #[inline]
    fn offset(r: usize) -> usize {
        r * (r + 1) / 2
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `L[r][c]` for `c <= r`, zero above the diagonal.
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        if c > r {
            0.0
        } else {
            self.packed[Self::offset(r) + c]
        }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let o = Self::offset(r);
        &self.packed[o..o + r + 1]
    }

    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|r| self.get(r, r))
    }

    /// Solves `L L^T x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for r in 0..n {
            let row = self.row(r);
            let s: f64 = row[..r].iter().zip(&b[..r]).map(|(l, x)| l * x).sum();
            b[r] = (b[r] - s) / row[r];
        }
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|k| self.get(k, r) * b[k]).sum();
            b[r] = (b[r] - s) / self.get(r, r);
        }
    }

    /// Rebuilds `L L^T`.
    pub fn reconstruct(&self) -> SymMatrix {
        SymMatrix::from_fn(self.n, |r, c| {
            let (a, b) = (self.row(r), self.row(c));
            a.iter().zip(b).map(|(x, y)| x * y).sum()
        })
    }
}

/// Unpivoted Cholesky factorization; fails with the offending pivot when the
/// matrix is not numerically positive definite.
pub fn cholesky_factor(a: &SymMatrix) -> Result<LowerFactor> {
    let n = a.size();
    let mut packed = vec![0.0; n * (n + 1) / 2];
    for r in 0..n {
        let ro = LowerFactor::offset(r);
        for c in 0..=r {
            let co = LowerFactor::offset(c);
            let s: f64 = packed[ro..ro + c]
                .iter()
                .zip(&packed[co..co + c])
                .map(|(x, y)| x * y)
                .sum();
            let v = a.get(r, c) - s;
            if c == r {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(FgnError::NotPositiveDefinite { pivot: r, value: v });
                }
                packed[ro + r] = v.sqrt();
            } else {
                packed[ro + c] = v / packed[co + c];
            }
        }
    }
    Ok(LowerFactor { n, packed })
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
struct LuFactor {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
}

impl LuFactor {
    fn new(a: &SymMatrix) -> Result<Self> {
        let n = a.size();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|r| (r, lu[r * n + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pv == 0.0 || !pv.is_finite() {
                return Err(FgnError::Singular { pivot: k });
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = lu[k * n + k];
            for r in k + 1..n {
                let m = lu[r * n + k] / piv;
                lu[r * n + k] = m;
                for c in k + 1..n {
                    lu[r * n + c] -= m * lu[k * n + c];
                }
            }
        }
        Ok(Self { n, lu, perm, sign })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                x[r] -= self.lu[r * n + c] * x[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                x[r] -= self.lu[r * n + c] * x[c];
            }
            x[r] /= self.lu[r * n + r];
        }
        x
    }

    // A is symmetric so A^{-T} = A^{-1}
    fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        self.solve(b)
    }

    fn determinant(&self) -> f64 {
        self.sign
            * (0..self.n)
                .map(|k| self.lu[k * self.n + k])
                .product::<f64>()
    }
}

/// Which elimination produced a [`SymmetricFactor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorPath {
    Cholesky,
    PivotedLu,
}

/// Factorization of a symmetric matrix that is expected, but not guaranteed,
/// to be positive definite.
#[derive(Debug, Clone)]
pub enum SymmetricFactor {
    Cholesky(LowerFactor),
    PivotedLu(Box<LuFactorHandle>),
}

/// Opaque wrapper so the LU internals stay private.
#[derive(Debug, Clone)]
pub struct LuFactorHandle(LuFactor);

impl SymmetricFactor {
    /// Attempts Cholesky first and falls back to pivoted LU on breakdown.
    pub fn new(a: &SymMatrix) -> Result<Self> {
        match cholesky_factor(a) {
            Ok(l) => Ok(Self::Cholesky(l)),
            Err(FgnError::NotPositiveDefinite { .. }) => {
                Ok(Self::PivotedLu(Box::new(LuFactorHandle(LuFactor::new(a)?))))
            }
            Err(e) => Err(e),
        }
    }

    pub fn path(&self) -> FactorPath {
        match self {
            Self::Cholesky(_) => FactorPath::Cholesky,
            Self::PivotedLu(_) => FactorPath::PivotedLu,
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        match self {
            Self::Cholesky(l) => {
                let mut x = b.to_vec();
                l.solve_in_place(&mut x);
                x
            }
            Self::PivotedLu(lu) => lu.0.solve(b),
        }
    }

    fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        match self {
            Self::Cholesky(_) => self.solve(b),
            Self::PivotedLu(lu) => lu.0.solve_transpose(b),
        }
    }

    pub fn determinant(&self) -> f64 {
        match self {
            Self::Cholesky(l) => l.diagonal().map(|d| d * d).product(),
            Self::PivotedLu(lu) => lu.0.determinant(),
        }
    }

    fn size(&self) -> usize {
        match self {
            Self::Cholesky(l) => l.size(),
            Self::PivotedLu(lu) => lu.0.n,
        }
    }

    /// Estimate of `||A^{-1}||_1` from at most five solve pairs
    /// (Hager 1984, with Higham's alternating-sign safeguard).
    pub fn inverse_norm_one_estimate(&self) -> f64 {
        let n = self.size();
        if n == 0 {
            return 0.0;
        }
        let norm1 = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>();
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for iter in 0..5 {
            let y = self.solve(&x);
            let ny = norm1(&y);
            if iter > 0 && ny <= est {
                break;
            }
            est = ny;
            let xi: Vec<f64> = y
                .iter()
                .map(|v| if *v >= 0.0 { 1.0 } else { -1.0 })
                .collect();
            let z = self.solve_transpose(&xi);
            let (j, zmax) = z.iter().enumerate().fold((0, -1.0), |acc, (i, v)| {
                if v.abs() > acc.1 {
                    (i, v.abs())
                } else {
                    acc
                }
            });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        let alt: Vec<f64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                s * (1.0 + i as f64 / (n.max(2) - 1) as f64)
            })
            .collect();
        let alt_est = 2.0 * norm1(&self.solve(&alt)) / (3.0 * n as f64);
        est.max(alt_est)
    }
}

/// Result of a symmetric solve together with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpdSolution {
    pub x: Vec<f64>,
    /// Estimate of the 1-norm condition number of the system matrix.
    pub condition_estimate: f64,
    /// `||A x - b||_inf`.
    pub residual: f64,
    pub path: FactorPath,
}

impl SpdSolution {
    pub fn ill_conditioned(&self) -> bool {
        self.condition_estimate > ILL_CONDITIONED_THRESHOLD
    }
}

fn finish_solve(a: &SymMatrix, f: &SymmetricFactor, rhs: &[f64]) -> Result<SpdSolution> {
    if rhs.len() != a.size() {
        return Err(FgnError::DimensionMismatch {
            expected: a.size(),
            got: rhs.len(),
        });
    }
    let x = f.solve(rhs);
    let ax = a.mul_vec(&x);
    let residual = ax
        .iter()
        .zip(rhs)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max);
    Ok(SpdSolution {
        condition_estimate: a.norm_one() * f.inverse_norm_one_estimate(),
        x,
        residual,
        path: f.path(),
    })
}

/// Solves `A x = rhs` for a symmetric positive definite `A` by Cholesky.
pub fn solve_spd(a: &SymMatrix, rhs: &[f64]) -> Result<SpdSolution> {
    let f = SymmetricFactor::Cholesky(cholesky_factor(a)?);
    finish_solve(a, &f, rhs)
}

/// Solves `A X = B` column by column, sharing one factorization.
pub fn solve_spd_columns(a: &SymMatrix, columns: &[Vec<f64>]) -> Result<Vec<SpdSolution>> {
    let f = SymmetricFactor::Cholesky(cholesky_factor(a)?);
    columns.iter().map(|b| finish_solve(a, &f, b)).collect()
}

/// Like [`solve_spd`] but retries with pivoted LU when Cholesky breaks down.
pub fn solve_symmetric(a: &SymMatrix, rhs: &[f64]) -> Result<SpdSolution> {
    let f = SymmetricFactor::new(a)?;
    finish_solve(a, &f, rhs)
}

/// Determinant of a symmetric positive definite matrix as the product of the
/// squared Cholesky diagonal.
pub fn determinant_spd(a: &SymMatrix) -> Result<f64> {
    Ok(cholesky_factor(a)?.diagonal().map(|d| d * d).product())
}

/// Determinant of a general square matrix (row-major rows) by pivoted LU.
/// Returns zero for an exactly singular matrix.
pub fn determinant_general(rows: &[Vec<f64>]) -> Result<f64> {
    let n = rows.len();
    let mut data = Vec::with_capacity(n * n);
    for row in rows {
        if row.len() != n {
            return Err(FgnError::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        data.extend_from_slice(row);
    }
    match LuFactor::new(&SymMatrix { n, data }) {
        Ok(lu) => Ok(lu.determinant()),
        Err(FgnError::Singular { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spd5() -> SymMatrix {
        // B^T B + I for a fixed B
        let b = [
            [1.0, 2.0, 0.5, -1.0, 0.0],
            [0.0, 1.5, -0.3, 2.0, 1.0],
            [2.0, -1.0, 1.0, 0.0, 0.7],
            [0.4, 0.0, -2.0, 1.0, 1.0],
            [1.0, 1.0, 1.0, 1.0, -1.0],
        ];
        SymMatrix::from_fn(5, |r, c| {
            (0..5).map(|k| b[k][r] * b[k][c]).sum::<f64>() + if r == c { 1.0 } else { 0.0 }
        })
    }

    #[test]
    fn identity_solves_trivially() {
        let s = solve_spd(&SymMatrix::identity(4), &[1.0, -2.0, 3.0, 0.5]).unwrap();
        assert_eq!(s.x, vec![1.0, -2.0, 3.0, 0.5]);
        assert_abs_diff_eq!(s.condition_estimate, 1.0, epsilon = 1e-12);
        assert_eq!(determinant_spd(&SymMatrix::identity(7)).unwrap(), 1.0);
    }

    #[test]
    fn residual_on_random_spd() {
        let a = spd5();
        let b = [1.0, 0.0, -1.0, 2.0, 0.25];
        let s = solve_spd(&a, &b).unwrap();
        let ax = a.mul_vec(&s.x);
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).abs() < 1e-10);
        }
        assert!(s.residual < 1e-10);
        assert_eq!(s.path, FactorPath::Cholesky);
    }

    #[test]
    fn condition_estimate_matches_exact_for_diagonal() {
        let a = SymMatrix::from_fn(3, |r, c| if r == c { [1.0, 1e-3, 10.0][r] } else { 0.0 });
        let s = solve_spd(&a, &[1.0, 1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(s.condition_estimate, 1e4, epsilon = 1e-6);
    }

    #[test]
    fn not_positive_definite_reports_pivot() {
        let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        match cholesky_factor(&a) {
            Err(FgnError::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 1),
            other => panic!("unexpected {other:?}"),
        }
        let s = solve_symmetric(&a, &[3.0, 3.0]).unwrap();
        assert_eq!(s.path, FactorPath::PivotedLu);
        assert_abs_diff_eq!(s.x[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.x[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            SymmetricFactor::new(&a).unwrap().determinant(),
            -3.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn general_determinant() {
        let d = determinant_general(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 4.0],
        ])
        .unwrap();
        assert_abs_diff_eq!(d, 18.0, epsilon = 1e-12);
        assert_eq!(
            determinant_general(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap(),
            0.0
        );
    }

    #[test]
    fn rejects_asymmetric_and_ragged() {
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).is_err());
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0]]).is_err());
        assert!(solve_spd(&SymMatrix::identity(2), &[1.0]).is_err());
    }
}
