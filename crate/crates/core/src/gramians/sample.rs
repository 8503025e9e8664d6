use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{build_gram, cholesky_factor, GramKind};
use crate::autocov::HurstIndex;
use crate::error::{FgnError, Result};

/// `count` independent fGn paths `(Delta_1, ..., Delta_n)`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePathBatch {
    pub hurst: HurstIndex,
    pub length: usize,
    pub count: usize,
    pub seed: u64,
    paths: Vec<f64>,
}

impl SamplePathBatch {
    pub fn path(&self, i: usize) -> &[f64] {
        &self.paths[i * self.length..(i + 1) * self.length]
    }

    pub fn paths(&self) -> impl Iterator<Item = &[f64]> {
        self.paths.chunks_exact(self.length)
    }
}

/// Uniform on the open interval (0, 1) from the top 53 bits.
#[inline]
fn open_unit(bits: u64) -> f64 {
    ((bits >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Draws paths as `L z` with `L` the fGn Cholesky triangle and `z` standard
/// normal by inverse CDF. Path `i` uses ChaCha20 stream `i` of `seed`, so the
/// batch does not depend on the thread count.
pub fn sample_fgn(h: HurstIndex, n: usize, count: usize, seed: u64) -> Result<SamplePathBatch> {
    if n == 0 || count == 0 {
        return Err(FgnError::Domain(
            "path length and count must be positive".into(),
        ));
    }
    let factor = cholesky_factor(&build_gram(h.require_open()?, GramKind::Fgn, n)?.matrix)?;
    let normal = Normal::standard();
    let mut paths = vec![0.0; n * count];
    crate::parallel::install(|| {
        paths.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let z: Vec<f64> = (0..n)
                .map(|_| normal.inverse_cdf(open_unit(rng.next_u64())))
                .collect();
            for (r, out) in row.iter_mut().enumerate() {
                *out = factor.row(r).iter().zip(&z).map(|(l, x)| l * x).sum();
            }
        })
    });
    Ok(SamplePathBatch {
        hurst: h,
        length: n,
        count,
        seed,
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autocov::rho;

    fn hu(v: f64) -> HurstIndex {
        HurstIndex::new(v).unwrap()
    }

    #[test]
    fn deterministic_for_seed() {
        let a = sample_fgn(hu(0.7), 6, 50, 42).unwrap();
        let b = sample_fgn(hu(0.7), 6, 50, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_fgn(hu(0.7), 6, 50, 43).unwrap();
        assert_ne!(a.path(0), c.path(0));
    }

    #[test]
    fn white_noise_has_no_lag_one_correlation() {
        let (n, count) = (16, 4000);
        let b = sample_fgn(hu(0.5), n, count, 7).unwrap();
        let mut s = 0.0;
        let mut m = 0usize;
        for p in b.paths() {
            for w in p.windows(2) {
                s += w[0] * w[1];
                m += 1;
            }
        }
        let corr = s / m as f64;
        assert!(corr.abs() < 4.0 / ((count * n) as f64).sqrt(), "{corr}");
    }

    #[test]
    fn two_step_correlation_matches_rho() {
        let h = hu(0.7);
        let count = 40_000;
        let b = sample_fgn(h, 2, count, 11).unwrap();
        let prods: Vec<f64> = b.paths().map(|p| p[0] * p[1]).collect();
        let mean = prods.iter().sum::<f64>() / count as f64;
        let var = prods.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        let se = (var / count as f64).sqrt();
        assert!(
            (mean - rho(h, 1)).abs() < 3.0 * se,
            "{mean} vs {}",
            rho(h, 1)
        );
        let unit: f64 = b.paths().map(|p| p[0] * p[0]).sum::<f64>() / count as f64;
        assert!((unit - 1.0).abs() < 0.05);
    }

    #[test]
    fn rejects_empty_requests() {
        assert!(sample_fgn(hu(0.6), 0, 3, 1).is_err());
        assert!(sample_fgn(hu(0.6), 3, 0, 1).is_err());
    }
}
