use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};

use super::{fgn_autocovariance, FbmPath, HurstParam, Method};
use crate::error::{ensure, Result};
use crate::rng::{rng_from_seed, Rng};

/// Relative tolerance below which a negative circulant eigenvalue counts as
/// rounding noise rather than a genuine loss of positive definiteness.
const NEG_EIGEN_TOL: f64 = 1e-10;

enum Sampler {
    Circulant {
        fft: Arc<dyn Fft<f64>>,
        // sqrt(λ_k / m)
        scale: Vec<f64>,
    },
    Cholesky(DMatrix<f64>),
}

/// Exact sampler of `n` unit-step fractional Gaussian noise increments.
///
/// Setup (eigenvalues or the Cholesky factor) is done once, so Monte Carlo
/// loops and the components of a Q-fBm share it.
pub struct FgnSynthesizer {
    hurst: HurstParam,
    n: usize,
    sampler: Sampler,
}

impl FgnSynthesizer {
    pub fn new(hurst: HurstParam, n: usize, method: Method) -> Result<Self> {
        ensure!(n >= 1, Domain, "need at least one increment, got n = 0");
        let sampler = match method {
            Method::CirculantEmbedding => {
                Self::circulant(hurst, n).unwrap_or_else(|| Self::cholesky(hurst, n))
            }
            Method::Cholesky => Self::cholesky(hurst, n),
        };
        Ok(Self { hurst, n, sampler })
    }

    fn circulant(hurst: HurstParam, n: usize) -> Option<Sampler> {
        let m = 2 * n.next_power_of_two();
        let mut c = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..=m / 2 {
            let g = fgn_autocovariance(j, hurst);
            c[j].re = g;
            if j > 0 && j < m / 2 {
                c[m - j].re = g;
            }
        }
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut c);
        let max = c.iter().map(|z| z.re).fold(f64::MIN, f64::max);
        if c.iter().any(|z| z.re < -NEG_EIGEN_TOL * max) {
            return None;
        }
        let scale = c.iter().map(|z| (z.re.max(0.0) / m as f64).sqrt()).collect();
        Some(Sampler::Circulant { fft, scale })
    }

    fn cholesky(hurst: HurstParam, n: usize) -> Sampler {
        let gamma: Vec<f64> = (0..n).map(|k| fgn_autocovariance(k, hurst)).collect();
        let cov = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
        let l = cov
            .cholesky()
            .expect("fractional Gaussian noise covariance is positive definite")
            .unpack();
        Sampler::Cholesky(l)
    }

    pub fn hurst(&self) -> HurstParam {
        self.hurst
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// The method actually in use (circulant requests may have fallen back).
    pub fn method(&self) -> Method {
        match self.sampler {
            Sampler::Circulant { .. } => Method::CirculantEmbedding,
            Sampler::Cholesky(_) => Method::Cholesky,
        }
    }

    /// Draws `n` increments with covariance `γ(|i − j|)`.
    pub fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        match &self.sampler {
            Sampler::Circulant { fft, scale } => {
                let mut w: Vec<Complex64> = scale
                    .iter()
                    .map(|&s| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut w);
                w.truncate(self.n);
                w.into_iter().map(|z| z.re).collect()
            }
            Sampler::Cholesky(l) => {
                let xi = DVector::from_fn(self.n, |_, _| rng.sample::<f64, _>(StandardNormal));
                (l * xi).iter().copied().collect()
            }
        }
    }

    /// First row of the covariance matrix the sampler realizes.
    ///
    /// For circulant embedding this is the inverse transform of the
    /// (clamped) eigenvalues, for Cholesky it is the first row of `L Lᵀ`.
    pub fn implied_autocovariance(&self) -> Vec<f64> {
        match &self.sampler {
            Sampler::Circulant { fft, scale } => {
                // Re(FFT(λ/m)) of a real even spectrum gives the circulant row
                let mut spec: Vec<Complex64> =
                    scale.iter().map(|s| Complex64::new(s * s, 0.0)).collect();
                fft.process(&mut spec);
                spec[..self.n].iter().map(|z| z.re).collect()
            }
            Sampler::Cholesky(l) => {
                let row0 = l.row(0);
                (0..self.n).map(|k| row0.dot(&l.row(k))).collect()
            }
        }
    }

    /// A path `β(i·dt)` built from one draw of increments.
    pub fn sample_path(&self, dt: f64, rng: &mut Rng) -> Vec<f64> {
        let scale = dt.powf(self.hurst.value());
        let mut values = Vec::with_capacity(self.n + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for dz in self.sample(rng) {
            acc += dz;
            values.push(acc * scale);
        }
        values
    }
}

/// Samples `β^H(i·dt)`, `i = 0..=n`, with the exact fBm covariance.
pub fn generate_fbm(
    hurst: HurstParam,
    n: usize,
    dt: f64,
    seed: u64,
    method: Method,
) -> Result<FbmPath> {
    ensure!(dt > 0.0 && dt.is_finite(), Domain, "dt must be positive, got {dt}");
    let synth = FgnSynthesizer::new(hurst, n, method)?;
    let values = synth.sample_path(dt, &mut rng_from_seed(seed));
    Ok(FbmPath { hurst, dt, values, seed, method: synth.method() })
}

/// Returns `s ↦ a^{−H} β(a s)` sampled on the same index set.
///
/// Sample `i` of the input sits at time `i·dt`, which is `i·dt/a` in the new
/// time variable; the values are multiplied by `a^{−H}`. By self-similarity
/// the result has the law of the original process.
pub fn rescale_selfsimilar(path: &FbmPath, a: f64) -> Result<FbmPath> {
    ensure!(a > 0.0 && a.is_finite(), Domain, "scale factor must be positive, got {a}");
    let factor = a.powf(-path.hurst.value());
    Ok(FbmPath {
        hurst: path.hurst,
        dt: path.dt / a,
        values: path.values.iter().map(|v| v * factor).collect(),
        seed: path.seed,
        method: path.method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{mean, variance};

    fn h(v: f64) -> HurstParam {
        HurstParam::new(v).unwrap()
    }

    #[test]
    fn circulant_reproduces_autocovariance() {
        for hv in [0.1, 0.25, 0.5, 0.75, 0.95] {
            for n in [1, 2, 7, 100, 1024] {
                let s = FgnSynthesizer::new(h(hv), n, Method::CirculantEmbedding).unwrap();
                assert_eq!(s.method(), Method::CirculantEmbedding);
                for (k, g) in s.implied_autocovariance().iter().enumerate() {
                    assert!((g - fgn_autocovariance(k, h(hv))).abs() < 1e-12, "H={hv} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn cholesky_reproduces_autocovariance() {
        for hv in [0.2, 0.5, 0.8] {
            let s = FgnSynthesizer::new(h(hv), 256, Method::Cholesky).unwrap();
            for (k, g) in s.implied_autocovariance().iter().enumerate() {
                assert!((g - fgn_autocovariance(k, h(hv))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn paths_start_at_zero_and_are_reproducible() {
        let a = generate_fbm(h(0.3), 100, 0.01, 9, Method::CirculantEmbedding).unwrap();
        let b = generate_fbm(h(0.3), 100, 0.01, 9, Method::CirculantEmbedding).unwrap();
        assert_eq!(a.values[0], 0.0);
        assert_eq!(a.values.len(), 101);
        assert_eq!(a, b);
        let c = generate_fbm(h(0.3), 100, 0.01, 10, Method::CirculantEmbedding).unwrap();
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(generate_fbm(h(0.3), 0, 0.01, 1, Method::Cholesky).is_err());
        assert!(generate_fbm(h(0.3), 10, 0.0, 1, Method::Cholesky).is_err());
        assert!(generate_fbm(h(0.3), 10, -1.0, 1, Method::Cholesky).is_err());
    }

    #[test]
    fn endpoint_variance_both_methods() {
        for method in [Method::CirculantEmbedding, Method::Cholesky] {
            let s = FgnSynthesizer::new(h(0.7), 64, method).unwrap();
            let mut rng = rng_from_seed(5);
            let ends: Vec<f64> =
                (0..4000).map(|_| *s.sample_path(1.0 / 64.0, &mut rng).last().unwrap()).collect();
            let v = variance(&ends);
            // SE of a Gaussian sample variance is sqrt(2/(n-1))
            assert!((v - 1.0).abs() < 4.0 * (2.0f64 / 3999.0).sqrt(), "{method:?} var {v}");
            assert!(mean(&ends).abs() < 0.07);
        }
    }

    #[test]
    fn rescale_identity_and_scaling() {
        let p = generate_fbm(h(0.4), 32, 0.5, 3, Method::CirculantEmbedding).unwrap();
        assert_eq!(rescale_selfsimilar(&p, 1.0).unwrap(), p);
        let r = rescale_selfsimilar(&p, 16.0).unwrap();
        assert_eq!(r.dt, 0.5 / 16.0);
        assert!((r.values[7] - p.values[7] * 16f64.powf(-0.4)).abs() < 1e-15);
        assert!(rescale_selfsimilar(&p, 0.0).is_err());
    }
}
