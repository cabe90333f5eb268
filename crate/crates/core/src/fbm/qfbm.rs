use rayon::prelude::*;

use super::{FbmPath, FgnSynthesizer, HurstParam, Method};
use crate::error::{ensure, Result};
use crate::rng::{mix_seed, rng_from_seed};

/// Eigenvalues of the noise covariance `Q`.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    /// `q_k = k^{−ρ}`, trace class for `ρ > 1`.
    PowerLaw(f64),
    Explicit(Vec<f64>),
}

impl Spectrum {
    pub fn weights(&self, modes: usize) -> Result<Vec<f64>> {
        match self {
            Spectrum::PowerLaw(rho) => {
                ensure!(
                    *rho > 1.0,
                    TraceClass,
                    "power-law spectrum k^-rho needs rho > 1 to be trace class, got rho = {rho}"
                );
                Ok((1..=modes).map(|k| (k as f64).powf(-rho)).collect())
            }
            Spectrum::Explicit(q) => {
                ensure!(
                    q.len() == modes,
                    Domain,
                    "explicit spectrum has {} entries for {modes} modes",
                    q.len()
                );
                ensure!(
                    q.iter().all(|v| *v >= 0.0 && v.is_finite()),
                    Domain,
                    "spectrum entries must be finite and nonnegative"
                );
                Ok(q.clone())
            }
        }
    }
}

/// Spatial profile attached to noise mode `n` (1-based) on `[0, 2π]`.
///
/// The basis is orthonormal in `L²(0, 2π)`: mode 1 is the constant
/// `1/√(2π)`, mode `2j` is `cos(jx)/√π` and mode `2j+1` is `sin(jx)/√π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealBasisMode {
    Constant,
    Cos(usize),
    Sin(usize),
}

impl RealBasisMode {
    /// Fourier wavenumber `|k|` of the mode.
    pub fn wavenumber(self) -> usize {
        match self {
            RealBasisMode::Constant => 0,
            RealBasisMode::Cos(j) | RealBasisMode::Sin(j) => j,
        }
    }
}

pub fn real_basis_mode(n: usize) -> RealBasisMode {
    assert!(n >= 1, "noise modes are numbered from 1");
    match n {
        1 => RealBasisMode::Constant,
        n if n % 2 == 0 => RealBasisMode::Cos(n / 2),
        n => RealBasisMode::Sin(n / 2),
    }
}

/// Truncated `W(t) = Σ_k √q_k β_k(t) e_k` with independent scalar fBms.
#[derive(Debug, Clone, PartialEq)]
pub struct QFbmField {
    pub hurst: HurstParam,
    pub dt: f64,
    pub eigenvalues_q: Vec<f64>,
    pub component_paths: Vec<FbmPath>,
    pub seed: u64,
}

impl QFbmField {
    /// The zero field on a grid, used for noise-free runs.
    pub fn zero(hurst: HurstParam, dt: f64, steps: usize, modes: usize) -> Self {
        let path = FbmPath {
            hurst,
            dt,
            values: vec![0.0; steps + 1],
            seed: 0,
            method: Method::CirculantEmbedding,
        };
        Self {
            hurst,
            dt,
            eigenvalues_q: vec![0.0; modes],
            component_paths: vec![path; modes],
            seed: 0,
        }
    }

    pub fn modes(&self) -> usize {
        self.eigenvalues_q.len()
    }

    pub fn steps(&self) -> usize {
        self.component_paths[0].steps()
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues_q.iter().sum()
    }

    /// `√q_k β_k(t_i)` for 0-based mode index `k`.
    #[inline]
    pub fn value(&self, k: usize, i: usize) -> f64 {
        self.eigenvalues_q[k].sqrt() * self.component_paths[k].values[i]
    }

    /// Every `factor`-th grid point. Subsampled fBm is exact fBm on the
    /// coarser grid, which is what grid-refinement studies need.
    pub fn subsample(&self, factor: usize) -> Result<QFbmField> {
        ensure!(
            factor >= 1 && self.steps() % factor == 0,
            Alignment,
            "cannot subsample {} steps by {factor}",
            self.steps()
        );
        let component_paths = self
            .component_paths
            .iter()
            .map(|p| FbmPath {
                dt: p.dt * factor as f64,
                values: p.values.iter().step_by(factor).copied().collect(),
                ..p.clone()
            })
            .collect();
        Ok(QFbmField { dt: self.dt * factor as f64, component_paths, ..self.clone() })
    }

    /// FNV-1a over the grid, the weights and every sample. Two objects with
    /// equal fingerprints are, for all practical purposes, the same noise.
    pub fn fingerprint(&self) -> u64 {
        const PRIME: u64 = 0x0000_0100_0000_01B3;
        let mut h: u64 = 0xCBF2_9CE4_8422_2325;
        let mut feed = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        feed(self.hurst.value().to_bits());
        feed(self.dt.to_bits());
        feed(self.seed);
        for (q, p) in self.eigenvalues_q.iter().zip(&self.component_paths) {
            feed(q.to_bits());
            for v in &p.values {
                feed(v.to_bits());
            }
        }
        h
    }
}

/// Samples a `modes`-term Q-fBm on `t_i = i·dt`, `i = 0..=n`. Mode `k`
/// (1-based) is driven by seed `mix_seed(seed, k)`, so adding modes leaves
/// the existing ones untouched.
pub fn generate_qfbm(
    hurst: HurstParam,
    modes: usize,
    spectrum: &Spectrum,
    n: usize,
    dt: f64,
    seed: u64,
) -> Result<QFbmField> {
    ensure!(modes >= 1, Domain, "Q-fBm needs at least one mode");
    ensure!(dt > 0.0 && dt.is_finite(), Domain, "dt must be positive, got {dt}");
    let q = spectrum.weights(modes)?;
    let synth = FgnSynthesizer::new(hurst, n, Method::CirculantEmbedding)?;
    let method = synth.method();
    let component_paths = (1..=modes as u64)
        .into_par_iter()
        .map(|k| {
            let sub = mix_seed(seed, k);
            let values = synth.sample_path(dt, &mut rng_from_seed(sub));
            FbmPath { hurst, dt, values, seed: sub, method }
        })
        .collect();
    Ok(QFbmField { hurst, dt, eigenvalues_q: q, component_paths, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::generate_fbm;
    use std::f64::consts::PI;

    fn h(v: f64) -> HurstParam {
        HurstParam::new(v).unwrap()
    }

    #[test]
    fn trace_class_check() {
        assert!(matches!(
            Spectrum::PowerLaw(1.0).weights(4),
            Err(crate::error::Error::TraceClass(_))
        ));
        assert!(Spectrum::Explicit(vec![1.0, -0.1]).weights(2).is_err());
        assert!(Spectrum::Explicit(vec![1.0]).weights(2).is_err());
    }

    #[test]
    fn truncated_trace_bounds() {
        let q = Spectrum::PowerLaw(2.0).weights(64).unwrap();
        let tr: f64 = q.iter().sum();
        assert!(tr <= PI * PI / 6.0 && tr >= PI * PI / 6.0 - 1.0 / 64.0);
    }

    #[test]
    fn single_mode_matches_scalar_generator() {
        let f = generate_qfbm(h(0.6), 1, &Spectrum::Explicit(vec![1.0]), 50, 0.1, 77).unwrap();
        let p = generate_fbm(h(0.6), 50, 0.1, mix_seed(77, 1), Method::CirculantEmbedding).unwrap();
        assert_eq!(f.component_paths[0], p);
        assert_eq!(f.value(0, 10), p.values[10]);
    }

    #[test]
    fn modes_are_stable_under_extension() {
        let a = generate_qfbm(h(0.4), 3, &Spectrum::PowerLaw(2.0), 20, 0.1, 1).unwrap();
        let b = generate_qfbm(h(0.4), 5, &Spectrum::PowerLaw(2.0), 20, 0.1, 1).unwrap();
        assert_eq!(a.component_paths[..], b.component_paths[..3]);
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
    }

    #[test]
    fn basis_numbering() {
        assert_eq!(real_basis_mode(1), RealBasisMode::Constant);
        assert_eq!(real_basis_mode(2), RealBasisMode::Cos(1));
        assert_eq!(real_basis_mode(3), RealBasisMode::Sin(1));
        assert_eq!(real_basis_mode(6), RealBasisMode::Cos(3));
        assert_eq!(real_basis_mode(7).wavenumber(), 3);
    }

    #[test]
    fn subsampling() {
        let f = generate_qfbm(h(0.4), 2, &Spectrum::PowerLaw(2.0), 8, 0.1, 1).unwrap();
        let g = f.subsample(4).unwrap();
        assert_eq!(g.steps(), 2);
        assert!((g.dt - 0.4).abs() < 1e-15);
        assert_eq!(g.value(1, 2), f.value(1, 8));
        assert!(f.subsample(3).is_err());
    }

    #[test]
    fn zero_field() {
        let z = QFbmField::zero(h(0.5), 0.1, 10, 4);
        assert_eq!(z.steps(), 10);
        assert_eq!(z.trace(), 0.0);
        assert_eq!(z.value(3, 10), 0.0);
    }
}
