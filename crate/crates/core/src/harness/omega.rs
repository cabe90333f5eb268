use std::io::Write;

use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::fbm::{HurstParam, QFbmField, Spectrum};
use crate::holder::{holder_norm, SampledFunction};
use crate::rng::mix_seed;
use crate::spde::{aligned_dt, fast_steps, generate_noise, stochastic_convolution};
use crate::spectral::{Field, Preset, SpectralSystem};

/// Hölder exponent of the noise condition: `H − κ` up to `½`, the midpoint
/// of `(½, H)` above.
pub fn omega_beta(hurst: HurstParam, kappa: f64) -> f64 {
    let h = hurst.value();
    if h <= 0.5 {
        h - kappa
    } else {
        (0.5 + h) / 2.0
    }
}

/// The four quantities tested by the event and their thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSample {
    /// `sup_t ‖P_s W_L(t)‖`, `‖W(ε^{−2}·)‖_{C^β}`, `‖ψ_s(0)‖`, `‖ψ_c(0)‖`.
    pub values: [f64; 4],
    /// `ε^{−κ}`, `ε^{−2H−κ}`, `ε^{−κ}`, `ε^{−κ}`.
    pub thresholds: [f64; 4],
}

impl OmegaSample {
    pub fn holds(&self, k: usize) -> bool {
        self.values[k] <= self.thresholds[k]
    }

    pub fn all(&self) -> bool {
        (0..4).all(|k| self.holds(k))
    }
}

/// Evaluates the event on one noise path with initial value `u0`, split as
/// `u0 = εψ_c(0) + ε^{2H+1}ψ_s(0)`.
///
/// `noise` lives on the fast grid `[0, T0 ε^{−2}]`.
pub fn omega_sample(
    sys: &SpectralSystem,
    noise: &QFbmField,
    u0: &Field,
    eps: f64,
    kappa: f64,
    beta: f64,
) -> Result<OmegaSample> {
    ensure!(eps > 0.0, Domain, "eps must be positive");
    ensure!(kappa >= 0.0, Domain, "kappa must be nonnegative");
    let h = noise.hurst.value();
    let wl = stochastic_convolution(sys, noise, 1)?;
    let sup_wl = wl.iter().map(|w| sys.project_s(w).norm()).fold(0.0, f64::max);

    let k = noise.modes();
    let mut data = Vec::with_capacity((noise.steps() + 1) * k);
    for i in 0..=noise.steps() {
        data.extend((0..k).map(|m| noise.value(m, i)));
    }
    let slow = SampledFunction::new(eps * eps * noise.dt, k, data)?;
    let w_norm = holder_norm(&slow, beta)?;

    let psi_s0 = sys.project_s(u0).norm() / eps.powf(2.0 * h + 1.0);
    let psi_c0 = sys.project_c(u0).norm() / eps;
    let bound = eps.powf(-kappa);
    Ok(OmegaSample {
        values: [sup_wl, w_norm, psi_s0, psi_c0],
        thresholds: [bound, eps.powf(-2.0 * h - kappa), bound, bound],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaConfig {
    pub preset: Preset,
    pub modes: usize,
    pub nu: f64,
    pub hurst: HurstParam,
    pub eps: f64,
    pub kappa: f64,
    pub t0: f64,
    pub dt_fast: f64,
    pub noise_modes: usize,
    pub spectrum: Spectrum,
    /// `u0 = ε a0 e` on the lowest kernel mode.
    pub a0: f64,
    pub replicas: usize,
    pub seed_base: u64,
}

/// Noise scale of the desk monitor: `q_k = s k^{−2}`.
///
/// With `s = 1` the Hölder norm of a unit Q-fBm on `[0, 1]` is of order one,
/// while the event asks for at most `ε^{−κ} ≈ 1.12` at `ε = 0.1`.
pub const OMEGA_NOISE_SCALE: f64 = 0.02;

impl OmegaConfig {
    pub fn desk_default(hurst: HurstParam, eps: f64) -> Self {
        let noise_modes = 32;
        Self {
            preset: Preset::LaplacianPeriodic,
            modes: 32,
            nu: 1.0,
            hurst,
            eps,
            kappa: 0.05,
            t0: 1.0,
            dt_fast: 0.01,
            noise_modes,
            spectrum: Spectrum::Explicit(
                (1..=noise_modes).map(|k| OMEGA_NOISE_SCALE / (k * k) as f64).collect(),
            ),
            a0: 1.0,
            replicas: 200,
            seed_base: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaReport {
    pub eps: f64,
    pub kappa: f64,
    pub beta: f64,
    pub samples: Vec<OmegaSample>,
}

impl OmegaReport {
    /// Empirical probability of condition `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        self.samples.iter().filter(|s| s.holds(k)).count() as f64 / self.samples.len() as f64
    }

    /// Empirical probability of the whole event.
    pub fn frequency_all(&self) -> f64 {
        self.samples.iter().filter(|s| s.all()).count() as f64 / self.samples.len() as f64
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "replica,sup_pswl,holder_w,psi_s0,psi_c0,all")?;
        for (r, s) in self.samples.iter().enumerate() {
            let v = s.values;
            writeln!(w, "{r},{},{},{},{},{}", v[0], v[1], v[2], v[3], s.all() as u8)?;
        }
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "eps={}", self.eps)?;
        writeln!(w, "kappa={}", self.kappa)?;
        writeln!(w, "beta={}", self.beta)?;
        for k in 0..4 {
            writeln!(w, "frequency_{}={}", k + 1, self.frequency(k))?;
        }
        writeln!(w, "frequency_all={}", self.frequency_all())?;
        Ok(())
    }
}

pub fn omega_event_monitor(cfg: &OmegaConfig) -> Result<OmegaReport> {
    ensure!(cfg.replicas >= 1, Config, "need at least one replica");
    let sys = SpectralSystem::new(cfg.preset, cfg.modes, cfg.nu)?;
    let dt = aligned_dt(cfg.eps, cfg.t0, cfg.dt_fast);
    let steps = fast_steps(cfg.eps, cfg.t0, dt)?;
    let beta = omega_beta(cfg.hurst, cfg.kappa);
    let mut u0 = sys.zero_field();
    u0.set(cfg.preset.kernel_top() as i64, (cfg.eps * cfg.a0).into());
    let samples = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            let noise = generate_noise(
                &sys,
                cfg.hurst,
                cfg.noise_modes,
                &cfg.spectrum,
                steps,
                dt,
                mix_seed(cfg.seed_base, r as u64),
            )?;
            omega_sample(&sys, &noise, &u0, cfg.eps, cfg.kappa, beta)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OmegaReport { eps: cfg.eps, kappa: cfg.kappa, beta, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: f64) -> HurstParam {
        HurstParam::new(v).unwrap()
    }

    #[test]
    fn beta_rule() {
        assert!((omega_beta(h(0.3), 0.05) - 0.25).abs() < 1e-15);
        assert!((omega_beta(h(0.5), 0.05) - 0.45).abs() < 1e-15);
        assert!((omega_beta(h(0.7), 0.05) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn zero_noise_satisfies_every_condition() {
        let sys = SpectralSystem::new(Preset::LaplacianPeriodic, 8, 1.0).unwrap();
        let noise = QFbmField::zero(h(0.5), 0.01, 400, 8);
        let mut u0 = sys.zero_field();
        u0.set(0, 0.2.into());
        let s = omega_sample(&sys, &noise, &u0, 0.2, 0.05, 0.45).unwrap();
        assert_eq!(s.values[0], 0.0);
        assert_eq!(s.values[1], 0.0);
        assert_eq!(s.values[2], 0.0);
        assert!((s.values[3] - 1.0).abs() < 1e-12);
        assert!(s.all());
    }

    #[test]
    fn large_initial_stable_part_violates() {
        let sys = SpectralSystem::new(Preset::LaplacianPeriodic, 8, 1.0).unwrap();
        let noise = QFbmField::zero(h(0.5), 0.01, 100, 8);
        let mut u0 = sys.zero_field();
        u0.set(3, 0.1.into());
        let s = omega_sample(&sys, &noise, &u0, 0.1, 0.05, 0.45).unwrap();
        assert!(!s.holds(2));
        assert!(s.holds(3));
    }
}
