use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::gamma::gamma_exponent;
use crate::amplitude::approximate;
use crate::error::{ensure, Error, Result};
use crate::fbm::{HurstParam, Spectrum};
use crate::numerics::{linear_fit, median, quantile};
use crate::rng::mix_seed;
use crate::spde::{
    aligned_dt, default_dt_fast, default_stride, fast_steps, generate_noise, solve_spde, SpdeRun,
};
use crate::spectral::{Field, Preset, SpectralSystem};

/// `max_j ‖u(t_j) − ψ(t_j)‖` over the stored snapshots of `run`.
///
/// Fails unless `psi` was built on the run's own noise (same fingerprint)
/// and on the same snapshot grid.
pub fn pathwise_error(run: &SpdeRun, psi: &[Field], noise_fingerprint: u64) -> Result<f64> {
    ensure!(
        noise_fingerprint == run.noise.fingerprint(),
        Precondition,
        "approximation and run are driven by different noise paths"
    );
    ensure!(
        run.trajectory.len() <= psi.len(),
        Alignment,
        "approximation has {} snapshots, the run {}",
        psi.len(),
        run.trajectory.len()
    );
    Ok(sup_distance(&run.trajectory, psi))
}

pub fn sup_distance(a: &[Field], b: &[Field]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dist(y)).fold(0.0, f64::max)
}

/// Setup of an `ε` sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub preset: Preset,
    pub modes: usize,
    pub nu: f64,
    pub hurst: HurstParam,
    /// Strictly decreasing.
    pub eps_grid: Vec<f64>,
    pub replicas: usize,
    pub t0: f64,
    /// Fast step; `None` uses [`default_dt_fast`]. Either way the step is
    /// shrunk to divide the fast horizon.
    pub dt_fast: Option<f64>,
    pub noise_modes: usize,
    pub spectrum: Spectrum,
    /// `u0 = ε a0 e` with `e` the lowest kernel mode, `P_s u0 = 0`.
    pub a0: f64,
    pub seed_base: u64,
}

impl ScalingConfig {
    pub fn desk_default(preset: Preset, hurst: HurstParam) -> Self {
        Self {
            preset,
            modes: 32,
            nu: 1.0,
            hurst,
            eps_grid: vec![0.2, 0.141, 0.1, 0.071, 0.05],
            replicas: 100,
            t0: 1.0,
            dt_fast: None,
            noise_modes: 32,
            spectrum: Spectrum::PowerLaw(2.0),
            a0: 1.0,
            seed_base: 0,
        }
    }

    pub fn system(&self) -> Result<SpectralSystem> {
        SpectralSystem::new(self.preset, self.modes, self.nu)
    }

    pub fn dt_for(&self, eps: f64) -> f64 {
        let target = self.dt_fast.unwrap_or_else(|| default_dt_fast(eps, self.t0));
        aligned_dt(eps, self.t0, target)
    }

    /// Seed of replica `r`, shared by all `ε` so that the sweep compares
    /// like with like.
    pub fn replica_seed(&self, r: usize) -> u64 {
        mix_seed(self.seed_base, r as u64)
    }

    fn validate(&self) -> Result<()> {
        ensure!(self.eps_grid.len() >= 2, Config, "need at least two eps values");
        ensure!(
            self.eps_grid.windows(2).all(|w| w[1] < w[0]) && self.eps_grid.iter().all(|e| *e > 0.0),
            Config,
            "eps grid must be positive and strictly decreasing"
        );
        ensure!(self.replicas >= 1, Config, "need at least one replica");
        Ok(())
    }
}

/// Errors of one replica at one `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicaError {
    /// `sup ‖u − ψ‖`.
    pub full: f64,
    /// `sup ‖u − ε a(ε²·)‖`.
    pub first_order: f64,
}

/// `None` when the run or the amplitude equation hit the blow-up guard.
pub fn replica_error(
    sys: &SpectralSystem,
    cfg: &ScalingConfig,
    eps: f64,
    r: usize,
) -> Result<Option<ReplicaError>> {
    let dt = cfg.dt_for(eps);
    let steps = fast_steps(eps, cfg.t0, dt)?;
    let noise = generate_noise(
        sys,
        cfg.hurst,
        cfg.noise_modes,
        &cfg.spectrum,
        steps,
        dt,
        cfg.replica_seed(r),
    )?;
    let mut u0 = sys.zero_field();
    u0.set(cfg.preset.kernel_top() as i64, Complex64::new(eps * cfg.a0, 0.0));
    let run = solve_spde(sys, eps, cfg.t0, &u0, Arc::new(noise), default_stride(steps))?;
    if run.blow_up.is_some() {
        return Ok(None);
    }
    let approx = approximate(&run, 1)?;
    if approx.amplitude.blow_up.is_some() {
        return Ok(None);
    }
    let full = pathwise_error(&run, &approx.psi, approx.noise_fingerprint)?;
    let first_order = sup_distance(&run.trajectory, &approx.first_order(sys, eps));
    Ok(Some(ReplicaError { full, first_order }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub eps: f64,
    pub median_err: f64,
    pub q10: f64,
    pub q90: f64,
    pub first_order_median: f64,
    /// Fraction of replicas with `full ≤ first_order`.
    pub gain_fraction: f64,
    pub replicas: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub hurst: HurstParam,
    pub preset: Preset,
    pub rows: Vec<ScalingRow>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub first_order_slope: f64,
    pub gamma_theory: f64,
    /// Medians decrease along the grid.
    pub monotone: bool,
    /// At most 5% of the replicas were excluded at every `ε`.
    pub valid: bool,
    pub pass: bool,
    pub seed_base: u64,
}

/// Slope band: `|slope − γ| ≤ 0.5` for `H ≥ ½`, `slope ≥ 1 + 2H − 0.3`
/// below.
pub fn slope_acceptable(hurst: HurstParam, slope: f64) -> bool {
    let h = hurst.value();
    if h >= 0.5 {
        (slope - gamma_exponent(hurst).gamma).abs() <= 0.5
    } else {
        slope >= 1.0 + 2.0 * h - 0.3
    }
}

pub fn scaling_study(cfg: &ScalingConfig) -> Result<ScalingReport> {
    cfg.validate()?;
    let sys = cfg.system()?;
    let mut rows = Vec::with_capacity(cfg.eps_grid.len());
    for &eps in &cfg.eps_grid {
        let results = (0..cfg.replicas)
            .into_par_iter()
            .map(|r| replica_error(&sys, cfg, eps, r))
            .collect::<Result<Vec<_>>>()?;
        let ok: Vec<ReplicaError> = results.iter().flatten().copied().collect();
        let excluded = cfg.replicas - ok.len();
        if ok.is_empty() {
            return Err(Error::Precondition(format!("every replica blew up at eps = {eps}")));
        }
        let full: Vec<f64> = ok.iter().map(|e| e.full).collect();
        let first: Vec<f64> = ok.iter().map(|e| e.first_order).collect();
        rows.push(ScalingRow {
            eps,
            median_err: median(&full),
            q10: quantile(&full, 0.1),
            q90: quantile(&full, 0.9),
            first_order_median: median(&first),
            gain_fraction: ok.iter().filter(|e| e.full <= e.first_order).count() as f64
                / ok.len() as f64,
            replicas: cfg.replicas,
            excluded,
        });
    }
    let log_eps: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
    let fit = linear_fit(&log_eps, &rows.iter().map(|r| r.median_err.ln()).collect::<Vec<_>>());
    let first =
        linear_fit(&log_eps, &rows.iter().map(|r| r.first_order_median.ln()).collect::<Vec<_>>());
    let valid = rows.iter().all(|r| r.excluded as f64 <= 0.05 * r.replicas as f64);
    let monotone = rows.windows(2).all(|w| w[1].median_err < w[0].median_err);
    Ok(ScalingReport {
        hurst: cfg.hurst,
        preset: cfg.preset,
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        first_order_slope: first.slope,
        gamma_theory: gamma_exponent(cfg.hurst).gamma,
        monotone,
        valid,
        pass: valid && slope_acceptable(cfg.hurst, fit.slope),
        seed_base: cfg.seed_base,
        rows,
    })
}

impl ScalingReport {
    /// `H,eps,median_err,q10,q90,replicas,excluded`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "H,eps,median_err,q10,q90,replicas,excluded")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.hurst.value(),
                r.eps,
                r.median_err,
                r.q10,
                r.q90,
                r.replicas,
                r.excluded
            )?;
        }
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "slope={}", self.slope)?;
        writeln!(w, "slope_stderr={}", self.slope_stderr)?;
        writeln!(w, "gamma_theory={}", self.gamma_theory)?;
        writeln!(w, "first_order_slope={}", self.first_order_slope)?;
        writeln!(w, "monotone={}", self.monotone)?;
        writeln!(w, "valid={}", self.valid)?;
        writeln!(w, "pass={}", self.pass)?;
        Ok(())
    }
}
