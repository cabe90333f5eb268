//! Exponential Euler for `du = (Lu + ε²Au + F(u)) dt + ε^{2H+1} dW` on a
//! Fourier truncation, driven by an explicit Q-fBm path.

use std::io::Write;
use std::sync::Arc;

use crate::error::{ensure, Result};
use crate::fbm::{generate_qfbm, HurstParam, QFbmField, Spectrum};
use crate::spectral::{Field, SpectralSystem};

/// Norm beyond which a run is declared blown up.
pub const BLOW_UP_NORM: f64 = 1e6;

/// Upper bound on stored snapshots per run.
pub const MAX_SNAPSHOTS: usize = 1 << 14;

/// `min(0.01, T0 ε^{−2} / 2^12)`: at most 0.01 and at least 4096 steps
/// over the fast horizon.
pub fn default_dt_fast(eps: f64, t0: f64) -> f64 {
    (t0 / (eps * eps) / 4096.0).min(0.01)
}

/// Smallest stride keeping the snapshot count (including `t = 0`) within
/// [`MAX_SNAPSHOTS`].
pub fn default_stride(steps: usize) -> usize {
    steps.div_ceil(MAX_SNAPSHOTS - 1).max(1)
}

/// Number of fast steps covering `[0, T0 ε^{−2}]`; the horizon has to be an
/// integer multiple of `dt` (relative tolerance `1e−9`).
pub fn fast_steps(eps: f64, t0: f64, dt: f64) -> Result<usize> {
    ensure!(eps > 0.0 && eps.is_finite(), Domain, "eps must be positive, got {eps}");
    ensure!(t0 > 0.0 && t0.is_finite(), Domain, "T0 must be positive, got {t0}");
    ensure!(dt > 0.0 && dt.is_finite(), Domain, "dt_fast must be positive, got {dt}");
    let ratio = t0 / (eps * eps) / dt;
    let steps = ratio.round();
    ensure!(
        steps >= 1.0 && (ratio - steps).abs() <= 1e-9 * ratio.max(1.0),
        Alignment,
        "fast horizon T0/eps^2 = {} is not a multiple of dt_fast = {dt}",
        t0 / (eps * eps)
    );
    Ok(steps as usize)
}

/// Largest `dt ≤ target` that divides the fast horizon.
pub fn aligned_dt(eps: f64, t0: f64, target: f64) -> f64 {
    let horizon = t0 / (eps * eps);
    horizon / (horizon / target).ceil()
}

/// Noise on the fast grid, checked against the truncation.
pub fn generate_noise(
    sys: &SpectralSystem,
    hurst: HurstParam,
    noise_modes: usize,
    spectrum: &Spectrum,
    steps: usize,
    dt: f64,
    seed: u64,
) -> Result<QFbmField> {
    ensure!(
        noise_modes <= 2 * sys.modes + 1,
        Domain,
        "{noise_modes} noise modes exceed the 2N+1 = {} available real modes",
        2 * sys.modes + 1
    );
    generate_qfbm(hurst, noise_modes, spectrum, steps, dt, seed)
}

/// `W(t_i)` and its increments as fields of a fixed truncation.
#[derive(Debug, Clone)]
pub struct NoiseFields<'a> {
    noise: &'a QFbmField,
    n: usize,
    coords: Vec<f64>,
}

impl<'a> NoiseFields<'a> {
    pub fn new(noise: &'a QFbmField, n: usize) -> Result<Self> {
        ensure!(
            noise.modes() <= 2 * n + 1,
            Domain,
            "{} noise modes exceed the 2N+1 = {} available real modes",
            noise.modes(),
            2 * n + 1
        );
        Ok(Self { noise, n, coords: vec![0.0; noise.modes()] })
    }

    pub fn value(&mut self, i: usize) -> Field {
        for (k, c) in self.coords.iter_mut().enumerate() {
            *c = self.noise.value(k, i);
        }
        Field::from_real_coords(self.n, &self.coords).expect("checked at construction")
    }

    /// `W(t_{m+1}) − W(t_m)`.
    pub fn increment(&mut self, m: usize) -> Field {
        for (k, c) in self.coords.iter_mut().enumerate() {
            *c = self.noise.value(k, m + 1) - self.noise.value(k, m);
        }
        Field::from_real_coords(self.n, &self.coords).expect("checked at construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowUp {
    pub step: usize,
    pub time: f64,
    pub norm: f64,
}

/// A finished (or truncated) integration.
#[derive(Debug, Clone)]
pub struct SpdeRun {
    pub sys: SpectralSystem,
    pub hurst: HurstParam,
    pub eps: f64,
    pub t0: f64,
    pub dt_fast: f64,
    pub noise: Arc<QFbmField>,
    pub u0: Field,
    /// `u(t_{j·stride})`, starting with `u0`.
    pub trajectory: Vec<Field>,
    pub stride: usize,
    pub seed: u64,
    pub blow_up: Option<BlowUp>,
}

impl SpdeRun {
    pub fn snapshot_time(&self, j: usize) -> f64 {
        (j * self.stride) as f64 * self.dt_fast
    }

    pub fn steps(&self) -> usize {
        self.noise.steps()
    }

    /// Binary store: magic `AEQT`, `H: f64`, snapshot spacing `f64`,
    /// snapshot count `u64`, seed `u64`, truncation `N: u64`, then per
    /// snapshot the time and `2N+1` `(re, im)` pairs, all little endian.
    pub fn write_trajectory<W: Write>(&self, w: W) -> Result<()> {
        write_field_series(
            w,
            self.hurst.value(),
            self.dt_fast * self.stride as f64,
            self.seed,
            &self.trajectory,
        )
    }
}

/// Shared writer for field time series (see [`SpdeRun::write_trajectory`]).
pub fn write_field_series<W: Write>(
    mut w: W,
    hurst: f64,
    spacing: f64,
    seed: u64,
    series: &[Field],
) -> Result<()> {
    let n = series.first().map_or(0, Field::modes);
    w.write_all(b"AEQT")?;
    w.write_all(&hurst.to_le_bytes())?;
    w.write_all(&spacing.to_le_bytes())?;
    w.write_all(&(series.len() as u64).to_le_bytes())?;
    w.write_all(&seed.to_le_bytes())?;
    w.write_all(&(n as u64).to_le_bytes())?;
    for (j, f) in series.iter().enumerate() {
        w.write_all(&(j as f64 * spacing).to_le_bytes())?;
        for z in f.coeffs() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Integrates on the grid of `noise` (`dt_fast = noise.dt`), which must
/// cover exactly `[0, T0 ε^{−2}]`.
///
/// Step: `u ← e^{dt L}[u + dt(ε² A u + F(u)) + ε^{2H+1} ΔW]`.
pub fn solve_spde(
    sys: &SpectralSystem,
    eps: f64,
    t0: f64,
    u0: &Field,
    noise: Arc<QFbmField>,
    stride: usize,
) -> Result<SpdeRun> {
    ensure!(eps >= 0.0 && eps.is_finite(), Domain, "eps must be nonnegative, got {eps}");
    ensure!(stride >= 1, Domain, "stride must be at least 1");
    ensure!(u0.modes() == sys.modes, Domain, "u0 truncation differs from the system");
    let dt = noise.dt;
    let steps = noise.steps();
    if eps > 0.0 {
        let expected = fast_steps(eps, t0, dt)?;
        ensure!(
            expected == steps,
            Alignment,
            "noise has {steps} steps, the horizon needs {expected}"
        );
    }
    let hurst = noise.hurst;
    let amp = eps.powf(2.0 * hurst.value() + 1.0);
    let eps2 = eps * eps;
    let decay = sys.decay_factors(dt);
    let mut inc = NoiseFields::new(&noise, sys.modes)?;
    let mut cubic = sys.cubic();

    let mut u = u0.clone();
    let mut f = sys.zero_field();
    let mut trajectory = Vec::with_capacity(steps / stride + 1);
    trajectory.push(u.clone());
    let mut blow_up = None;
    for m in 0..steps {
        cubic.cube_into(&u, &mut f);
        let au = sys.apply_a(&u);
        u.axpy(dt * eps2, &au);
        u.axpy(dt, &f);
        if amp != 0.0 {
            u.axpy(amp, &inc.increment(m));
        }
        sys.apply_diag(&mut u, &decay);
        let norm = u.norm();
        if !(norm <= BLOW_UP_NORM) {
            blow_up = Some(BlowUp { step: m + 1, time: (m + 1) as f64 * dt, norm });
            break;
        }
        if (m + 1) % stride == 0 {
            trajectory.push(u.clone());
        }
    }
    Ok(SpdeRun {
        sys: sys.clone(),
        hurst,
        eps,
        t0,
        dt_fast: dt,
        u0: u0.clone(),
        trajectory,
        stride,
        seed: noise.seed,
        noise,
        blow_up,
    })
}

/// Parameters of a self-contained run (noise generated from `seed`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpdeParams {
    pub hurst: HurstParam,
    pub eps: f64,
    pub t0: f64,
    pub dt_fast: f64,
    pub seed: u64,
    pub stride: usize,
    pub noise_modes: usize,
    pub spectrum: Spectrum,
}

/// Generates the noise from the parameters and integrates.
pub fn solve_spde_seeded(sys: &SpectralSystem, p: &SpdeParams, u0: &Field) -> Result<SpdeRun> {
    let steps = fast_steps(p.eps, p.t0, p.dt_fast)?;
    let noise =
        generate_noise(sys, p.hurst, p.noise_modes, &p.spectrum, steps, p.dt_fast, p.seed)?;
    solve_spde(sys, p.eps, p.t0, u0, Arc::new(noise), p.stride)
}

/// `W_L(t_{j·stride})` by `W_L(t_{m+1}) = e^{dt L}(W_L(t_m) + ΔW_m)`.
pub fn stochastic_convolution(
    sys: &SpectralSystem,
    noise: &QFbmField,
    stride: usize,
) -> Result<Vec<Field>> {
    ensure!(stride >= 1, Domain, "stride must be at least 1");
    let decay = sys.decay_factors(noise.dt);
    let mut inc = NoiseFields::new(noise, sys.modes)?;
    let mut w = sys.zero_field();
    let mut out = vec![w.clone()];
    for m in 0..noise.steps() {
        w.axpy(1.0, &inc.increment(m));
        sys.apply_diag(&mut w, &decay);
        if (m + 1) % stride == 0 {
            out.push(w.clone());
        }
    }
    Ok(out)
}
