//! The reduced model: the amplitude equation on the kernel `N`, the
//! fractional Ornstein–Uhlenbeck process on `S`, and their combination
//! `ψ(t) = ε a(ε² t) + ε^{2H+1} ψ_s(t)`, all on the noise of a full run.

use crate::error::{ensure, Result};
use crate::fbm::{HurstParam, QFbmField};
use crate::spde::{NoiseFields, SpdeRun, BLOW_UP_NORM};
use crate::spectral::{CubicProduct, Field, SpectralSystem};

/// Tolerance of the substep-halving drift integrator.
pub const DRIFT_TOL: f64 = 1e-8;

/// `a(T_j)`, `T_j = j·dT`, as kernel-truncation fields (see
/// [`SpectralSystem::to_kernel`]), with the driving `b(T_j)`.
#[derive(Debug, Clone)]
pub struct AmplitudePath {
    pub values: Vec<Field>,
    pub d_t: f64,
    pub b_path: Vec<Field>,
    /// Slow time at which `‖a‖` exceeded the guard, if it did.
    pub blow_up: Option<f64>,
}

impl AmplitudePath {
    /// Linear interpolation at slow time `t`, clamped to the grid.
    pub fn at(&self, t: f64) -> Field {
        let x = (t / self.d_t).max(0.0);
        let j = (x.floor() as usize).min(self.values.len() - 1);
        let w = x - j as f64;
        if j + 1 >= self.values.len() || w <= 0.0 {
            return self.values[j].clone();
        }
        let mut f = self.values[j].scaled(1.0 - w);
        f.axpy(w, &self.values[j + 1]);
        f
    }
}

/// `ψ_s(t_{j·stride})`.
#[derive(Debug, Clone)]
pub struct FouPath {
    pub values: Vec<Field>,
    pub psi_s0: Field,
    pub stride: usize,
    pub dt_fast: f64,
}

/// Ratio `dT ε^{−2} / dt_fast`, required to be a positive integer.
pub fn slow_ratio(eps: f64, d_t: f64, dt_fast: f64) -> Result<usize> {
    let r = d_t / (eps * eps) / dt_fast;
    let ri = r.round();
    ensure!(
        ri >= 1.0 && (r - ri).abs() <= 1e-9 * r,
        Alignment,
        "dT/eps^2 = {} is not an integer multiple of dt_fast = {dt_fast}",
        d_t / (eps * eps)
    );
    Ok(ri as usize)
}

/// `b(T_j) = ε^{2H} P_c W(T_j ε^{−2})` for `T_j = j·dT ≤ T0`.
pub fn rescaled_noise_b(
    sys: &SpectralSystem,
    noise: &QFbmField,
    eps: f64,
    d_t: f64,
    t0: f64,
) -> Result<Vec<Field>> {
    let r = slow_ratio(eps, d_t, noise.dt)?;
    let slow = (t0 / d_t).round() as usize;
    ensure!(
        (t0 / d_t - slow as f64).abs() <= 1e-9 * slow as f64,
        Alignment,
        "T0 = {t0} is not a multiple of dT = {d_t}"
    );
    ensure!(
        slow * r <= noise.steps(),
        Alignment,
        "noise covers {} fast steps, the slow grid needs {}",
        noise.steps(),
        slow * r
    );
    let scale = eps.powf(2.0 * noise.hurst.value());
    let mut nf = NoiseFields::new(noise, sys.modes)?;
    Ok((0..=slow).map(|j| sys.to_kernel(&nf.value(j * r)).scaled(scale)).collect())
}

struct Drift<'a> {
    sys: &'a SpectralSystem,
    cubic: CubicProduct,
}

impl Drift<'_> {
    fn eval(&mut self, a: &Field) -> Field {
        let mut g = self.sys.kernel_a(a);
        g.axpy(1.0, &self.sys.kernel_cube(&mut self.cubic, a));
        g
    }

    fn rk4(&mut self, a: &Field, h: f64, substeps: usize) -> Field {
        let dt = h / substeps as f64;
        let mut y = a.clone();
        for _ in 0..substeps {
            let k1 = self.eval(&y);
            let k2 = self.eval(&y.add(&k1.scaled(0.5 * dt)));
            let k3 = self.eval(&y.add(&k2.scaled(0.5 * dt)));
            let k4 = self.eval(&y.add(&k3.scaled(dt)));
            y.axpy(dt / 6.0, &k1);
            y.axpy(dt / 3.0, &k2);
            y.axpy(dt / 3.0, &k3);
            y.axpy(dt / 6.0, &k4);
        }
        y
    }

    /// Flow of `ȧ = A_c a + F_c(a)` over `h`, halving the substep until two
    /// successive results agree to [`DRIFT_TOL`].
    fn flow(&mut self, a: &Field, h: f64) -> Field {
        let mut m = 1;
        let mut coarse = self.rk4(a, h, m);
        loop {
            m *= 2;
            let fine = self.rk4(a, h, m);
            if fine.dist(&coarse) < DRIFT_TOL * a.norm().max(1.0) || m >= 1 << 16 {
                return fine;
            }
            coarse = fine;
        }
    }
}

/// `a_{j+1} = Φ_{dT}(a_j) + b_{j+1} − b_j`, with `Φ` the drift flow.
pub fn solve_amplitude(
    sys: &SpectralSystem,
    b: &[Field],
    a0: &Field,
    d_t: f64,
) -> Result<AmplitudePath> {
    ensure!(d_t > 0.0 && d_t.is_finite(), Domain, "dT must be positive, got {d_t}");
    ensure!(!b.is_empty(), Domain, "empty driving sequence");
    let top = sys.preset.kernel_top();
    ensure!(
        a0.modes() == top && b.iter().all(|f| f.modes() == top),
        Domain,
        "amplitude fields must use the kernel truncation"
    );
    let mut drift = Drift { sys, cubic: sys.kernel_cubic() };
    let mut a = a0.clone();
    let mut values = Vec::with_capacity(b.len());
    values.push(a.clone());
    let mut blow_up = None;
    for j in 0..b.len() - 1 {
        a = drift.flow(&a, d_t);
        a.axpy(1.0, &b[j + 1]);
        a.axpy(-1.0, &b[j]);
        if !(a.norm() <= BLOW_UP_NORM) {
            blow_up = Some((j + 1) as f64 * d_t);
            break;
        }
        values.push(a.clone());
    }
    Ok(AmplitudePath { values, d_t, b_path: b.to_vec(), blow_up })
}

/// `ψ_s(t_m) = e^{t_m L} ψ_s0 + P_s W_L(t_m)` at every `stride`-th step.
pub fn solve_fou(
    sys: &SpectralSystem,
    noise: &QFbmField,
    psi_s0: &Field,
    stride: usize,
) -> Result<FouPath> {
    ensure!(stride >= 1, Domain, "stride must be at least 1");
    let decay = sys.decay_factors(noise.dt);
    let mut nf = NoiseFields::new(noise, sys.modes)?;
    let mut psi = sys.project_s(psi_s0);
    let mut values = vec![psi.clone()];
    for m in 0..noise.steps() {
        psi.axpy(1.0, &sys.project_s(&nf.increment(m)));
        sys.apply_diag(&mut psi, &decay);
        if (m + 1) % stride == 0 {
            values.push(psi.clone());
        }
    }
    Ok(FouPath { values, psi_s0: psi_s0.clone(), stride, dt_fast: noise.dt })
}

/// `ψ(t_{j·stride}) = ε a(ε² t) + ε^{2H+1} ψ_s(t)` for each stored `ψ_s`.
pub fn assemble_psi(
    sys: &SpectralSystem,
    a: &AmplitudePath,
    fou: &FouPath,
    eps: f64,
    hurst: HurstParam,
) -> Result<Vec<Field>> {
    slow_ratio(eps, a.d_t, fou.dt_fast)?;
    let amp = eps.powf(2.0 * hurst.value() + 1.0);
    Ok(fou
        .values
        .iter()
        .enumerate()
        .map(|(j, psi_s)| {
            let t = (j * fou.stride) as f64 * fou.dt_fast;
            let mut psi = sys.from_kernel(&a.at(eps * eps * t)).scaled(eps);
            psi.axpy(amp, psi_s);
            psi
        })
        .collect())
}

/// The reduced model built on the noise of one run.
#[derive(Debug, Clone)]
pub struct Approximation {
    pub amplitude: AmplitudePath,
    pub fou: FouPath,
    /// `ψ` at the run's snapshots.
    pub psi: Vec<Field>,
    /// [`QFbmField::fingerprint`] of the driving noise.
    pub noise_fingerprint: u64,
}

impl Approximation {
    /// `ε a(ε² t)` at the run's snapshots, the first-order part of `ψ`.
    pub fn first_order(&self, sys: &SpectralSystem, eps: f64) -> Vec<Field> {
        (0..self.psi.len())
            .map(|j| {
                let t = (j * self.fou.stride) as f64 * self.fou.dt_fast;
                sys.from_kernel(&self.amplitude.at(eps * eps * t)).scaled(eps)
            })
            .collect()
    }
}

/// `a(0) = ε^{−1} P_c u0`, `ψ_s(0) = ε^{−2H−1} P_s u0`, slow step
/// `dT = ratio · ε² dt_fast`; `ψ` is stored every `stride` fast steps.
pub fn approximate_on_noise(
    sys: &SpectralSystem,
    noise: &QFbmField,
    eps: f64,
    t0: f64,
    u0: &Field,
    stride: usize,
    ratio: usize,
) -> Result<Approximation> {
    ensure!(eps > 0.0, Domain, "the reduced model needs eps > 0");
    ensure!(ratio >= 1, Domain, "slow ratio must be at least 1");
    let hurst = noise.hurst;
    let d_t = ratio as f64 * eps * eps * noise.dt;
    let b = rescaled_noise_b(sys, noise, eps, d_t, t0)?;
    let a0 = sys.to_kernel(u0).scaled(1.0 / eps);
    let amplitude = solve_amplitude(sys, &b, &a0, d_t)?;
    let psi_s0 = sys.project_s(u0).scaled(eps.powf(-2.0 * hurst.value() - 1.0));
    let fou = solve_fou(sys, noise, &psi_s0, stride)?;
    let psi = assemble_psi(sys, &amplitude, &fou, eps, hurst)?;
    Ok(Approximation { amplitude, fou, psi, noise_fingerprint: noise.fingerprint() })
}

/// [`approximate_on_noise`] on the noise, grid and initial value of a run.
pub fn approximate(run: &SpdeRun, ratio: usize) -> Result<Approximation> {
    approximate_on_noise(&run.sys, &run.noise, run.eps, run.t0, &run.u0, run.stride, ratio)
}
