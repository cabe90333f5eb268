//! Discrete Hölder norms, the `ε`-accelerated convolution
//! `t ↦ ∫_0^t e^{(t−s)Lε^{−2}} f(s) ds` and the checks built on them.

use std::io::Write;

use rayon::prelude::*;

use crate::amplitude::{rescaled_noise_b, solve_amplitude};
use crate::error::{ensure, Result};
use crate::fbm::{HurstParam, QFbmField, Spectrum};
use crate::numerics::{exp_trapezoid_weights, linear_fit, median};
use crate::rng::mix_seed;
use crate::spde::{fast_steps, generate_noise, stochastic_convolution, NoiseFields};
use crate::spectral::{Field, SpectralSystem};

/// Grids up to this many points use every pair in the Hölder quotient.
pub const ALL_PAIRS_LIMIT: usize = 1 << 11;

/// Bound on `max/median` of a ratio sequence for it to count as
/// `ε`-uniformly bounded.
pub const BOUNDED_RATIO: f64 = 2.5;

/// Samples `f(i·dt) ∈ ℝ^dim`, `i = 0..len`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub dt: f64,
    pub dim: usize,
    pub data: Vec<f64>,
}

impl SampledFunction {
    pub fn new(dt: f64, dim: usize, data: Vec<f64>) -> Result<Self> {
        ensure!(dt > 0.0 && dt.is_finite(), Domain, "grid spacing must be positive");
        ensure!(dim >= 1, Domain, "dimension must be at least 1");
        ensure!(
            !data.is_empty() && data.len() % dim == 0,
            Domain,
            "data length {} is not a positive multiple of dim {dim}",
            data.len()
        );
        Ok(Self { dt, dim, data })
    }

    pub fn scalar(dt: f64, values: Vec<f64>) -> Result<Self> {
        Self::new(dt, 1, values)
    }

    /// Samples `f` at `i·T/n`, `i = 0..=n`.
    pub fn from_fn(n: usize, t_end: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        ensure!(n >= 1, Domain, "need at least one interval");
        let dt = t_end / n as f64;
        Self::scalar(dt, (0..=n).map(|i| f(i as f64 * dt)).collect())
    }

    /// Fields through their real coordinates (norm preserving).
    pub fn from_fields(dt: f64, fields: &[Field]) -> Result<Self> {
        ensure!(!fields.is_empty(), Domain, "empty field sequence");
        let dim = 2 * fields[0].modes() + 1;
        let data = fields.iter().flat_map(|f| f.real_coords()).collect();
        Self::new(dt, dim, data)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.point(i).iter().zip(self.point(j)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        (0..self.len())
            .map(|i| self.point(i).iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// `max ‖f_j − f_i‖ / (t_j − t_i)^α` over all pairs (small grids) or over
/// dyadic gaps `1, 2, 4, …` (large grids, a lower estimate).
pub fn holder_seminorm(f: &SampledFunction, alpha: f64) -> Result<f64> {
    ensure!((0.0..=1.0).contains(&alpha), Domain, "alpha must lie in [0, 1], got {alpha}");
    let n = f.len();
    let quotient = |gap: usize| -> f64 {
        let denom = (gap as f64 * f.dt).powf(alpha);
        (0..n - gap).map(|i| f.dist(i, i + gap)).fold(0.0, f64::max) / denom
    };
    let gaps: Vec<usize> = if n <= ALL_PAIRS_LIMIT {
        (1..n).collect()
    } else {
        std::iter::successors(Some(1usize), |g| Some(g * 2)).take_while(|g| *g < n).collect()
    };
    Ok(gaps.into_iter().map(quotient).fold(0.0, f64::max))
}

/// `sup ‖f‖ + [f]_α`.
pub fn holder_norm(f: &SampledFunction, alpha: f64) -> Result<f64> {
    Ok(f.sup_norm() + holder_seminorm(f, alpha)?)
}

/// `g(t) = ∫_0^t e^{(t−s)λ_i ε^{−2}} f_i(s) ds` per component, by the
/// exponential trapezoid rule (exact for piecewise linear `f`).
pub fn epsilon_convolution_diag(
    f: &SampledFunction,
    lambdas: &[f64],
    eps: f64,
) -> Result<SampledFunction> {
    ensure!(lambdas.len() == f.dim, Domain, "need one rate per component");
    ensure!(eps > 0.0, Domain, "eps must be positive");
    let weights: Vec<(f64, f64, f64)> =
        lambdas.iter().map(|l| exp_trapezoid_weights(l / (eps * eps), f.dt)).collect();
    let mut out = vec![0.0; f.data.len()];
    let d = f.dim;
    for i in 0..f.len() - 1 {
        for (c, &(decay, wl, wr)) in weights.iter().enumerate() {
            out[(i + 1) * d + c] =
                decay * out[i * d + c] + wl * f.data[i * d + c] + wr * f.data[(i + 1) * d + c];
        }
    }
    SampledFunction::new(f.dt, d, out)
}

/// [`epsilon_convolution_diag`] with one rate for all components.
pub fn epsilon_convolution(f: &SampledFunction, lambda: f64, eps: f64) -> Result<SampledFunction> {
    epsilon_convolution_diag(f, &vec![lambda; f.dim], eps)
}

/// Ratio sequence `‖conv_ε f‖_{C^α} / ε^{exponent}` over an `ε` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCheck {
    pub alpha: f64,
    pub exponent: f64,
    pub eps: Vec<f64>,
    pub norms: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Least-squares slope of `log norm` against `log ε`.
    pub slope: f64,
    pub max_over_median: f64,
    pub pass: bool,
}

impl ScalingCheck {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "eps,norm,ratio")?;
        for ((e, n), r) in self.eps.iter().zip(&self.norms).zip(&self.ratios) {
            writeln!(w, "{e},{n},{r}")?;
        }
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "alpha={}", self.alpha)?;
        writeln!(w, "exponent={}", self.exponent)?;
        writeln!(w, "slope={}", self.slope)?;
        writeln!(w, "max_over_median={}", self.max_over_median)?;
        writeln!(w, "pass={}", self.pass)?;
        Ok(())
    }
}

/// Scalar rate used by the Hölder convolution checks.
pub const DEFAULT_LAMBDA: f64 = -1.0;

pub fn scaling_check(
    f: &SampledFunction,
    lambda: f64,
    alpha: f64,
    exponent: f64,
    eps_grid: &[f64],
) -> Result<ScalingCheck> {
    ensure!(eps_grid.len() >= 2, Domain, "need at least two eps values");
    ensure!(lambda < 0.0, Domain, "the rate must be a stable one (lambda < 0)");
    ensure!(f.horizon() <= 1.0 + 1e-12, Precondition, "Hölder checks run on [0, T] with T <= 1");
    let norms = eps_grid
        .par_iter()
        .map(|&e| holder_norm(&epsilon_convolution(f, lambda, e)?, alpha))
        .collect::<Result<Vec<f64>>>()?;
    let ratios: Vec<f64> = eps_grid.iter().zip(&norms).map(|(e, n)| n / e.powf(exponent)).collect();
    let logs_e: Vec<f64> = eps_grid.iter().map(|e| e.ln()).collect();
    let logs_n: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let slope = linear_fit(&logs_e, &logs_n).slope;
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let max_over_median = max / median(&ratios);
    Ok(ScalingCheck {
        alpha,
        exponent,
        eps: eps_grid.to_vec(),
        norms,
        ratios,
        slope,
        max_over_median,
        pass: max_over_median <= BOUNDED_RATIO && max_over_median.is_finite(),
    })
}

/// `ε ↦ ‖conv_ε f‖_{C^α}/ε^{2−2α}` for continuous `f`.
pub fn check_lemma_a1(f: &SampledFunction, alpha: f64, eps_grid: &[f64]) -> Result<ScalingCheck> {
    ensure!((0.0..1.0).contains(&alpha), Precondition, "alpha must lie in [0, 1), got {alpha}");
    scaling_check(f, DEFAULT_LAMBDA, alpha, 2.0 - 2.0 * alpha, eps_grid)
}

fn starts_at_zero(f: &SampledFunction) -> bool {
    f.point(0).iter().all(|v| v.abs() <= 1e-12)
}

/// `ε ↦ ‖conv_ε f‖_{C^α}/ε²` for `f ∈ C^α` with `f(0) = 0`.
pub fn check_lemma_a2(f: &SampledFunction, alpha: f64, eps_grid: &[f64]) -> Result<ScalingCheck> {
    ensure!((0.0..1.0).contains(&alpha), Precondition, "alpha must lie in [0, 1), got {alpha}");
    ensure!(starts_at_zero(f), Precondition, "this estimate needs f(0) = 0");
    scaling_check(f, DEFAULT_LAMBDA, alpha, 2.0, eps_grid)
}

/// `ζ = margin · 2(1−α)/(1−γ)`, the exponent tested by [`check_lemma_a3`].
pub fn a3_exponent(alpha: f64, gamma: f64, margin: f64) -> f64 {
    margin * 2.0 * (1.0 - alpha) / (1.0 - gamma)
}

/// `ε ↦ ‖conv_ε f‖_{C^α}/ε^ζ` for `f ∈ C^γ`, `f(0) = 0`,
/// `0 ≤ ζ < 2(1−α)/(1−γ)`.
pub fn check_lemma_a3(
    f: &SampledFunction,
    alpha: f64,
    gamma: f64,
    zeta: f64,
    eps_grid: &[f64],
) -> Result<ScalingCheck> {
    ensure!(
        0.0 <= gamma && gamma <= alpha && alpha < 1.0,
        Precondition,
        "need 0 <= gamma <= alpha < 1, got alpha={alpha}, gamma={gamma}"
    );
    let sup = 2.0 * (1.0 - alpha) / (1.0 - gamma);
    ensure!((0.0..sup).contains(&zeta), Precondition, "need 0 <= zeta < {sup}, got {zeta}");
    ensure!(starts_at_zero(f), Precondition, "this estimate needs f(0) = 0");
    scaling_check(f, DEFAULT_LAMBDA, alpha, zeta, eps_grid)
}

/// Both sides of `∫_0^t P_s W_L(τε^{−2}) dτ = ∫_0^t e^{(t−s)Lε^{−2}} P_s W(sε^{−2}) ds`
/// on the slow grid `T_j = j ε² dt`.
#[derive(Debug, Clone)]
pub struct IdentitySides {
    pub h: f64,
    pub lhs: Vec<Field>,
    pub rhs: Vec<Field>,
}

/// Left side: trapezoid rule over the recursively computed `W_L`.
pub fn integrated_wl(sys: &SpectralSystem, noise: &QFbmField, eps: f64) -> Result<Vec<Field>> {
    let h = eps * eps * noise.dt;
    let wl = stochastic_convolution(sys, noise, 1)?;
    let mut acc = sys.zero_field();
    let mut out = Vec::with_capacity(wl.len());
    out.push(acc.clone());
    for w in wl.windows(2) {
        acc.axpy(0.5 * h, &sys.project_s(&w[0]));
        acc.axpy(0.5 * h, &sys.project_s(&w[1]));
        out.push(acc.clone());
    }
    Ok(out)
}

/// Right side: exponential trapezoid rule over `P_s W`.
pub fn filtered_noise_integral(
    sys: &SpectralSystem,
    noise: &QFbmField,
    eps: f64,
) -> Result<Vec<Field>> {
    let h = eps * eps * noise.dt;
    let weights: Vec<(f64, f64, f64)> =
        sys.eigenvalues.iter().map(|l| exp_trapezoid_weights(l / (eps * eps), h)).collect();
    let mut nf = NoiseFields::new(noise, sys.modes)?;
    let mut prev = sys.project_s(&nf.value(0));
    let mut g = sys.zero_field();
    let mut out = Vec::with_capacity(noise.steps() + 1);
    out.push(g.clone());
    for i in 1..=noise.steps() {
        let next = sys.project_s(&nf.value(i));
        for (((z, &(decay, wl, wr)), a), b) in
            g.coeffs_mut().iter_mut().zip(&weights).zip(prev.coeffs()).zip(next.coeffs())
        {
            *z = decay * *z + wl * a + wr * b;
        }
        out.push(g.clone());
        prev = next;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub dt_fast: f64,
    pub sup_deviation: f64,
    pub sup_rhs: f64,
}

impl IdentityCheck {
    pub fn relative(&self) -> f64 {
        if self.sup_rhs == 0.0 {
            self.sup_deviation
        } else {
            self.sup_deviation / self.sup_rhs
        }
    }
}

pub fn identity_sides(sys: &SpectralSystem, noise: &QFbmField, eps: f64) -> Result<IdentitySides> {
    Ok(IdentitySides {
        h: eps * eps * noise.dt,
        lhs: integrated_wl(sys, noise, eps)?,
        rhs: filtered_noise_integral(sys, noise, eps)?,
    })
}

/// `sup_j ‖LHS_j − RHS_j‖` on the noise grid.
pub fn check_convolution_identity(sys: &SpectralSystem, noise: &QFbmField, eps: f64) -> Result<IdentityCheck> {
    ensure!(eps > 0.0, Domain, "eps must be positive");
    let s = identity_sides(sys, noise, eps)?;
    let sup_deviation = s.lhs.iter().zip(&s.rhs).map(|(a, b)| a.dist(b)).fold(0.0, f64::max);
    let sup_rhs = s.rhs.iter().map(Field::norm).fold(0.0, f64::max);
    Ok(IdentityCheck { dt_fast: noise.dt, sup_deviation, sup_rhs })
}

/// The check on `noise` subsampled by `2^halvings, …, 2, 1`: coarsest
/// grid first, each entry with half the step of its predecessor.
pub fn identity_refinement(
    sys: &SpectralSystem,
    fine: &QFbmField,
    eps: f64,
    halvings: usize,
) -> Result<Vec<IdentityCheck>> {
    (0..=halvings)
        .rev()
        .map(|k| check_convolution_identity(sys, &fine.subsample(1 << k)?, eps))
        .collect()
}

/// Left and right sides of the Young estimate for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoungSample {
    /// `‖Σ_j F_c(a_j, a_j, Z_{j+1} − Z_j)‖` at the final time.
    pub lhs: f64,
    /// `‖a‖²_{C^β'} · ‖Z‖_{C^α'}`.
    pub rhs: f64,
}

impl YoungSample {
    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

fn check_young_exponents(alpha_p: f64, beta_p: f64) -> Result<()> {
    ensure!(
        (0.0..=1.0).contains(&alpha_p) && (0.0..=1.0).contains(&beta_p),
        Domain,
        "Hölder exponents must lie in [0, 1]"
    );
    ensure!(
        alpha_p + beta_p > 1.0,
        Precondition,
        "the Young estimate needs alpha' + beta' > 1, got {alpha_p} + {beta_p}"
    );
    Ok(())
}

/// One sample of the Young estimate. `a` (kernel truncation) and `z` (full
/// truncation, `Z(T) = ∫_0^T P_s W_L(sε^{−2}) ds`) share the slow grid `h`.
pub fn young_sample(
    sys: &SpectralSystem,
    a: &[Field],
    z: &[Field],
    h: f64,
    alpha_p: f64,
    beta_p: f64,
) -> Result<YoungSample> {
    check_young_exponents(alpha_p, beta_p)?;
    ensure!(a.len() == z.len() && a.len() >= 2, Domain, "a and Z must share the grid");
    let mut cubic = sys.cubic();
    let mut acc = sys.zero_field();
    for j in 0..a.len() - 1 {
        let aj = sys.from_kernel(&a[j]);
        if aj.norm() == 0.0 {
            continue;
        }
        let dz = z[j + 1].sub(&z[j]);
        acc.axpy(1.0, &sys.project_c(&cubic.apply(&aj, &aj, &dz)));
    }
    let a_norm = holder_norm(&SampledFunction::from_fields(h, a)?, beta_p)?;
    let z_norm = holder_norm(&SampledFunction::from_fields(h, z)?, alpha_p)?;
    Ok(YoungSample { lhs: acc.norm(), rhs: a_norm * a_norm * z_norm })
}

/// Setup of the calibration/holdout Young experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct YoungConfig {
    pub hurst: HurstParam,
    pub eps: f64,
    pub t0: f64,
    pub dt_fast: f64,
    pub noise_modes: usize,
    pub spectrum: Spectrum,
    /// Initial amplitude (kernel coefficient of the lowest kernel mode).
    pub a0: f64,
    pub alpha_p: f64,
    pub beta_p: f64,
    pub calibration: usize,
    pub holdout: usize,
    /// Factor applied to the calibration maximum before freezing.
    pub margin: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct YoungReport {
    pub constant: f64,
    pub calibration_max: f64,
    pub holdout_ratios: Vec<f64>,
    pub holdout_violations: usize,
}

impl YoungReport {
    pub fn pass(&self) -> bool {
        self.holdout_violations == 0
    }
}

/// Runs the amplitude equation on independent noise paths, freezes
/// `C = margin · max(LHS/RHS)` on the calibration set and counts holdout
/// samples with `LHS > C · RHS`.
pub fn young_bound_check(sys: &SpectralSystem, cfg: &YoungConfig) -> Result<YoungReport> {
    check_young_exponents(cfg.alpha_p, cfg.beta_p)?;
    ensure!(cfg.calibration >= 1 && cfg.holdout >= 1, Domain, "need calibration and holdout samples");
    let steps = fast_steps(cfg.eps, cfg.t0, cfg.dt_fast)?;
    let sample = |r: usize| -> Result<f64> {
        let noise = generate_noise(
            sys,
            cfg.hurst,
            cfg.noise_modes,
            &cfg.spectrum,
            steps,
            cfg.dt_fast,
            mix_seed(cfg.seed, r as u64),
        )?;
        let h = cfg.eps * cfg.eps * cfg.dt_fast;
        let b = rescaled_noise_b(sys, &noise, cfg.eps, h, cfg.t0)?;
        let mut a0 = Field::zeros(sys.preset.kernel_top());
        a0.set(sys.preset.kernel_top() as i64, num_complex::Complex64::new(cfg.a0, 0.0));
        let a = solve_amplitude(sys, &b, &a0, h)?;
        ensure!(a.blow_up.is_none(), Precondition, "amplitude blew up in Young sample {r}");
        let z = filtered_noise_integral(sys, &noise, cfg.eps)?;
        Ok(young_sample(sys, &a.values, &z, h, cfg.alpha_p, cfg.beta_p)?.ratio())
    };
    let n = cfg.calibration + cfg.holdout;
    let ratios = (0..n).into_par_iter().map(sample).collect::<Result<Vec<f64>>>()?;
    let calibration_max = ratios[..cfg.calibration].iter().copied().fold(0.0, f64::max);
    let constant = cfg.margin * calibration_max;
    let holdout_ratios = ratios[cfg.calibration..].to_vec();
    let holdout_violations = holdout_ratios.iter().filter(|r| **r > constant).count();
    Ok(YoungReport { constant, calibration_max, holdout_ratios, holdout_violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Preset;
    use proptest::prelude::*;

    #[test]
    fn linear_function() {
        let c = 1.7;
        let f = SampledFunction::from_fn(100, 1.0, |t| c * t).unwrap();
        assert!((holder_seminorm(&f, 1.0).unwrap() - c).abs() < 1e-12);
        assert!((holder_norm(&f, 1.0).unwrap() - 2.0 * c).abs() < 1e-12);
        // α = 0: sup plus the largest jump
        assert!((holder_norm(&f, 0.0).unwrap() - 2.0 * c).abs() < 1e-12);
    }

    #[test]
    fn constant_function() {
        let f = SampledFunction::from_fn(50, 1.0, |_| -3.0).unwrap();
        assert_eq!(holder_seminorm(&f, 0.5).unwrap(), 0.0);
        assert_eq!(holder_norm(&f, 0.5).unwrap(), 3.0);
        assert!(holder_norm(&f, 1.5).is_err());
    }

    #[test]
    fn convolution_of_constant() {
        let (lambda, eps) = (-1.0, 0.3);
        let f = SampledFunction::from_fn(1000, 1.0, |_| 1.0).unwrap();
        let g = epsilon_convolution(&f, lambda, eps).unwrap();
        for i in [0, 1, 10, 500, 1000] {
            let t = i as f64 / 1000.0;
            let exact = eps * eps * (1.0 - (lambda * t / (eps * eps)).exp()) / -lambda;
            assert!((g.data[i] - exact).abs() < 1e-13);
        }
        let z = SampledFunction::from_fn(10, 1.0, |_| 0.0).unwrap();
        assert!(epsilon_convolution(&z, -1.0, 0.1).unwrap().data.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn preconditions() {
        let f = SampledFunction::from_fn(64, 1.0, |t| t.cos()).unwrap();
        let grid = [0.125, 0.0625];
        assert!(check_lemma_a1(&f, 1.0, &grid).is_err());
        assert!(matches!(check_lemma_a2(&f, 0.5, &grid), Err(crate::Error::Precondition(_))));
        let g = SampledFunction::from_fn(64, 1.0, |t| t.sqrt()).unwrap();
        assert!(check_lemma_a3(&g, 0.3, 0.6, 0.5, &grid).is_err());
        assert!(check_lemma_a3(&g, 0.6, 0.3, 1.2, &grid).is_err());
        assert!(check_lemma_a3(&g, 0.6, 0.3, 1.0, &grid).is_ok());
        let long = SampledFunction::from_fn(64, 2.0, |t| t).unwrap();
        assert!(check_lemma_a2(&long, 0.5, &grid).is_err());
        assert!((a3_exponent(0.6, 0.3, 0.9) - 0.9 * 8.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn young_rejects_low_exponents_and_vanishes_for_zero_amplitude() {
        let sys = SpectralSystem::new(Preset::LaplacianPeriodic, 4, 1.0).unwrap();
        let a = vec![Field::zeros(0); 3];
        let mut z = vec![sys.zero_field(); 3];
        z[2].set(2, num_complex::Complex64::new(1.0, 0.0));
        assert!(matches!(young_sample(&sys, &a, &z, 0.1, 0.5, 0.5), Err(crate::Error::Precondition(_))));
        let s = young_sample(&sys, &a, &z, 0.1, 0.6, 0.6).unwrap();
        assert_eq!(s.lhs, 0.0);
    }

    #[test]
    fn identity_with_zero_noise() {
        let sys = SpectralSystem::new(Preset::LaplacianPeriodic, 4, 1.0).unwrap();
        let noise = QFbmField::zero(HurstParam::new(0.3).unwrap(), 0.01, 100, 5);
        let c = check_convolution_identity(&sys, &noise, 0.25).unwrap();
        assert_eq!(c.sup_deviation, 0.0);
        assert_eq!(c.sup_rhs, 0.0);
    }

    fn brownian_like(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.0f64..1.0, n)
    }

    proptest! {
        #[test]
        fn refinement_does_not_decrease_seminorm(coef in brownian_like(6), alpha in 0.0f64..1.0) {
            // a continuous function sampled on nested grids
            let f = |t: f64| coef.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * 3.0 * t).sin()).sum::<f64>();
            let coarse = SampledFunction::from_fn(64, 1.0, f).unwrap();
            let fine = SampledFunction::from_fn(128, 1.0, f).unwrap();
            let a = holder_seminorm(&coarse, alpha).unwrap();
            let b = holder_seminorm(&fine, alpha).unwrap();
            prop_assert!(b >= a * (1.0 - 1e-12));
        }

        #[test]
        fn holder_zero_is_sup_plus_oscillation(v in prop::collection::vec(-5.0f64..5.0, 2..60)) {
            let f = SampledFunction::scalar(0.01, v.clone()).unwrap();
            let sup = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let max = v.iter().copied().fold(f64::MIN, f64::max);
            let min = v.iter().copied().fold(f64::MAX, f64::min);
            prop_assert!((holder_norm(&f, 0.0).unwrap() - (sup + max - min)).abs() < 1e-12);
        }
    }
}
