use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use super::gamma::gamma_exponent;
use super::scaling::ScalingConfig;
use crate::amplitude::{approximate_on_noise, Approximation};
use crate::error::{ensure, Result};
use crate::fbm::HurstParam;
use crate::numerics::{exp_trapezoid_weights, median};
use crate::spde::{default_stride, fast_steps, generate_noise};
use crate::spectral::{Field, SpectralSystem};

/// `‖P_s Res(ψ)(t_j)‖` with `P_s Res(ψ)(t) = ∫_0^t e^{(t−τ)L} P_s(ε²Aψ + F(ψ)) dτ`,
/// by the exponential trapezoid rule on the spacing `h` of `psi`.
pub fn residual_s(sys: &SpectralSystem, psi: &[Field], eps: f64, h: f64) -> Result<Vec<f64>> {
    ensure!(h > 0.0, Domain, "spacing must be positive");
    ensure!(!psi.is_empty(), Domain, "empty sequence");
    let weights: Vec<(f64, f64, f64)> =
        sys.eigenvalues.iter().map(|l| exp_trapezoid_weights(*l, h)).collect();
    let mut cubic = sys.cubic();
    let mut integrand = |p: &Field| {
        let mut g = cubic.cube(p);
        g.axpy(eps * eps, &sys.apply_a(p));
        sys.project_s(&g)
    };
    let mut prev = integrand(&psi[0]);
    let mut r = sys.zero_field();
    let mut out = vec![0.0];
    for p in &psi[1..] {
        let next = integrand(p);
        for (((z, &(decay, wl, wr)), a), b) in
            r.coeffs_mut().iter_mut().zip(&weights).zip(prev.coeffs()).zip(next.coeffs())
        {
            *z = decay * *z + wl * a + wr * b;
        }
        out.push(r.norm());
        prev = next;
    }
    Ok(out)
}

/// The four terms of `P_c Res(ψ)` and their sum, each as a norm per
/// snapshot, plus the unexpanded form for comparison.
#[derive(Debug, Clone)]
pub struct ResidualC {
    /// `ε^{2H+3}∫A_cψ_s`, `3ε^{2H+3}∫F_c(ψ_c,ψ_c,ψ_s)`,
    /// `3ε^{4H+3}∫F_c(ψ_c,ψ_s,ψ_s)`, `ε^{6H+3}∫F_c(ψ_s)`.
    pub terms: [Vec<f64>; 4],
    pub total: Vec<f64>,
    /// `∫ ε²A_c(P_sψ) + F_c(ψ) − F_c(P_cψ)`.
    pub direct: Vec<f64>,
    /// `sup_j ‖sum_j − direct_j‖`.
    pub max_expansion_gap: f64,
}

impl ResidualC {
    pub fn sup_total(&self) -> f64 {
        self.total.iter().copied().fold(0.0, f64::max)
    }

    pub fn sup_term(&self, k: usize) -> f64 {
        self.terms[k].iter().copied().fold(0.0, f64::max)
    }
}

/// Trapezoid rule in fast time over the snapshots of `approx`.
pub fn residual_c(
    sys: &SpectralSystem,
    approx: &Approximation,
    eps: f64,
    hurst: HurstParam,
) -> Result<ResidualC> {
    let fou = &approx.fou;
    let h = fou.stride as f64 * fou.dt_fast;
    ensure!(approx.psi.len() == fou.values.len(), Domain, "psi and psi_s grids differ");
    let hv = hurst.value();
    let coef = [
        eps.powf(2.0 * hv + 3.0),
        3.0 * eps.powf(2.0 * hv + 3.0),
        3.0 * eps.powf(4.0 * hv + 3.0),
        eps.powf(6.0 * hv + 3.0),
    ];
    let mut cubic = sys.cubic();
    let mut integrands = |j: usize| -> ([Field; 4], Field) {
        let t = (j * fou.stride) as f64 * fou.dt_fast;
        let c = sys.from_kernel(&approx.amplitude.at(eps * eps * t));
        let s = &fou.values[j];
        let psi = &approx.psi[j];
        let terms = [
            sys.project_c(&sys.apply_a(s)).scaled(coef[0]),
            sys.project_c(&cubic.apply(&c, &c, s)).scaled(coef[1]),
            sys.project_c(&cubic.apply(&c, s, s)).scaled(coef[2]),
            sys.project_c(&cubic.cube(s)).scaled(coef[3]),
        ];
        let pc = sys.project_c(psi);
        let mut direct = sys.project_c(&sys.apply_a(&sys.project_s(psi))).scaled(eps * eps);
        direct.axpy(1.0, &sys.project_c(&cubic.cube(psi)));
        direct.axpy(-1.0, &sys.project_c(&cubic.cube(&pc)));
        (terms, direct)
    };

    let zero = sys.zero_field();
    let mut acc = [zero.clone(), zero.clone(), zero.clone(), zero.clone()];
    let mut acc_direct = zero;
    let mut terms: [Vec<f64>; 4] = Default::default();
    for t in terms.iter_mut() {
        t.push(0.0);
    }
    let mut total = vec![0.0];
    let mut direct = vec![0.0];
    let mut max_gap = 0.0f64;
    let (mut prev, mut prev_d) = integrands(0);
    for j in 1..approx.psi.len() {
        let (next, next_d) = integrands(j);
        let mut sum = sys.zero_field();
        for k in 0..4 {
            acc[k].axpy(0.5 * h, &prev[k]);
            acc[k].axpy(0.5 * h, &next[k]);
            terms[k].push(acc[k].norm());
            sum.axpy(1.0, &acc[k]);
        }
        acc_direct.axpy(0.5 * h, &prev_d);
        acc_direct.axpy(0.5 * h, &next_d);
        total.push(sum.norm());
        direct.push(acc_direct.norm());
        max_gap = max_gap.max(sum.dist(&acc_direct));
        prev = next;
        prev_d = next_d;
    }
    Ok(ResidualC { terms, total, direct, max_expansion_gap: max_gap })
}

/// Bound on `max/median` of the scaled residual sups over the `ε` grid.
pub const RESIDUAL_RATIO: f64 = 3.0;

/// Median sup residuals over replicas, scaled by `ε^3` (stable part) and
/// `ε^{γ(H)}` (kernel part).
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualOrders {
    pub hurst: HurstParam,
    pub eps: Vec<f64>,
    pub sup_s: Vec<f64>,
    pub sup_c: Vec<f64>,
    pub exponent_c: f64,
    pub ratio_s: Vec<f64>,
    pub ratio_c: Vec<f64>,
}

fn max_over_median(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max) / median(v)
}

impl ResidualOrders {
    pub fn spread_s(&self) -> f64 {
        max_over_median(&self.ratio_s)
    }

    pub fn spread_c(&self) -> f64 {
        max_over_median(&self.ratio_c)
    }

    pub fn pass(&self) -> bool {
        self.spread_s() <= RESIDUAL_RATIO && self.spread_c() <= RESIDUAL_RATIO
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "H,eps,sup_res_s,sup_res_c,ratio_s,ratio_c")?;
        for i in 0..self.eps.len() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.hurst.value(),
                self.eps[i],
                self.sup_s[i],
                self.sup_c[i],
                self.ratio_s[i],
                self.ratio_c[i]
            )?;
        }
        Ok(())
    }
}

/// Residuals of `ψ` built on each replica's noise; the full equation is
/// not solved.
pub fn residual_orders(cfg: &ScalingConfig) -> Result<ResidualOrders> {
    let sys = cfg.system()?;
    let mut sup_s = Vec::new();
    let mut sup_c = Vec::new();
    for &eps in &cfg.eps_grid {
        let dt = cfg.dt_for(eps);
        let steps = fast_steps(eps, cfg.t0, dt)?;
        let stride = default_stride(steps);
        let mut u0 = sys.zero_field();
        u0.set(cfg.preset.kernel_top() as i64, Complex64::new(eps * cfg.a0, 0.0));
        let sups = (0..cfg.replicas)
            .into_par_iter()
            .map(|r| {
                let noise = generate_noise(
                    &sys,
                    cfg.hurst,
                    cfg.noise_modes,
                    &cfg.spectrum,
                    steps,
                    dt,
                    cfg.replica_seed(r),
                )?;
                let ap = approximate_on_noise(&sys, &noise, eps, cfg.t0, &u0, stride, 1)?;
                let rs = residual_s(&sys, &ap.psi, eps, stride as f64 * dt)?;
                let rc = residual_c(&sys, &ap, eps, cfg.hurst)?;
                Ok((rs.into_iter().fold(0.0, f64::max), rc.sup_total()))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        sup_s.push(median(&sups.iter().map(|p| p.0).collect::<Vec<_>>()));
        sup_c.push(median(&sups.iter().map(|p| p.1).collect::<Vec<_>>()));
    }
    let exponent_c = gamma_exponent(cfg.hurst).gamma;
    let ratio_s = cfg.eps_grid.iter().zip(&sup_s).map(|(e, v)| v / e.powi(3)).collect();
    let ratio_c = cfg.eps_grid.iter().zip(&sup_c).map(|(e, v)| v / e.powf(exponent_c)).collect();
    Ok(ResidualOrders {
        hurst: cfg.hurst,
        eps: cfg.eps_grid.clone(),
        sup_s,
        sup_c,
        exponent_c,
        ratio_s,
        ratio_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::approximate_on_noise;
    use crate::fbm::{generate_qfbm, QFbmField, Spectrum};
    use crate::spde::fast_steps;
    use crate::spectral::Preset;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn h(v: f64) -> HurstParam {
        HurstParam::new(v).unwrap()
    }

    #[test]
    fn zero_psi_has_zero_stable_residual() {
        let sys = SpectralSystem::new(Preset::LaplacianPeriodic, 8, 1.0).unwrap();
        let psi = vec![sys.zero_field(); 20];
        let r = residual_s(&sys, &psi, 0.1, 0.05).unwrap();
        assert!(r.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn constant_single_mode_matches_closed_form() {
        // ψ = A cos(3x): F(ψ) = −A³(3 cos 3x + cos 9x)/4, coefficient of
        // B cos(jx) on e^{ijx}/√(2π) is B √(π/2)
        let sys = SpectralSystem::new(Preset::LaplacianPeriodic, 16, 1.0).unwrap();
        let (amp, eps, h_step) = (0.7, 0.3, 0.01);
        let mut psi = sys.zero_field();
        psi.set(3, Complex64::new(amp * (PI / 2.0).sqrt(), 0.0));
        let seq = vec![psi; 301];
        let got = residual_s(&sys, &seq, eps, h_step).unwrap();
        let g3 = (PI / 2.0).sqrt() * (eps * eps * amp - 0.75 * amp.powi(3));
        let g9 = -(PI / 2.0).sqrt() * amp.powi(3) / 4.0;
        for (j, r) in got.iter().enumerate() {
            let t = j as f64 * h_step;
            let prop = |k: i64| {
                let l = sys.eigenvalue(k);
                ((l * t).exp() - 1.0) / l
            };
            let exact = (2.0 * ((g3 * prop(3)).powi(2) + (g9 * prop(9)).powi(2))).sqrt();
            assert!((r - exact).abs() <= 1e-6 * exact.max(1e-300), "t={t}: {r} vs {exact}");
        }
    }

    fn approximation(noise: &QFbmField, eps: f64, sys: &SpectralSystem) -> Approximation {
        let mut u0 = sys.zero_field();
        u0.set(1, Complex64::new(eps * 0.8, 0.1 * eps));
        u0.set(4, Complex64::new(0.3 * eps.powf(2.0 * noise.hurst.value() + 1.0), 0.0));
        approximate_on_noise(sys, noise, eps, 1.0, &u0, 4, 1).unwrap()
    }

    #[test]
    fn expansion_equals_direct_form() {
        let sys = SpectralSystem::new(Preset::SwiftHohenberg, 8, 1.0).unwrap();
        for hv in [0.3, 0.7] {
            let eps = 0.25;
            let steps = fast_steps(eps, 1.0, 0.01).unwrap();
            let noise = generate_qfbm(h(hv), 12, &Spectrum::PowerLaw(2.0), steps, 0.01, 5).unwrap();
            let ap = approximation(&noise, eps, &sys);
            let r = residual_c(&sys, &ap, eps, h(hv)).unwrap();
            let scale = r.direct.iter().copied().fold(0.0, f64::max);
            assert!(scale > 0.0);
            assert!(r.max_expansion_gap <= 1e-8 * scale, "{} vs {scale}", r.max_expansion_gap);
        }
    }

    #[test]
    fn no_stable_part_means_no_terms() {
        let sys = SpectralSystem::new(Preset::LaplacianPeriodic, 8, 1.0).unwrap();
        let eps = 0.5;
        let steps = fast_steps(eps, 1.0, 0.01).unwrap();
        let noise = QFbmField::zero(h(0.5), 0.01, steps, 6);
        let mut u0 = sys.zero_field();
        u0.set(0, Complex64::new(eps, 0.0));
        let ap = approximate_on_noise(&sys, &noise, eps, 1.0, &u0, 1, 1).unwrap();
        let r = residual_c(&sys, &ap, eps, h(0.5)).unwrap();
        for k in 0..4 {
            assert_eq!(r.sup_term(k), 0.0);
        }
        assert_eq!(r.sup_total(), 0.0);
    }
}
