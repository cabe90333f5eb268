use rand::Rng as _;
use rand_distr::StandardNormal;

use super::{CubicProduct, Field, SpectralSystem};
use crate::error::{ensure, Result};
use crate::rng::{mix_seed, rng_from_seed, Rng};

/// Outcome of the randomized check of the sign conditions on the kernel.
///
/// Condition 1: `⟨F_c(v), v⟩ < 0`. Condition 2: `⟨F_c(v, v, w), w⟩ < 0`.
/// Condition 3: `⟨F_c(φ + v), v⟩ ≤ C_η ‖φ‖⁴ − η ‖v‖⁴`, with `η` set to a
/// tenth of the smallest observed `−⟨F_c(v), v⟩/‖v‖⁴` and `C_η` fitted on
/// one sample, doubled, and then checked on an independent holdout sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    pub trials: usize,
    pub violations_coercive: usize,
    pub violations_mixed: usize,
    pub min_coercivity_ratio: f64,
    pub eta: f64,
    pub c_eta: f64,
    pub holdout_violations_stable: usize,
}

impl SignReport {
    pub fn passed(&self) -> bool {
        self.violations_coercive == 0
            && self.violations_mixed == 0
            && self.holdout_violations_stable == 0
            && self.eta > 0.0
            && self.c_eta.is_finite()
    }
}

fn random_kernel(sys: &SpectralSystem, rng: &mut Rng) -> Field {
    // log-uniform magnitude so that the quartic balance is probed on many scales
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    let n = sys.preset.kernel_top();
    let mut f = Field::zeros(n);
    for k in 0..=n as i64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        f.set(k, num_complex::Complex64::new(scale * re, scale * im));
    }
    let f = sys.project_kernel_small(&f);
    if f.norm() == 0.0 {
        // measure-zero event, keep v ≠ 0
        return random_kernel(sys, rng);
    }
    f
}

pub fn check_sign_conditions(sys: &SpectralSystem, trials: usize, seed: u64) -> Result<SignReport> {
    ensure!(trials >= 1, Domain, "need at least one trial");
    let mut prod: CubicProduct = sys.kernel_cubic();
    let fc = |prod: &mut CubicProduct, u: &Field, v: &Field, w: &Field| {
        sys.project_kernel_small(&prod.apply(u, v, w))
    };

    let mut rng = rng_from_seed(mix_seed(seed, 0));
    let mut violations_coercive = 0;
    let mut violations_mixed = 0;
    let mut min_ratio = f64::INFINITY;
    let mut pairs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let v = random_kernel(sys, &mut rng);
        let w = random_kernel(sys, &mut rng);
        let phi = random_kernel(sys, &mut rng);
        let s1 = fc(&mut prod, &v, &v, &v).inner(&v);
        if s1 >= 0.0 {
            violations_coercive += 1;
        }
        min_ratio = min_ratio.min(-s1 / v.norm_sq().powi(2));
        if fc(&mut prod, &v, &v, &w).inner(&w) >= 0.0 {
            violations_mixed += 1;
        }
        pairs.push((phi, v));
    }

    let eta = 0.1 * min_ratio;
    let stable_excess = |prod: &mut CubicProduct, phi: &Field, v: &Field| {
        let u = phi.add(v);
        let lhs = fc(prod, &u, &u, &u).inner(v);
        (lhs + eta * v.norm_sq().powi(2)) / phi.norm_sq().powi(2)
    };
    let c_fit = pairs
        .iter()
        .map(|(phi, v)| stable_excess(&mut prod, phi, v))
        .fold(0.0f64, f64::max);
    let c_eta = 2.0 * c_fit.max(f64::MIN_POSITIVE);

    let mut rng = rng_from_seed(mix_seed(seed, 1));
    let holdout_violations_stable = (0..trials)
        .filter(|_| {
            let phi = random_kernel(sys, &mut rng);
            let v = random_kernel(sys, &mut rng);
            stable_excess(&mut prod, &phi, &v) > c_eta
        })
        .count();

    Ok(SignReport {
        trials,
        violations_coercive,
        violations_mixed,
        min_coercivity_ratio: min_ratio,
        eta,
        c_eta,
        holdout_violations_stable,
    })
}
