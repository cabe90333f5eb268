use std::io::Write;

use statrs::function::gamma::{gamma, gamma_lr, gamma_ur};

use crate::error::{ensure, Result};
use crate::fbm::{FgnSynthesizer, HurstParam, Method};
use crate::numerics::{mean, variance};
use crate::rng::{mix_seed, rng_from_seed};

/// `∫_a^b s^{−α} e^{−μs} ds` for `0 ≤ a < b`, `μ > 0`, `0 < α < 1`.
pub fn singular_exp_integral(alpha: f64, mu: f64, a: f64, b: f64) -> f64 {
    let shape = 1.0 - alpha;
    let scale = mu.powf(-shape) * gamma(shape);
    let (x, y) = (mu * a, mu * b);
    if x > 1.0 {
        scale * (gamma_ur(shape, x) - gamma_ur(shape, y))
    } else {
        let lower = if x > 0.0 { gamma_lr(shape, x) } else { 0.0 };
        scale * (gamma_lr(shape, y) - lower)
    }
}

/// Weights `w_m` of `Y(t) ≈ Σ_m w_m (β(r_{m+1}) − β(r_m))`, `r_m = m·delta`:
/// the kernel `(t−r)^{−α} e^{λ(t−r)}` averaged over each cell.
pub fn cell_weights(alpha: f64, lambda: f64, t: f64, delta: f64) -> Vec<f64> {
    let cells = (t / delta).round() as usize;
    (0..cells)
        .map(|m| {
            let hi = t - m as f64 * delta;
            let lo = (hi - delta).max(0.0);
            singular_exp_integral(alpha, -lambda, lo, hi) / delta
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentConfig {
    pub hurst: HurstParam,
    pub alpha: f64,
    /// Stable rates, all negative.
    pub lambdas: Vec<f64>,
    pub times: Vec<f64>,
    pub delta: f64,
    pub replicas: usize,
    pub seed: u64,
}

impl MomentConfig {
    pub fn desk_default(hurst: HurstParam, alpha: f64) -> Self {
        Self {
            hurst,
            alpha,
            lambdas: vec![-1.0],
            times: vec![1.0, 2.0, 5.0, 10.0],
            delta: 0.01,
            replicas: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub lambda: f64,
    pub t: f64,
    /// Monte Carlo `E|Y(t)|²`.
    pub second_moment: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub hurst: HurstParam,
    pub alpha: f64,
    pub rows: Vec<MomentRow>,
}

/// Largest relative gap between the last two times allowed for a plateau.
pub const PLATEAU_GAP: f64 = 0.15;
/// Largest `max/min` over the time grid.
pub const PLATEAU_SPREAD: f64 = 2.0;

impl MomentReport {
    fn rows_for(&self, lambda: f64) -> Vec<&MomentRow> {
        self.rows.iter().filter(|r| r.lambda == lambda).collect()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.lambda) {
                out.push(r.lambda);
            }
        }
        out
    }

    /// `|E(t_last) − E(t_prev)| / max` for one rate.
    pub fn plateau_gap(&self, lambda: f64) -> f64 {
        let rows = self.rows_for(lambda);
        let (a, b) = (rows[rows.len() - 2].second_moment, rows[rows.len() - 1].second_moment);
        (a - b).abs() / a.max(b)
    }

    /// `max/min` of the estimates over the time grid for one rate.
    pub fn spread(&self, lambda: f64) -> f64 {
        let m: Vec<f64> = self.rows_for(lambda).iter().map(|r| r.second_moment).collect();
        m.iter().copied().fold(0.0, f64::max) / m.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.second_moment.is_finite())
            && self.lambdas().into_iter().all(|l| {
                self.plateau_gap(l) <= PLATEAU_GAP && self.spread(l) <= PLATEAU_SPREAD
            })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "H,alpha,lambda,t,second_moment,std_error")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.hurst.value(),
                self.alpha,
                r.lambda,
                r.t,
                r.second_moment,
                r.std_error
            )?;
        }
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, mut w: W) -> Result<()> {
        for l in self.lambdas() {
            writeln!(w, "plateau_gap[{l}]={}", self.plateau_gap(l))?;
            writeln!(w, "spread[{l}]={}", self.spread(l))?;
        }
        writeln!(w, "pass={}", self.pass())?;
        Ok(())
    }
}

/// Monte Carlo `E|Y(t)|²` for `Y(t) = ∫_0^t (t−r)^{−α} e^{(t−r)λ} dβ^H(r)`.
///
/// Each replica draws one path on `[0, max t]` and evaluates every
/// `(λ, t)` on it.
pub fn convolution_moment_check(cfg: &MomentConfig) -> Result<MomentReport> {
    let h = cfg.hurst.value();
    ensure!(
        cfg.alpha > 0.0 && cfg.alpha < h,
        Precondition,
        "alpha must lie in (0, H) = (0, {h}), got {}",
        cfg.alpha
    );
    ensure!(!cfg.lambdas.is_empty(), Domain, "need at least one rate");
    ensure!(cfg.lambdas.iter().all(|l| *l < 0.0), Domain, "rates must be negative");
    ensure!(cfg.times.len() >= 2, Domain, "need at least two times");
    ensure!(
        cfg.times.windows(2).all(|w| w[0] < w[1]) && cfg.times[0] > 0.0,
        Domain,
        "times must be positive and increasing"
    );
    ensure!(cfg.delta > 0.0, Domain, "delta must be positive");
    ensure!(cfg.replicas >= 2, Config, "need at least two replicas");
    for t in &cfg.times {
        let cells = t / cfg.delta;
        ensure!(
            (cells - cells.round()).abs() < 1e-9,
            Alignment,
            "t = {t} is not a multiple of delta = {}",
            cfg.delta
        );
    }

    let t_max = *cfg.times.last().unwrap();
    let n = (t_max / cfg.delta).round() as usize;
    let synth = FgnSynthesizer::new(cfg.hurst, n, Method::CirculantEmbedding)?;
    let inc_scale = cfg.delta.powf(h);
    let grid: Vec<(f64, f64, Vec<f64>)> = cfg
        .lambdas
        .iter()
        .flat_map(|&l| {
            cfg.times.iter().map(move |&t| (l, t, cell_weights(cfg.alpha, l, t, cfg.delta)))
        })
        .collect();

    let mut samples = vec![Vec::with_capacity(cfg.replicas); grid.len()];
    for r in 0..cfg.replicas {
        let dz = synth.sample(&mut rng_from_seed(mix_seed(cfg.seed, r as u64)));
        for ((_, _, w), out) in grid.iter().zip(samples.iter_mut()) {
            let y: f64 = w.iter().zip(&dz).map(|(wm, z)| wm * z).sum();
            out.push((y * inc_scale).powi(2));
        }
    }

    let rows = grid
        .iter()
        .zip(&samples)
        .map(|((lambda, t, _), s)| MomentRow {
            lambda: *lambda,
            t: *t,
            second_moment: mean(s),
            std_error: (variance(s) / s.len() as f64).sqrt(),
        })
        .collect();
    Ok(MomentReport { hurst: cfg.hurst, alpha: cfg.alpha, rows })
}
