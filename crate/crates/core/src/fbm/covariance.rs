use super::HurstParam;
use crate::error::{ensure, Result};

/// `E[β(t) β(s)] = ½ (t^{2H} + s^{2H} − |t − s|^{2H})`.
pub fn fbm_covariance(t: f64, s: f64, hurst: HurstParam) -> Result<f64> {
    ensure!(t >= 0.0 && s >= 0.0, Domain, "fBm covariance needs t, s >= 0 (got t={t}, s={s})");
    let two_h = 2.0 * hurst.value();
    if t == s {
        return Ok(t.powf(two_h));
    }
    Ok(0.5 * (t.powf(two_h) + s.powf(two_h) - (t - s).abs().powf(two_h)))
}

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`:
/// `γ(k) = ½ (|k+1|^{2H} + |k−1|^{2H} − 2|k|^{2H})`.
pub fn fgn_autocovariance(k: usize, hurst: HurstParam) -> f64 {
    let two_h = 2.0 * hurst.value();
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) + (k - 1.0).abs().powf(two_h) - 2.0 * k.powf(two_h))
}

/// Partial sums `S_N = Σ_{n=1}^{N} E[β(1)(β(n+1) − β(n))]`, evaluated from the
/// covariance, for `N = 1..=n_max`.
pub fn increment_correlation_partial_sums(hurst: HurstParam, n_max: usize) -> Vec<f64> {
    let two_h = 2.0 * hurst.value();
    let cov = |t: f64, s: f64| 0.5 * (t.powf(two_h) + s.powf(two_h) - (t - s).abs().powf(two_h));
    let mut acc = 0.0;
    (1..=n_max)
        .map(|n| {
            let n = n as f64;
            acc += cov(1.0, n + 1.0) - cov(1.0, n);
            acc
        })
        .collect()
}
