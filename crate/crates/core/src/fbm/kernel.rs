use super::HurstParam;
use crate::error::{ensure, Result};
use crate::numerics::GaussLegendre;

/// Volterra kernel `K(t, r) = c_H ∫_r^t (u/r)^{H−½} (u−r)^{H−3/2} du` for
/// `H > ½`, with `β(t) = ∫_0^t K(t, r) dB(r)`.
///
/// The inner integral is evaluated after `u = r + v^p`, `p = 1/(H − ½)`,
/// which turns the endpoint singularity into the bounded integrand
/// `p ((r + v^p)/r)^{H−½}` on `[0, (t − r)^{H−½}]`. `c_H` is calibrated so
/// that the reconstructed variance at `t = 1` equals one.
#[derive(Debug, Clone)]
pub struct FbmKernel {
    hurst: HurstParam,
    inner: GaussLegendre,
    outer: GaussLegendre,
    c_h: f64,
}

impl FbmKernel {
    /// `quad_points` nodes for the inner integral; the covariance quadrature
    /// uses a fixed 96-node rule on each half of `[0, min(s, t)]`.
    pub fn new(hurst: HurstParam, quad_points: usize) -> Result<Self> {
        ensure!(
            hurst.value() > 0.5,
            UnsupportedRegime,
            "kernel representation is implemented for H > 1/2 only, got H = {}",
            hurst.value()
        );
        ensure!(quad_points >= 2, Domain, "need at least two quadrature points");
        let mut k = Self {
            hurst,
            inner: GaussLegendre::new(quad_points),
            outer: GaussLegendre::new(96),
            c_h: 1.0,
        };
        let v = k.reconstruct_covariance(1.0, 1.0)?;
        k.c_h = v.sqrt().recip();
        Ok(k)
    }

    pub fn c_h(&self) -> f64 {
        self.c_h
    }

    pub fn eval(&self, t: f64, r: f64) -> Result<f64> {
        ensure!(r > 0.0 && r < t, Domain, "kernel needs 0 < r < t (got t={t}, r={r})");
        let e = self.hurst.value() - 0.5;
        let p = e.recip();
        let upper = (t - r).powf(e);
        let integral = self.inner.integrate(0.0, upper, |v| p * ((r + v.powf(p)) / r).powf(e));
        Ok(self.c_h * integral)
    }

    /// `∫_0^{min(s,t)} K(s, r) K(t, r) dr`.
    ///
    /// Split at the midpoint; near `r = 0` the integrand behaves like
    /// `r^{1−2H}` and near `r = min(s,t)` like a power of the distance, and
    /// each half gets a power substitution that flattens its endpoint.
    pub fn reconstruct_covariance(&self, s: f64, t: f64) -> Result<f64> {
        ensure!(s > 0.0 && t > 0.0, Domain, "covariance reconstruction needs s, t > 0");
        let hv = self.hurst.value();
        let m = s.min(t);
        let half = 0.5 * m;
        let prod = |r: f64| -> f64 {
            let ks = self.eval(s, r).unwrap_or(0.0);
            let kt = if s == t { ks } else { self.eval(t, r).unwrap_or(0.0) };
            ks * kt
        };

        // r = half · x^{p1}, x ∈ (0, 1]
        let p1 = 1.0 / (2.0 - 2.0 * hv);
        let lower = self.outer.integrate(0.0, 1.0, |x| {
            half * p1 * x.powf(p1 - 1.0) * prod(half * x.powf(p1))
        });

        let end_exp = if s == t { 2.0 * hv - 1.0 } else { hv - 0.5 };
        let p2 = 1.0 / (1.0 + end_exp);
        let upper = self.outer.integrate(0.0, 1.0, |x| {
            half * p2 * x.powf(p2 - 1.0) * prod(m - half * x.powf(p2))
        });
        Ok(lower + upper)
    }
}

/// One-shot kernel evaluation. Builds (and calibrates) a fresh [`FbmKernel`];
/// reuse the struct when evaluating many points.
pub fn fbm_kernel_k(t: f64, r: f64, hurst: HurstParam, quad_points: usize) -> Result<f64> {
    FbmKernel::new(hurst, quad_points)?.eval(t, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::fbm_covariance;

    fn h(v: f64) -> HurstParam {
        HurstParam::new(v).unwrap()
    }

    // c_H from the Mandelbrot–Van Ness normalization, used only as a
    // cross-check of the calibration.
    fn closed_form_c_h(hv: f64) -> f64 {
        use statrs::function::beta::beta;
        (hv * (2.0 * hv - 1.0) / beta(2.0 - 2.0 * hv, hv - 0.5)).sqrt()
    }

    #[test]
    fn rejects_rough_regime_and_bad_points() {
        assert!(matches!(
            FbmKernel::new(h(0.5), 100),
            Err(crate::error::Error::UnsupportedRegime(_))
        ));
        assert!(fbm_kernel_k(1.0, 0.3, h(0.3), 100).is_err());
        let k = FbmKernel::new(h(0.75), 200).unwrap();
        assert!(matches!(k.eval(1.0, 1.0), Err(crate::error::Error::Domain(_))));
        assert!(k.eval(1.0, 1.5).is_err());
    }

    #[test]
    fn calibration_matches_closed_form() {
        for hv in [0.6, 0.75, 0.9] {
            let k = FbmKernel::new(h(hv), 2000).unwrap();
            let rel = (k.c_h() / closed_form_c_h(hv) - 1.0).abs();
            assert!(rel < 1e-4, "H={hv}: {} vs {}", k.c_h(), closed_form_c_h(hv));
        }
    }

    #[test]
    fn vanishes_on_shrinking_interval() {
        let k = FbmKernel::new(h(0.75), 1000).unwrap();
        let a = k.eval(0.5 + 1e-4, 0.5).unwrap();
        let b = k.eval(0.5 + 1e-8, 0.5).unwrap();
        // K(r + δ, r) ~ δ^{H−½}
        assert!((a / b / 10.0 - 1.0).abs() < 0.01, "{a} {b}");
        assert!(k.eval(0.5 + 1e-15, 0.5).unwrap() < b / 50.0);
    }

    #[test]
    fn reconstruction_matches_covariance() {
        let k = FbmKernel::new(h(0.75), 10_000).unwrap();
        assert!(k.eval(1.0, 0.5).unwrap() > 0.0);
        for (s, t) in [(0.25, 1.0), (0.5, 1.0), (1.0, 1.0), (0.3, 0.7), (1.0, 2.0)] {
            let rec = k.reconstruct_covariance(s, t).unwrap();
            let exact = fbm_covariance(s, t, h(0.75)).unwrap();
            assert!((rec / exact - 1.0).abs() < 1e-3, "({s},{t}): {rec} vs {exact}");
        }
        let k6 = FbmKernel::new(h(0.6), 2000).unwrap();
        assert!((k6.reconstruct_covariance(1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }
}
