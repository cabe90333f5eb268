use crate::fbm::HurstParam;

/// Order `γ(H)` of the approximation error: 3 for `H ≥ ½`, `(1+H)/(1−H)`
/// below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaExponent {
    pub hurst: HurstParam,
    pub gamma: f64,
}

impl GammaExponent {
    /// `1 + 2H + 2H²/(1−H)`, the same number written as the sum of the
    /// noise order and the gain from the Young estimate.
    pub fn long_form(self) -> f64 {
        let h = self.hurst.value();
        if h >= 0.5 {
            3.0
        } else {
            1.0 + 2.0 * h + 2.0 * h * h / (1.0 - h)
        }
    }
}

pub fn gamma_exponent(hurst: HurstParam) -> GammaExponent {
    let h = hurst.value();
    let gamma = if h >= 0.5 { 3.0 } else { (1.0 + h) / (1.0 - h) };
    GammaExponent { hurst, gamma }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(h: f64) -> f64 {
        gamma_exponent(HurstParam::new(h).unwrap()).gamma
    }

    #[test]
    fn values() {
        assert_eq!(g(0.5), 3.0);
        assert_eq!(g(0.9), 3.0);
        assert!((g(0.25) - 5.0 / 3.0).abs() < 1e-15);
        assert!((g(0.3) - 13.0 / 7.0).abs() < 1e-15);
        let e = gamma_exponent(HurstParam::new(0.25).unwrap());
        assert!((e.long_form() - (1.0 + 0.5 + 0.125 / 0.75)).abs() < 1e-15);
    }

    #[test]
    fn continuous_at_one_half() {
        assert!((g(0.5 - 1e-12) - 3.0).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn identities_below_one_half(h in 0.001f64..0.5) {
            let e = gamma_exponent(HurstParam::new(h).unwrap());
            prop_assert!((e.gamma - e.long_form()).abs() < 1e-12);
            prop_assert!(e.gamma > 1.0 + 2.0 * h);
            prop_assert!(e.gamma < 3.0);
        }
    }
}
