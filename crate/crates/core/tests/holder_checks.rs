use ampeq::fbm::{generate_fbm, HurstParam, Method, Spectrum};
use ampeq::holder::{
    a3_exponent, check_convolution_identity, check_lemma_a1, check_lemma_a2, check_lemma_a3,
    epsilon_convolution, holder_norm, holder_seminorm, young_bound_check, young_sample,
    SampledFunction, YoungConfig,
};
use ampeq::spde::{fast_steps, generate_noise};
use ampeq::spectral::{Field, Preset, SpectralSystem};
use ampeq::Error;

fn h(v: f64) -> HurstParam {
    HurstParam::new(v).unwrap()
}

fn grid() -> Vec<f64> {
    (3..=7).map(|k| 2f64.powi(-k)).collect()
}

#[test]
fn convolution_rates_on_a_coarser_grid() {
    let n = 1 << 16;
    let a1 = check_lemma_a1(&SampledFunction::from_fn(n, 1.0, f64::cos).unwrap(), 0.4, &grid())
        .unwrap();
    assert!(a1.pass, "{a1:?}");
    assert!((a1.slope - 1.2).abs() < 0.3, "{}", a1.slope);
    let a2 =
        check_lemma_a2(&SampledFunction::from_fn(n, 1.0, |t| t.powf(0.4)).unwrap(), 0.4, &grid())
            .unwrap();
    assert!(a2.pass && (a2.slope - 2.0).abs() < 0.05, "{a2:?}");
}

#[test]
fn a3_on_rough_path() {
    let n = 1 << 16;
    let p = generate_fbm(h(0.35), n, 1.0 / n as f64, 11, Method::CirculantEmbedding).unwrap();
    let f = SampledFunction::scalar(p.dt, p.values).unwrap();
    let zeta = a3_exponent(0.6, 0.3, 0.9);
    assert!((zeta - 0.9 * 0.8 / 0.7).abs() < 1e-12);
    let c = check_lemma_a3(&f, 0.6, 0.3, zeta, &grid()).unwrap();
    assert!(c.pass, "{c:?}");
    // slope at least the tested exponent, up to sampling noise
    assert!(c.slope > zeta - 0.3);
}

#[test]
fn a2_needs_zero_start() {
    let f = SampledFunction::from_fn(64, 1.0, |t| 1.0 + t).unwrap();
    assert!(matches!(check_lemma_a2(&f, 0.4, &grid()), Err(Error::Precondition(_))));
}

#[test]
fn convolution_damps_with_eps() {
    let f = SampledFunction::from_fn(4096, 1.0, |t| (3.0 * t).sin() + 1.0).unwrap();
    let big = epsilon_convolution(&f, -1.0, 0.5).unwrap();
    let small = epsilon_convolution(&f, -1.0, 0.1).unwrap();
    assert!(small.sup_norm() < big.sup_norm());
    // ∫ e^{−(t−s)/ε²} f ds ≈ ε² f(t) for small ε
    let t_idx = 2048;
    let approx = 0.01 * f.data[t_idx];
    assert!((small.data[t_idx] - approx).abs() < 0.05 * approx.abs());
}

#[test]
fn holder_quotient_of_power_function() {
    // t^γ has [f]_γ = 1 attained at s = 0
    let f = SampledFunction::from_fn(1000, 1.0, |t| t.powf(0.3)).unwrap();
    assert!((holder_seminorm(&f, 0.3).unwrap() - 1.0).abs() < 1e-12);
    assert!((holder_norm(&f, 0.3).unwrap() - 2.0).abs() < 1e-12);
    assert!(holder_seminorm(&f, 0.5).unwrap() > 1.0);
}

#[test]
fn identity_is_refinement_consistent() {
    let sys = SpectralSystem::new(Preset::SwiftHohenberg, 8, 1.0).unwrap();
    let eps = 0.5;
    let mut prev = f64::INFINITY;
    for dt in [0.004, 0.002, 0.001] {
        let steps = fast_steps(eps, 1.0, dt).unwrap();
        let noise = generate_noise(&sys, h(0.6), 8, &Spectrum::PowerLaw(2.0), steps, dt, 1).unwrap();
        let c = check_convolution_identity(&sys, &noise, eps).unwrap();
        assert!(c.relative() < 1e-2);
        assert!(c.relative() < prev);
        prev = c.relative();
    }
}

#[test]
fn young_zero_amplitude_and_exponent_rule() {
    let sys = SpectralSystem::new(Preset::SwiftHohenberg, 8, 1.0).unwrap();
    let a = vec![Field::zeros(1); 10];
    let mut z = Vec::new();
    for j in 0..10 {
        let mut f = sys.zero_field();
        f.set(3, (j as f64).into());
        z.push(f);
    }
    let s = young_sample(&sys, &a, &z, 0.1, 0.6, 0.6).unwrap();
    assert_eq!(s.lhs, 0.0);
    assert!(matches!(young_sample(&sys, &a, &z, 0.1, 0.5, 0.5), Err(Error::Precondition(_))));
}

#[test]
fn young_constant_transfers_to_holdout() {
    let sys = SpectralSystem::new(Preset::SwiftHohenberg, 16, 1.0).unwrap();
    let cfg = YoungConfig {
        hurst: h(0.7),
        eps: 0.25,
        t0: 1.0,
        dt_fast: 0.01,
        noise_modes: 16,
        spectrum: Spectrum::PowerLaw(2.0),
        a0: 1.0,
        alpha_p: 0.6,
        beta_p: 0.6,
        calibration: 10,
        holdout: 20,
        margin: 2.0,
        seed: 3,
    };
    let r = young_bound_check(&sys, &cfg).unwrap();
    assert!(r.constant > 0.0);
    assert!(r.pass(), "{r:?}");
}
