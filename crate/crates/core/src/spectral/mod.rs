//! Fourier-diagonal operators on the periodic interval `[0, 2π]`.

mod field;
mod pseudo;
mod sign;

pub use field::Field;
pub use pseudo::{apply_f, CubicProduct};
pub use sign::{check_sign_conditions, SignReport};

use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `L = ∂²ₓ`, eigenvalues `−k²`, kernel: constants.
    LaplacianPeriodic,
    /// `L = −(1 + ∂²ₓ)²`, eigenvalues `−(1 − k²)²`, kernel: `sin`, `cos`.
    SwiftHohenberg,
}

impl Preset {
    pub fn eigenvalue(self, k: i64) -> f64 {
        let k2 = (k * k) as f64;
        match self {
            Preset::LaplacianPeriodic => -k2,
            Preset::SwiftHohenberg => -(1.0 - k2) * (1.0 - k2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::LaplacianPeriodic => "laplacian",
            Preset::SwiftHohenberg => "swift-hohenberg",
        }
    }

    /// Largest wavenumber in the kernel.
    pub fn kernel_top(self) -> usize {
        match self {
            Preset::LaplacianPeriodic => 0,
            Preset::SwiftHohenberg => 1,
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "laplacian" => Ok(Preset::LaplacianPeriodic),
            "swift-hohenberg" | "sh" => Ok(Preset::SwiftHohenberg),
            other => Err(Error::Config(format!(
                "unknown preset '{other}' (expected laplacian|swift-hohenberg)"
            ))),
        }
    }
}

/// Diagonal operator `L`, the perturbation `A` and the cubic `F` on a
/// Fourier truncation `|k| ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSystem {
    pub preset: Preset,
    pub modes: usize,
    /// `λ_k` at index `k + N`.
    pub eigenvalues: Vec<f64>,
    pub kernel_idx: Vec<i64>,
    pub mu: f64,
    pub nu: f64,
    /// Diagonal of `A` at index `k + N`; `ν` everywhere unless a
    /// multiplier was supplied.
    pub a_diag: Vec<f64>,
    pub domain_length: f64,
}

impl SpectralSystem {
    pub fn new(preset: Preset, modes: usize, nu: f64) -> Result<Self> {
        ensure!(
            modes >= 2,
            Domain,
            "truncation must hold at least one stable mode above the kernel, got N = {modes}"
        );
        ensure!(nu.is_finite(), Domain, "nu must be finite");
        let n = modes as i64;
        let eigenvalues: Vec<f64> = (-n..=n).map(|k| preset.eigenvalue(k)).collect();
        let kernel_idx: Vec<i64> = (-n..=n).filter(|&k| preset.eigenvalue(k) == 0.0).collect();
        let mu = eigenvalues.iter().filter(|l| **l != 0.0).map(|l| -l).fold(f64::INFINITY, f64::min);
        Ok(Self {
            preset,
            modes,
            eigenvalues,
            kernel_idx,
            mu,
            nu,
            a_diag: vec![nu; 2 * modes + 1],
            domain_length: 2.0 * PI,
        })
    }

    /// Replaces `A = ν·Id` by `A φ_k = ν m_k φ_k` with `m_{−k} = m_k`;
    /// `multiplier[k]` is given for `k = 0..=N`.
    pub fn with_a_multiplier(mut self, multiplier: &[f64]) -> Result<Self> {
        ensure!(
            multiplier.len() == self.modes + 1,
            Domain,
            "A multiplier needs N+1 = {} entries, got {}",
            self.modes + 1,
            multiplier.len()
        );
        let n = self.modes as i64;
        for k in -n..=n {
            self.a_diag[(k + n) as usize] = self.nu * multiplier[k.unsigned_abs() as usize];
        }
        Ok(self)
    }

    #[inline]
    pub fn eigenvalue(&self, k: i64) -> f64 {
        self.eigenvalues[(k + self.modes as i64) as usize]
    }

    #[inline]
    pub fn is_kernel(&self, k: i64) -> bool {
        self.eigenvalue(k) == 0.0
    }

    /// Zero field of the right truncation.
    pub fn zero_field(&self) -> Field {
        Field::zeros(self.modes)
    }

    fn check(&self, f: &Field) {
        assert_eq!(f.modes(), self.modes, "field truncation does not match the system");
    }

    pub fn project_c(&self, f: &Field) -> Field {
        self.check(f);
        let mut out = f.clone();
        for (z, l) in out.coeffs_mut().iter_mut().zip(&self.eigenvalues) {
            if *l != 0.0 {
                *z = Default::default();
            }
        }
        out
    }

    pub fn project_s(&self, f: &Field) -> Field {
        self.check(f);
        let mut out = f.clone();
        for (z, l) in out.coeffs_mut().iter_mut().zip(&self.eigenvalues) {
            if *l == 0.0 {
                *z = Default::default();
            }
        }
        out
    }

    /// `e^{tL} f`.
    pub fn semigroup(&self, f: &Field, t: f64) -> Result<Field> {
        ensure!(t >= 0.0, Domain, "semigroup time must be nonnegative, got {t}");
        self.check(f);
        let mut out = f.clone();
        self.apply_diag(&mut out, &self.decay_factors(t));
        Ok(out)
    }

    /// `e^{tλ_k}` per index.
    pub fn decay_factors(&self, t: f64) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| (l * t).exp()).collect()
    }

    /// Multiplies coefficient `i` by `d[i]`.
    pub fn apply_diag(&self, f: &mut Field, d: &[f64]) {
        for (z, s) in f.coeffs_mut().iter_mut().zip(d) {
            *z *= *s;
        }
    }

    pub fn apply_a(&self, f: &Field) -> Field {
        self.check(f);
        let mut out = f.clone();
        self.apply_diag(&mut out, &self.a_diag);
        out
    }

    /// `‖(Id − L)^α f‖`.
    pub fn frac_power_norm(&self, f: &Field, alpha: f64) -> Result<f64> {
        ensure!((0.0..1.0).contains(&alpha), Domain, "alpha must lie in [0, 1), got {alpha}");
        self.check(f);
        Ok(f.coeffs()
            .iter()
            .zip(&self.eigenvalues)
            .map(|(z, l)| (1.0 - l).powf(2.0 * alpha) * z.norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// A [`CubicProduct`] on the full truncation.
    pub fn cubic(&self) -> CubicProduct {
        CubicProduct::new(self.modes)
    }

    /// A [`CubicProduct`] just large enough for kernel-only fields, see
    /// [`SpectralSystem::to_kernel`].
    pub fn kernel_cubic(&self) -> CubicProduct {
        CubicProduct::new(self.preset.kernel_top())
    }

    /// Restriction of `P_c f` to the kernel truncation.
    pub fn to_kernel(&self, f: &Field) -> Field {
        self.project_c(f).resized(self.preset.kernel_top())
    }

    /// Embeds a kernel-truncation field back into the full truncation.
    pub fn from_kernel(&self, a: &Field) -> Field {
        a.resized(self.modes)
    }

    /// `P_c F(a)` for `a ∈ N` given on the kernel truncation.
    pub fn kernel_cube(&self, prod: &mut CubicProduct, a: &Field) -> Field {
        let f = prod.cube(a);
        self.project_kernel_small(&f)
    }

    /// Zeroes the non-kernel modes of a kernel-truncation field.
    pub fn project_kernel_small(&self, f: &Field) -> Field {
        let mut out = f.clone();
        for k in 0..=f.modes() as i64 {
            if self.preset.eigenvalue(k) != 0.0 {
                out.set(k, Default::default());
            }
        }
        out
    }

    /// `A_c a` on the kernel truncation.
    pub fn kernel_a(&self, a: &Field) -> Field {
        let mut out = a.clone();
        for k in 0..=a.modes() as i64 {
            let m = self.a_diag[(k + self.modes as i64) as usize];
            out.set(k, a.get(k) * m);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn cos_mode(n: usize, k: i64, amp: f64) -> Field {
        let mut f = Field::zeros(n);
        f.set(k, Complex64::new(amp * (2.0 * PI).sqrt() / 2.0, 0.0));
        f
    }

    #[test]
    fn presets() {
        let lap = SpectralSystem::new(Preset::LaplacianPeriodic, 8, 1.0).unwrap();
        assert_eq!(lap.kernel_idx, vec![0]);
        assert_eq!(lap.mu, 1.0);
        assert_eq!(lap.eigenvalue(3), -9.0);
        let sh = SpectralSystem::new(Preset::SwiftHohenberg, 8, 1.0).unwrap();
        assert_eq!(sh.kernel_idx, vec![-1, 1]);
        assert_eq!(sh.mu, 1.0);
        assert_eq!(sh.eigenvalue(2), -9.0);
        assert!(SpectralSystem::new(Preset::SwiftHohenberg, 1, 1.0).is_err());
        assert_eq!("sh".parse::<Preset>().unwrap(), Preset::SwiftHohenberg);
        assert!("heat".parse::<Preset>().is_err());
    }

    #[test]
    fn sh_projection_of_cos_plus_cos2() {
        let sh = SpectralSystem::new(Preset::SwiftHohenberg, 4, 1.0).unwrap();
        let f = cos_mode(4, 1, 1.0).add(&cos_mode(4, 2, 1.0));
        assert!(sh.project_c(&f).dist(&cos_mode(4, 1, 1.0)) < 1e-15);
        assert!(sh.project_s(&cos_mode(4, 1, 1.0)).norm() == 0.0);
    }

    #[test]
    fn frac_norm_single_mode() {
        let lap = SpectralSystem::new(Preset::LaplacianPeriodic, 4, 1.0).unwrap();
        let mut f = Field::zeros(4);
        f.set(2, Complex64::new(0.3, -0.4));
        // two coefficients of modulus 0.5, weight (1+4)^{1/2}
        let expected = 5f64.sqrt() * (2.0f64 * 0.25).sqrt();
        assert!((lap.frac_power_norm(&f, 0.5).unwrap() - expected).abs() < 1e-14);
        assert_eq!(lap.frac_power_norm(&f, 0.0).unwrap(), f.norm());
        assert!(lap.frac_power_norm(&f, 1.0).is_err());
        assert!(lap.frac_power_norm(&f, -0.1).is_err());
        let c = lap.project_c(&cos_mode(4, 0, 2.0));
        assert_eq!(lap.frac_power_norm(&c, 0.7).unwrap(), c.norm());
    }

    #[test]
    fn semigroup_basics() {
        let sh = SpectralSystem::new(Preset::SwiftHohenberg, 5, 1.0).unwrap();
        let f = cos_mode(5, 1, 1.0).add(&cos_mode(5, 3, 2.0));
        assert_eq!(sh.semigroup(&f, 0.0).unwrap(), f);
        assert!(sh.semigroup(&f, -1.0).is_err());
        let g = sh.semigroup(&f, 10.0).unwrap();
        assert_eq!(sh.project_c(&g), sh.project_c(&f));
    }

    #[test]
    fn a_multiplier() {
        let lap = SpectralSystem::new(Preset::LaplacianPeriodic, 2, 2.0)
            .unwrap()
            .with_a_multiplier(&[1.0, 0.5, 0.0])
            .unwrap();
        let f = cos_mode(2, 1, 1.0);
        assert!(lap.apply_a(&f).dist(&f) < 1e-15);
        assert!(lap.apply_a(&cos_mode(2, 2, 1.0)).norm() == 0.0);
        assert!(SpectralSystem::new(Preset::LaplacianPeriodic, 2, 1.0)
            .unwrap()
            .with_a_multiplier(&[1.0])
            .is_err());
    }

    #[test]
    fn kernel_cube_matches_full_projection() {
        for preset in [Preset::LaplacianPeriodic, Preset::SwiftHohenberg] {
            let sys = SpectralSystem::new(preset, 6, 1.0).unwrap();
            let mut f = Field::zeros(6);
            f.set(0, Complex64::new(0.8, 0.0));
            f.set(1, Complex64::new(0.3, -0.7));
            let a = sys.to_kernel(&f);
            let small = sys.kernel_cube(&mut sys.kernel_cubic(), &a);
            let full = sys.project_c(&sys.cubic().cube(&sys.from_kernel(&a)));
            assert!(sys.from_kernel(&small).dist(&full) < 1e-13, "{preset:?}");
        }
    }

    fn any_field(n: usize) -> impl Strategy<Value = Field> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n + 1).prop_map(|v| {
            let c: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            Field::from_nonnegative(&c)
        })
    }

    proptest! {
        #[test]
        fn projections(f in any_field(7), sh in any::<bool>()) {
            let preset = if sh { Preset::SwiftHohenberg } else { Preset::LaplacianPeriodic };
            let sys = SpectralSystem::new(preset, 7, 1.0).unwrap();
            let c = sys.project_c(&f);
            let s = sys.project_s(&f);
            prop_assert_eq!(c.add(&s), f.clone());
            prop_assert!(c.inner(&s).abs() < 1e-14);
            prop_assert_eq!(sys.project_c(&c), c.clone());
            prop_assert_eq!(sys.project_s(&s), s.clone());
            prop_assert!(sys.project_s(&c).norm() == 0.0);
            let t = 0.37;
            prop_assert_eq!(sys.project_s(&sys.semigroup(&f, t).unwrap()), sys.semigroup(&s, t).unwrap());
            prop_assert_eq!(sys.project_c(&sys.apply_a(&f)), sys.apply_a(&c));
        }

        #[test]
        fn semigroup_contracts_and_composes(f in any_field(6), t in 0.0f64..3.0, s in 0.0f64..3.0) {
            let sys = SpectralSystem::new(Preset::SwiftHohenberg, 6, 1.0).unwrap();
            let fs = sys.project_s(&f);
            let decayed = sys.semigroup(&fs, t).unwrap().norm();
            prop_assert!(decayed <= (-sys.mu * t).exp() * fs.norm() * (1.0 + 1e-12) + 1e-300);
            let once = sys.semigroup(&f, t + s).unwrap();
            let twice = sys.semigroup(&sys.semigroup(&f, s).unwrap(), t).unwrap();
            prop_assert!(once.dist(&twice) <= 1e-13 * (1.0 + f.norm()));
        }
    }
}
