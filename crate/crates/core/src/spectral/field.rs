use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::fbm::{real_basis_mode, QFbmField, RealBasisMode};

/// A real function on `[0, 2π]` stored as Fourier coefficients `c_k`,
/// `k = −N..=N`, in the unitary basis `e^{ikx}/√(2π)`. The `L²` norm of the
/// function is the `ℓ²` norm of the coefficients.
///
/// Only the modes `k ≥ 0` are independent; setters keep
/// `c_{−k} = conj(c_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    coeffs: Vec<Complex64>,
}

impl Field {
    pub fn zeros(n: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); 2 * n + 1] }
    }

    /// Builds a field from coefficients of the nonnegative modes
    /// `c_0, c_1, …, c_N`. The imaginary part of `c_0` is discarded.
    pub fn from_nonnegative(c: &[Complex64]) -> Self {
        assert!(!c.is_empty());
        let mut f = Self::zeros(c.len() - 1);
        for (k, &z) in c.iter().enumerate() {
            f.set(k as i64, z);
        }
        f
    }

    /// Truncation `N`.
    #[inline]
    pub fn modes(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    #[inline]
    pub fn get(&self, k: i64) -> Complex64 {
        let n = self.modes() as i64;
        if k.abs() > n {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(k + n) as usize]
    }

    /// Sets `c_k` and `c_{−k} = conj(c_k)`.
    pub fn set(&mut self, k: i64, z: Complex64) {
        let n = self.modes() as i64;
        assert!(k.abs() <= n, "mode {k} outside truncation {n}");
        if k == 0 {
            self.coeffs[n as usize] = Complex64::new(z.re, 0.0);
        } else {
            self.coeffs[(n + k) as usize] = z;
            self.coeffs[(n - k) as usize] = z.conj();
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Raw access; callers must preserve Hermitian symmetry.
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.modes() as i64;
        (0..=n).all(|k| (self.get(k) - self.get(-k).conj()).norm() <= tol)
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `L²(0, 2π)` inner product, `Re Σ c_k conj(d_k)`.
    pub fn inner(&self, other: &Field) -> f64 {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a * b.conj()).re).sum()
    }

    pub fn scale(&mut self, s: f64) {
        for z in &mut self.coeffs {
            *z *= s;
        }
    }

    pub fn scaled(&self, s: f64) -> Field {
        let mut f = self.clone();
        f.scale(s);
        f
    }

    /// `self += a · x`.
    pub fn axpy(&mut self, a: f64, x: &Field) {
        debug_assert_eq!(self.coeffs.len(), x.coeffs.len());
        for (y, x) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += a * x;
        }
    }

    pub fn sub(&self, other: &Field) -> Field {
        let mut f = self.clone();
        f.axpy(-1.0, other);
        f
    }

    pub fn add(&self, other: &Field) -> Field {
        let mut f = self.clone();
        f.axpy(1.0, other);
        f
    }

    /// `‖self − other‖` without allocating.
    pub fn dist(&self, other: &Field) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Copy onto a different truncation, dropping or zero-padding modes.
    pub fn resized(&self, n: usize) -> Field {
        let mut f = Field::zeros(n);
        let m = n.min(self.modes()) as i64;
        for k in 0..=m {
            f.set(k, self.get(k));
        }
        f
    }

    /// Point value `Σ c_k e^{ikx}/√(2π)`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.modes() as i64;
        let mut s = self.get(0).re;
        for k in 1..=n {
            let e = Complex64::from_polar(1.0, k as f64 * x);
            s += 2.0 * (self.get(k) * e).re;
        }
        s / (2.0 * PI).sqrt()
    }

    /// Coordinates in the real orthonormal basis `1/√(2π)`, `cos(jx)/√π`,
    /// `sin(jx)/√π` (the ordering of the noise modes). Length `2N+1`,
    /// same Euclidean norm as the field.
    pub fn real_coords(&self) -> Vec<f64> {
        let n = self.modes();
        let mut out = Vec::with_capacity(2 * n + 1);
        out.push(self.get(0).re);
        for j in 1..=n as i64 {
            let c = self.get(j);
            out.push(std::f64::consts::SQRT_2 * c.re);
            out.push(-std::f64::consts::SQRT_2 * c.im);
        }
        out
    }

    /// Inverse of [`Field::real_coords`]; `coords[i]` belongs to noise mode
    /// `i + 1`. Missing trailing coordinates are zero.
    pub fn from_real_coords(n: usize, coords: &[f64]) -> Result<Field> {
        ensure!(
            coords.len() <= 2 * n + 1,
            Domain,
            "{} real modes do not fit into truncation N = {n}",
            coords.len()
        );
        let mut f = Field::zeros(n);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (i, &v) in coords.iter().enumerate() {
            match real_basis_mode(i + 1) {
                RealBasisMode::Constant => f.set(0, Complex64::new(v, 0.0)),
                RealBasisMode::Cos(j) => {
                    let c = f.get(j as i64);
                    f.set(j as i64, Complex64::new(c.re + s * v, c.im));
                }
                RealBasisMode::Sin(j) => {
                    let c = f.get(j as i64);
                    f.set(j as i64, Complex64::new(c.re, c.im - s * v));
                }
            }
        }
        Ok(f)
    }

    /// `W(t_i)` of a Q-fBm as a field on truncation `n`.
    pub fn from_noise(noise: &QFbmField, i: usize, n: usize) -> Result<Field> {
        let coords: Vec<f64> = (0..noise.modes()).map(|k| noise.value(k, i)).collect();
        Field::from_real_coords(n, &coords)
    }

    /// Columns `mode,re,im` for `k = −N..=N`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "mode,re,im")?;
        let n = self.modes() as i64;
        for k in -n..=n {
            let c = self.get(k);
            writeln!(w, "{k},{},{}", c.re, c.im)?;
        }
        Ok(())
    }
}
