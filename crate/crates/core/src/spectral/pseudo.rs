use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Field;

/// Pseudospectral evaluation of `F(u, v, w) = −u v w` for fields of
/// truncation `N` on `M = 4N + 2` points, enough for the product of three
/// degree-`N` polynomials to be resolved without aliasing into `|k| ≤ N`.
///
/// Holds plans and scratch; one instance per thread.
pub struct CubicProduct {
    n: usize,
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    bufs: [Vec<Complex64>; 3],
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for CubicProduct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CubicProduct").field("n", &self.n).field("m", &self.m).finish()
    }
}

impl CubicProduct {
    pub fn new(n: usize) -> Self {
        let m = 4 * n + 2;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        let zero = Complex64::new(0.0, 0.0);
        Self {
            n,
            m,
            fwd,
            inv,
            bufs: [vec![zero; m], vec![zero; m], vec![zero; m]],
            scratch: vec![zero; len],
        }
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn grid_points(&self) -> usize {
        self.m
    }

    fn to_grid(&mut self, slot: usize, f: &Field) {
        assert_eq!(f.modes(), self.n, "field truncation does not match the product");
        let (m, n) = (self.m, self.n as i64);
        let buf = &mut self.bufs[slot];
        buf.fill(Complex64::new(0.0, 0.0));
        for k in -n..=n {
            buf[k.rem_euclid(m as i64) as usize] = f.get(k);
        }
        self.inv.process_with_scratch(buf, &mut self.scratch);
        let s = (2.0 * PI).sqrt().recip();
        for z in buf.iter_mut() {
            *z = Complex64::new(z.re * s, 0.0);
        }
    }

    fn from_grid(&mut self, out: &mut Field) {
        let buf = &mut self.bufs[0];
        self.fwd.process_with_scratch(buf, &mut self.scratch);
        let s = (2.0 * PI).sqrt() / self.m as f64;
        for k in 0..=self.n {
            out.set(k as i64, buf[k] * s);
        }
    }

    /// Physical-space samples `u(2πj/M)`.
    pub fn grid_values(&mut self, f: &Field) -> Vec<f64> {
        self.to_grid(1, f);
        self.bufs[1].iter().map(|z| z.re).collect()
    }

    /// `F(u, u, u) = −u³`, written into `out`.
    pub fn cube_into(&mut self, u: &Field, out: &mut Field) {
        self.to_grid(0, u);
        for z in self.bufs[0].iter_mut() {
            z.re = -z.re * z.re * z.re;
        }
        self.from_grid(out);
    }

    pub fn cube(&mut self, u: &Field) -> Field {
        let mut out = Field::zeros(self.n);
        self.cube_into(u, &mut out);
        out
    }

    /// The symmetric trilinear form `F(u, v, w) = −u v w`.
    pub fn apply(&mut self, u: &Field, v: &Field, w: &Field) -> Field {
        self.to_grid(0, u);
        self.to_grid(1, v);
        self.to_grid(2, w);
        let [a, b, c] = &mut self.bufs;
        for ((x, y), z) in a.iter_mut().zip(b.iter()).zip(c.iter()) {
            x.re = -x.re * y.re * z.re;
        }
        let mut out = Field::zeros(self.n);
        self.from_grid(&mut out);
        out
    }
}

/// One-off `F(u, v, w)`; for repeated use keep a [`CubicProduct`].
pub fn apply_f(u: &Field, v: &Field, w: &Field) -> Field {
    CubicProduct::new(u.modes()).apply(u, v, w)
}
