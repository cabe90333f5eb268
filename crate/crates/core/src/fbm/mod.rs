//! Fractional Brownian motion: covariance, the Volterra kernel for `H > 1/2`,
//! exact path synthesis and trace-class Hilbert-space fields.

mod covariance;
mod generate;
pub mod io;
mod kernel;
mod qfbm;

pub use covariance::{
    fbm_covariance, fgn_autocovariance, increment_correlation_partial_sums,
};
pub use generate::{generate_fbm, rescale_selfsimilar, FgnSynthesizer};
pub use kernel::{fbm_kernel_k, FbmKernel};
pub use qfbm::{generate_qfbm, real_basis_mode, QFbmField, RealBasisMode, Spectrum};

use crate::error::{ensure, Result};

/// Hurst index, restricted to the open interval `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct HurstParam(f64);

impl HurstParam {
    pub fn new(value: f64) -> Result<Self> {
        ensure!(
            value > 0.0 && value < 1.0,
            Domain,
            "Hurst parameter must lie in the open interval (0, 1), got {value}"
        );
        Ok(Self(value))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for HurstParam {
    type Error = crate::error::Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

/// How a path was synthesized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    CirculantEmbedding,
    Cholesky,
}

impl Method {
    pub fn code(self) -> u8 {
        match self {
            Method::CirculantEmbedding => 0,
            Method::Cholesky => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Method::CirculantEmbedding),
            1 => Some(Method::Cholesky),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::CirculantEmbedding => "circulant",
            Method::Cholesky => "cholesky",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circulant" => Ok(Method::CirculantEmbedding),
            "cholesky" => Ok(Method::Cholesky),
            other => Err(crate::error::Error::Config(format!(
                "unknown fBm method '{other}' (expected circulant|cholesky)"
            ))),
        }
    }
}

/// A sampled scalar fBm trajectory on `t_i = i * dt`, `i = 0..=n`.
///
/// `method` records the synthesis actually used, which differs from the
/// requested one when circulant embedding fell back to Cholesky.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmPath {
    pub hurst: HurstParam,
    pub dt: f64,
    pub values: Vec<f64>,
    pub seed: u64,
    pub method: Method,
}

impl FbmPath {
    /// Number of steps `n` (the path holds `n + 1` values).
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.steps() as f64 * self.dt
    }

    pub fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }
}
