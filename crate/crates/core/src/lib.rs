//! Simulation and verification toolkit for amplitude equations of SPDEs
//! with additive fractional noise.
//!
//! The pipeline: sample Q-fBm noise ([`fbm`]), integrate the full equation
//! on a Fourier-diagonal operator ([`spectral`], [`spde`]), build the
//! reduced slow/fast approximation on the same noise ([`amplitude`]) and
//! measure errors, residuals and Hölder scalings ([`holder`], [`harness`]).

pub mod amplitude;
pub mod config;
pub mod error;
pub mod fbm;
pub mod harness;
pub mod holder;
pub mod numerics;
pub mod rng;
pub mod spde;
pub mod spectral;

pub use error::{Error, Result};
