//! Residuals, pathwise errors and the Monte Carlo studies built on them.

mod gamma;
mod moments;
mod omega;
mod residual;
mod scaling;

pub use gamma::{gamma_exponent, GammaExponent};
pub use moments::{
    cell_weights, convolution_moment_check, singular_exp_integral, MomentConfig, MomentReport,
    MomentRow, PLATEAU_GAP, PLATEAU_SPREAD,
};
pub use omega::{
    omega_beta, omega_event_monitor, omega_sample, OmegaConfig, OmegaReport, OmegaSample,
    OMEGA_NOISE_SCALE,
};
pub use residual::{
    residual_c, residual_orders, residual_s, ResidualC, ResidualOrders, RESIDUAL_RATIO,
};
pub use scaling::{
    pathwise_error, replica_error, scaling_study, slope_acceptable, sup_distance, ReplicaError,
    ScalingConfig, ScalingReport, ScalingRow,
};
