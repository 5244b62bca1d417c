//! Vertical angles and projections, their stabilized and cut-off forms,
//! homogeneous flag measures, and Monte Carlo drift probes.

mod functions;
mod homogeneous;
mod params;
mod probe;

pub use functions::{
    cutoff_psi, psi_hat, psi_r, stabilized, vertical_angle_1, vertical_angle_r, vertical_projection_1,
    vertical_projection_r, Stabilized,
};
pub use homogeneous::{sample_homogeneous_flag, sample_homogeneous_flag_with, spreading_out, HomogeneousSample, TauProfile};
pub use params::MargulisParams;
pub(crate) use probe::{log_uniform, subspace_near};
pub use probe::{drift_probe, drift_trend, repeller_probe, DriftReport, ProbeConfig};
