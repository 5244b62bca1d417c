//! Compactly supported probability measures on GL(d).

mod atomic;
mod constants;
mod sampler;
mod topology;

pub use atomic::{AtomicMatrixMeasure, MatrixLaw};
pub use constants::{support_constants, SupportConstants};
pub use sampler::{convolution_power, smooth, Convolution, MatrixSampler, DEFAULT_CONVOLUTION_CAP};
pub use topology::topology_distance;
