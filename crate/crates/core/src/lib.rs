//! Lyapunov spectra of random matrix products, stationary measures on
//! projective, Grassmann and flag spaces, finite Markov-operator tools and
//! Margulis-function drift diagnostics.
//!
//! ```
//! use lyap_core::lyapunov::{full_spectrum_qr, McConfig};
//! use lyap_core::measures::AtomicMatrixMeasure;
//!
//! let nu = AtomicMatrixMeasure::from_json_str(
//!     r#"{"dim": 2, "atoms": [{"p": 0.5, "A": [2, 0, 0, 0.5]}, {"p": 0.5, "A": [0, 1, 1, 0]}]}"#,
//! )?;
//! let est = full_spectrum_qr(&nu, &McConfig::new(2_000, 4, 42))?;
//! assert!(est.values[0] >= est.values[1]);
//! # Ok::<(), lyap_core::Error>(())
//! ```

pub mod error;
pub mod experiments;
pub mod linalg;
pub mod margulis;
pub mod markov;
pub mod parallel;
pub mod rng;
pub mod stationary;
pub mod stats;

pub use error::{Error, Result};
pub mod lyapunov;
pub mod measures;
pub mod transport;
