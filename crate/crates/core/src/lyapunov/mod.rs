//! Monte Carlo estimation of Lyapunov spectra, Oseledets filtrations and
//! large-deviation behavior of i.i.d. random matrix products.

mod deviation;
mod filtration;
mod spectrum;

pub use deviation::{azuma_bound, binomial_tail_abs, large_deviation_probe, DeviationRow, LargeDeviationReport};
pub use filtration::{filtration_estimate, FiltrationEstimate, GrowthCheck};
pub use spectrum::{
    deterministic_spectrum, full_spectrum_qr, spectrum_via_exterior, top_exponent, McConfig, Method,
    SpectrumEstimate, SumCheck, TopExponent,
};
