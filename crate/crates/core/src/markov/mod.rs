//! Finite-state Markov operators: localization, couplings avoiding
//! rectangles, Margulis mass bounds and ν-cores of neighborhoods.

mod bound;
mod coupling;
mod kernel;
mod localize;
mod neighborhood;
pub mod random;

pub use bound::{margulis_mass_bound_check, multiplicative_to_additive, MassBoundReport};
pub use coupling::{coupling_avoiding, coupling_avoiding_many, marginals, rectangle_mass, AvoidPair, Coupling, Weight};
pub use kernel::FiniteMarkovKernel;
pub use localize::{localize_kernel, LocalizedKernel};
pub use neighborhood::{core_border, CoreClass, Neighborhood};
