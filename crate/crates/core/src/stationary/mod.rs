//! Stationary measures on projective, Grassmann and flag spaces, the
//! Furstenberg integral, invariant subspaces, equators and block forms.

mod block;
mod empirical;
mod invariant;
mod space;

pub use block::{block_decompose, BlockDecomposition};
pub use empirical::{
    furstenberg_integral, push_measure, push_measure_pruned, stationary_estimate, wasserstein, EmpiricalMeasure,
    stationary_estimate_from, PruneOptions, StationaryEstimate, StationaryOptions,
};
pub use invariant::{equator_detect, invariant_residual, invariant_subspace_search, restricted_measure, CandidateRow, EquatorReport};
pub use space::SpacePoint;
