//! Block partition, operators `W` and `V`, parameter selection, the
//! fixed-point iteration and assembly of the Cauchy-kernel interpolant.

mod fixed_point;
mod kernel_sum;
mod operators;
mod params;
mod partition;

pub use fixed_point::{solve, CoefState};
pub use kernel_sum::{CauchyKernelSum, KernelTerm, PoleSource};
pub use operators::{LipschitzMajorant, System};
pub use params::{default_tau, select_parameters, ParameterTrial, Selection, SelectionSettings};
pub use partition::{
    candidate_blocks, normalized_triple, partition, plant_blocks, selection_probability_mc, BlockPartition,
    Membership,
};
