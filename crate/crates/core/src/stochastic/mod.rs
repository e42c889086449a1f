//! Weights, Gaussian draws and the normalized target sequence.

mod draw;
pub(crate) mod target;
mod weight;

pub use draw::{sample, sample_index_order, GaussianDraw, Mode};
pub use target::{target_sequence, EntryRule, TargetSequence, TARGET_BOUND};
pub use weight::{validate_weight, PowerLaw, Weight, WeightFamily, WeightRegistry, WeightReport};
