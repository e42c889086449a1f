//! Normalized target sequence `η`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GaussianDraw, Weight};
use crate::error::{Error, Result};
use crate::numeric::sup_norm;
use crate::solver::{BlockPartition, Membership};

/// Admissible sup norm of the target.
pub const TARGET_BOUND: f64 = 0.75;

/// Which rule produced an entry of `η`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntryRule {
    /// `η_m = ζ_m / (K(m²+1))`.
    Singleton,
    /// `η_m = ζ_m ω(m) / ω(Tn)` for `m ∈ Δ_n`.
    Block { n: i64 },
}

/// `η` on the partition window together with per-entry provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSequence {
    pub values: Vec<Complex64>,
    pub rules: Vec<EntryRule>,
}

impl TargetSequence {
    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }
}

/// Builds `η` without checking its norm.
pub(crate) fn build_target(draw: &GaussianDraw, w: &Weight, partition: &BlockPartition, k: f64) -> TargetSequence {
    let h = partition.half_width();
    let mut values = Vec::with_capacity(partition.len());
    let mut rules = Vec::with_capacity(partition.len());
    for m in -h..=h {
        let z = draw.get(m);
        match partition.membership(m) {
            Membership::Singleton => {
                values.push(z / (k * ((m * m) as f64 + 1.0)));
                rules.push(EntryRule::Singleton);
            }
            Membership::Block { n, .. } => {
                values.push(z * (w.at(m) / w.at(partition.t() * n)));
                rules.push(EntryRule::Block { n });
            }
        }
    }
    TargetSequence { values, rules }
}

/// Builds `η` and rejects it when `‖η‖_∞ > 3/4`, which signals `K` too small.
pub fn target_sequence(draw: &GaussianDraw, w: &Weight, partition: &BlockPartition, k: f64) -> Result<TargetSequence> {
    let eta = build_target(draw, w, partition, k);
    let norm = eta.sup_norm();
    if norm > TARGET_BOUND {
        return Err(Error::TargetTooLarge { norm, bound: TARGET_BOUND });
    }
    Ok(eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::Mode;

    #[test]
    fn zero_draw_gives_zero_target() {
        let d = GaussianDraw::zero(Mode::Real, 20, 3);
        let w = Weight::power_law(0.75).unwrap();
        let p = BlockPartition::singletons_only(23, 100);
        let eta = target_sequence(&d, &w, &p, 1.0).unwrap();
        assert!(eta.values.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn singleton_formula() {
        let mut d = GaussianDraw::zero(Mode::Real, 20, 3);
        let k = 4.0;
        let m = 3;
        d.set_values(&[(m, Complex64::new(k * 10.0 / 2.0, 0.0))]);
        let w = Weight::power_law(0.75).unwrap();
        let p = BlockPartition::singletons_only(23, 100);
        let eta = target_sequence(&d, &w, &p, k).unwrap();
        assert_eq!(eta.values[(m + 23) as usize].re, 0.5);
    }

    #[test]
    fn oversized_target_rejected() {
        let mut d = GaussianDraw::zero(Mode::Real, 20, 3);
        d.set_values(&[(0, Complex64::new(5.0, 0.0))]);
        let w = Weight::power_law(0.75).unwrap();
        let p = BlockPartition::singletons_only(23, 100);
        assert!(matches!(target_sequence(&d, &w, &p, 1.0), Err(Error::TargetTooLarge { .. })));
        assert!(target_sequence(&d, &w, &p, 2.0 * d.c_zeta()).is_ok());
    }
}
