//! Doubling search for the constants `(K, T)` on the realized draw.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operators::{LipschitzMajorant, System};
use super::partition::{partition, BlockPartition};
use crate::error::{Error, Result};
use crate::local_map::LocalChart;
use crate::numeric::sup_norm;
use crate::stochastic::{target::build_target, GaussianDraw, TargetSequence, Weight, TARGET_BOUND};

/// Default contraction level: just below `min(γ₁, γ₂)/4`.
pub fn default_tau(chart: &LocalChart) -> f64 {
    0.9 * chart.gamma1.min(chart.gamma2) / 4.0
}

/// Inputs of the parameter search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionSettings {
    /// Initial block spacing.
    pub t0: i64,
    /// Override for `τ`; must not exceed `min(γ₁, γ₂)/4`.
    pub tau: Option<f64>,
    pub max_doublings: usize,
}

impl Default for SelectionSettings {
    fn default() -> Self {
        Self { t0: 100, tau: None, max_doublings: 40 }
    }
}

/// One `(K, T)` candidate and the bounds measured for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterTrial {
    pub k: f64,
    pub t: i64,
    pub selected_blocks: usize,
    pub target_norm: f64,
    /// `‖V W⁻¹η‖_∞`, when `η` was admissible.
    pub v_of_initial: Option<f64>,
    pub lipschitz: Option<LipschitzMajorant>,
    pub accepted: bool,
    pub note: String,
}

/// Accepted constants with the system and target they produce.
#[derive(Debug, Clone)]
pub struct Selection {
    pub tau: f64,
    pub k: f64,
    pub t: i64,
    pub partition: BlockPartition,
    pub target: TargetSequence,
    pub system: System,
    /// `W⁻¹η`.
    pub initial: Vec<Complex64>,
    pub v_of_initial: f64,
    pub lipschitz: LipschitzMajorant,
    pub trials: Vec<ParameterTrial>,
}

/// Starts from `K = max(1, 2C_ζ)`, `T = t0` and doubles `K` or `T` until
/// `‖η‖ ≤ 3/4`, `‖VW⁻¹η‖ ≤ τ` and the Lipschitz majorant of `V` is at most `τ`.
/// `T` is doubled when the block-to-block part of the majorant exceeds `τ/2`,
/// otherwise `K`.
pub fn select_parameters(
    draw: &GaussianDraw,
    w: &Weight,
    chart: &LocalChart,
    settings: SelectionSettings,
) -> Result<Selection> {
    let cap = chart.gamma1.min(chart.gamma2) / 4.0;
    let tau = match settings.tau {
        Some(t) if !(t > 0.0 && t < cap) => {
            return Err(Error::Config(format!("tau = {t} must lie in (0, {cap})")));
        }
        Some(t) => t,
        None => default_tau(chart),
    };
    let mut k = (2.0 * draw.c_zeta()).max(1.0);
    let mut t = settings.t0;
    let mut trials = Vec::new();
    let mut current: Option<(i64, BlockPartition)> = None;
    for _ in 0..=settings.max_doublings {
        let part = match &current {
            Some((ct, p)) if *ct == t => p.clone(),
            _ => partition(draw, w, chart, t)?,
        };
        current = Some((t, part.clone()));
        let eta = build_target(draw, w, &part, k);
        let norm = eta.sup_norm();
        let mut trial = ParameterTrial {
            k,
            t,
            selected_blocks: part.selected().len(),
            target_norm: norm,
            v_of_initial: None,
            lipschitz: None,
            accepted: false,
            note: String::new(),
        };
        if norm > TARGET_BOUND {
            trial.note = "target too large; doubling K".into();
            trials.push(trial);
            k *= 2.0;
            continue;
        }
        let system = System::new(part.clone(), w.clone(), chart.clone(), k)?;
        let initial = system.invert_w(&eta.values)?;
        let v0 = sup_norm(&system.apply_v(&initial));
        let lip = system.lipschitz_majorant();
        trial.v_of_initial = Some(v0);
        trial.lipschitz = Some(lip);
        if v0 <= tau && lip.total <= tau {
            trial.accepted = true;
            trial.note = "accepted".into();
            trials.push(trial);
            return Ok(Selection {
                tau,
                k,
                t,
                partition: part,
                target: eta,
                system,
                initial,
                v_of_initial: v0,
                lipschitz: lip,
                trials,
            });
        }
        if lip.block_part > tau / 2.0 {
            trial.note = "block interaction too strong; doubling T".into();
            t *= 2;
        } else {
            trial.note = "bounds above tau; doubling K".into();
            k *= 2.0;
        }
        trials.push(trial);
    }
    Err(Error::ParameterSearchExhausted { trials: trials.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_map::RealDipole;
    use crate::stochastic::{sample, Mode};
    use std::sync::Arc;

    fn setup() -> (Weight, LocalChart) {
        (Weight::power_law(0.75).unwrap(), LocalChart::with_default_radii(Arc::new(RealDipole)))
    }

    #[test]
    fn accepted_constants_satisfy_bounds() {
        let (w, chart) = setup();
        let d = sample(1, Mode::Real, 400, 3);
        let sel = select_parameters(&d, &w, &chart, SelectionSettings::default()).unwrap();
        assert!(sel.k >= 2.0 * d.c_zeta());
        assert!(sel.target.sup_norm() <= TARGET_BOUND);
        assert!(sel.v_of_initial <= sel.tau && sel.lipschitz.total <= sel.tau);
        assert!(sel.trials.last().unwrap().accepted);
        // Halving the accepted K breaks at least one bound.
        let half = System::new(sel.partition.clone(), w.clone(), chart.clone(), sel.k / 2.0).unwrap();
        let eta = build_target(&d, &w, &sel.partition, sel.k / 2.0);
        let v0 = half.invert_w(&eta.values).map(|a| sup_norm(&half.apply_v(&a))).unwrap_or(f64::INFINITY);
        assert!(eta.sup_norm() > TARGET_BOUND || v0 > sel.tau || half.lipschitz_majorant().total > sel.tau);
    }

    #[test]
    fn zero_draw_needs_only_the_majorant() {
        let (w, chart) = setup();
        let d = GaussianDraw::zero(Mode::Real, 200, 3);
        let sel = select_parameters(&d, &w, &chart, SelectionSettings::default()).unwrap();
        assert_eq!(sel.trials[0].k, 1.0);
        assert_eq!(sel.trials[0].v_of_initial, Some(0.0));
        assert_eq!(sel.v_of_initial, 0.0);
    }

    #[test]
    fn tau_override_is_checked() {
        let (w, chart) = setup();
        let d = GaussianDraw::zero(Mode::Real, 50, 3);
        let s = SelectionSettings { tau: Some(1.0), ..Default::default() };
        assert!(matches!(select_parameters(&d, &w, &chart, s), Err(Error::Config(_))));
    }
}
