//! The iteration `α(j+1) = W⁻¹(η − Vα(j))`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operators::System;
use crate::error::{Error, Result};
use crate::numeric::{sup_dist, sup_norm};

/// Converged coefficients with the iteration trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefState {
    pub alpha: Vec<Complex64>,
    /// Number of update steps taken after the initial `W⁻¹η`.
    pub iterations: usize,
    /// `‖α(j+1) − α(j)‖_∞` for each step.
    pub steps: Vec<f64>,
    /// Ratios of consecutive step norms.
    pub ratios: Vec<f64>,
    /// `‖Wα + Vα − η‖_∞` at the returned iterate.
    pub residual: f64,
    /// Whether every iterate stayed in `E_{1,γ₁}`.
    pub in_coefficient_set: bool,
}

/// Runs the fixed-point iteration until the sup-norm step falls below `tol`.
pub fn solve(system: &System, eta: &[Complex64], tol: f64, max_iter: usize) -> Result<CoefState> {
    let fail = |step: usize, reason: String, trace: &[f64]| Error::SolverFailure { step, reason, trace: trace.to_vec() };
    let mut alpha = system.invert_w(eta).map_err(|e| fail(0, e.to_string(), &[]))?;
    let mut steps = Vec::new();
    let mut in_set = system.in_coefficient_set(&alpha);
    if !in_set {
        return Err(fail(0, format!("initial iterate left the coefficient set (sup norm {})", sup_norm(&alpha)), &steps));
    }
    let gamma1 = system.chart().gamma1;
    for j in 1..=max_iter {
        let v = system.apply_v(&alpha);
        let x: Vec<Complex64> = eta.iter().zip(&v).map(|(e, v)| e - v).collect();
        let next = system.invert_w(&x).map_err(|e| fail(j, e.to_string(), &steps))?;
        let step = sup_dist(&next, &alpha);
        steps.push(step);
        alpha = next;
        if !step.is_finite() || step > gamma1 {
            return Err(fail(j, format!("step {step:e} exceeds the chart radius {gamma1:e}"), &steps));
        }
        in_set &= system.in_coefficient_set(&alpha);
        if !in_set {
            return Err(fail(j, "iterate left the coefficient set".into(), &steps));
        }
        if step <= tol {
            let ratios = steps.windows(2).map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 }).collect();
            let residual = system.residual(&alpha, eta)?;
            return Ok(CoefState { alpha, iterations: j, steps, ratios, residual, in_coefficient_set: in_set });
        }
    }
    Err(fail(max_iter, format!("no convergence to {tol:e} within {max_iter} steps"), &steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_map::{LocalChart, RealDipole};
    use crate::solver::BlockPartition;
    use crate::stochastic::Weight;
    use std::sync::Arc;

    fn system(k: f64) -> System {
        System::new(
            BlockPartition::singletons_only(103, 100),
            Weight::power_law(0.75).unwrap(),
            LocalChart::with_default_radii(Arc::new(RealDipole)),
            k,
        )
        .unwrap()
    }

    #[test]
    fn zero_target_converges_in_one_step() {
        let s = system(10.0);
        let eta = vec![Complex64::new(0.0, 0.0); s.len()];
        let st = solve(&s, &eta, 1e-12, 50).unwrap();
        assert_eq!(st.iterations, 1);
        assert!(st.alpha.iter().all(|z| z.norm() == 0.0));
        assert_eq!(st.residual, 0.0);
    }

    #[test]
    fn solves_small_system() {
        let s = system(100.0);
        let eta: Vec<Complex64> =
            (0..s.len()).map(|i| Complex64::new(0.5 * (i as f64).sin() / (1.0 + (i as f64 - 103.0).powi(2)), 0.0)).collect();
        let st = solve(&s, &eta, 1e-12, 50).unwrap();
        assert!(st.residual <= 1e-14);
        assert!(st.ratios.iter().all(|&r| r < 0.5));
    }

    #[test]
    fn iteration_budget_exhaustion_is_reported() {
        let s = system(1.0);
        let eta: Vec<Complex64> = (0..s.len()).map(|i| Complex64::new(0.7 * (i as f64).cos(), 0.0)).collect();
        match solve(&s, &eta, 0.0, 2) {
            Err(Error::SolverFailure { trace, .. }) => assert!(!trace.is_empty()),
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
