//! Chart around the base point: Newton inversion and numerical certification.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{inf_norm, max_dist, LocalMap};
use crate::error::{Error, Result};

/// Required Lipschitz constant of `L⁻¹` on the image ball.
pub const LIPSCHITZ_BUDGET: f64 = 3.0;

/// A local map restricted to `D(A*, γ₁)`, inverted on `D(LA*, γ₂)`.
#[derive(Debug, Clone)]
pub struct LocalChart {
    map: Arc<dyn LocalMap>,
    center: DVector<f64>,
    image_center: DVector<f64>,
    pub gamma1: f64,
    pub gamma2: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl LocalChart {
    /// Chart with explicit radii.
    pub fn new(map: Arc<dyn LocalMap>, gamma1: f64, gamma2: f64) -> Result<Self> {
        for (name, g) in [("gamma1", gamma1), ("gamma2", gamma2)] {
            if !(g > 0.0 && g < 0.25) {
                return Err(Error::Config(format!("{name} = {g} must lie in (0, 1/4)")));
            }
        }
        let center = map.base_point();
        let image_center = map.eval(&center)?;
        Ok(Self { map, center, image_center, gamma1, gamma2, newton_tol: 1e-13, newton_max_iter: 50 })
    }

    /// Chart with the map's frozen certified radii.
    pub fn with_default_radii(map: Arc<dyn LocalMap>) -> Self {
        let (g1, g2) = map.default_radii();
        Self::new(map, g1, g2).expect("default radii are admissible")
    }

    pub fn map(&self) -> &Arc<dyn LocalMap> {
        &self.map
    }

    /// `A*` (flattened).
    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    /// `LA*` (flattened).
    pub fn image_center(&self) -> &DVector<f64> {
        &self.image_center
    }

    /// `‖y − LA*‖_∞`.
    pub fn image_distance(&self, y: &DVector<f64>) -> f64 {
        max_dist(y, &self.image_center)
    }

    /// `‖A − A*‖_∞`.
    pub fn param_distance(&self, a: &DVector<f64>) -> f64 {
        max_dist(a, &self.center)
    }

    /// `L(A)`.
    pub fn eval(&self, a: &DVector<f64>) -> Result<DVector<f64>> {
        self.map.eval(a)
    }

    /// `L⁻¹(y)` for `y ∈ D(LA*, γ₂)`, landing in `D(A*, γ₁)`.
    pub fn invert(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        let distance = self.image_distance(y);
        if distance > self.gamma2 {
            return Err(Error::MembershipViolation { block: 0, distance, radius: self.gamma2 });
        }
        let a = self.newton(y)?;
        let distance = self.param_distance(&a);
        if distance > self.gamma1 {
            return Err(Error::RadiusExceeded { distance, radius: self.gamma1 });
        }
        Ok(a)
    }

    /// Newton iteration from `A*` without any ball checks.
    pub fn newton(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        let mut a = self.center.clone();
        let mut residual = f64::INFINITY;
        for iter in 0..=self.newton_max_iter {
            let r = self.map.eval(&a)? - y;
            residual = r.amax();
            if residual <= self.newton_tol {
                return Ok(a);
            }
            if iter == self.newton_max_iter {
                break;
            }
            let j = self.map.jacobian(&a)?;
            let step = j.lu().solve(&r).ok_or(Error::NewtonDiverged { iterations: iter, residual })?;
            a -= step;
            if !a.iter().all(|x| x.is_finite()) {
                break;
            }
        }
        Err(Error::NewtonDiverged { iterations: self.newton_max_iter, residual })
    }
}

/// Sampling density for chart certification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    /// Grid points per axis on the parameter and image cubes.
    pub per_axis: usize,
    /// Random pairs for the inverse Lipschitz estimate.
    pub pairs: usize,
    /// Random `(A, A′, x)` samples for the difference envelope.
    pub difference_samples: usize,
    pub seed: u64,
}

impl MeshSpec {
    /// A mesh of reasonable cost for a map of real dimension `dim`.
    pub fn for_dim(dim: usize) -> Self {
        Self { per_axis: if dim <= 3 { 9 } else { 4 }, pairs: 1000, difference_samples: 10_000, seed: 0 }
    }
}

/// Outcome of a chart certification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartCertificate {
    pub map: String,
    pub gamma1: f64,
    pub gamma2: f64,
    /// `‖J(A*)⁻¹‖_∞`.
    pub base_inverse_norm: f64,
    /// `sup ‖J(A*)⁻¹J(A) − I‖_∞` over the parameter mesh; `< 1` gives injectivity.
    pub theta: f64,
    /// `(1 − θ)γ₁/‖J(A*)⁻¹‖`, the radius of an image ball guaranteed to be covered.
    pub covered_radius: f64,
    /// `sup ‖J(A)⁻¹‖_∞` over the parameter mesh.
    pub sup_inverse_norm: f64,
    /// Largest `‖L⁻¹y − A*‖/γ₁` over the image mesh (Newton surjectivity check).
    pub newton_reach: f64,
    /// Largest observed `‖L⁻¹y − L⁻¹y′‖/‖y − y′‖` on random pairs.
    pub pair_lipschitz: f64,
    /// Largest ratio of `|f_A(z)|` to the decay envelope.
    pub decay_ratio: f64,
    /// Largest ratio of `|f_A(x) − f_B(x)|` to the difference envelope.
    pub difference_ratio: f64,
    pub passed: bool,
    /// A violating point when certification fails.
    pub counterexample: Option<Vec<f64>>,
}

fn cube_mesh(center: &DVector<f64>, radius: f64, per_axis: usize) -> Vec<DVector<f64>> {
    let dim = center.len();
    let total = per_axis.pow(dim as u32);
    let step = |k: usize| {
        if per_axis == 1 {
            0.0
        } else {
            -1.0 + 2.0 * k as f64 / (per_axis - 1) as f64
        }
    };
    (0..total)
        .map(|mut idx| {
            let mut p = center.clone();
            for c in 0..dim {
                p[c] += radius * step(idx % per_axis);
                idx /= per_axis;
            }
            p
        })
        .collect()
}

fn random_in_ball(rng: &mut ChaCha8Rng, center: &DVector<f64>, radius: f64) -> DVector<f64> {
    center.map(|c| c + radius * rng.random_range(-1.0..=1.0))
}

/// Mesh-verifies the chart properties for radii `(γ₁, γ₂)`:
/// covering of `D(LA*, γ₂)` by Newton from `A*`, injectivity through `θ < 1`,
/// the Lipschitz budget for `L⁻¹`, and the decay and difference envelopes.
pub fn certify_chart(map: Arc<dyn LocalMap>, gamma1: f64, gamma2: f64, mesh: MeshSpec) -> Result<ChartCertificate> {
    let chart = LocalChart::new(map.clone(), gamma1, gamma2)?;
    let center = chart.center().clone();
    let j0 = map.jacobian(&center)?;
    let j0_inv = j0.clone().try_inverse().ok_or_else(|| Error::Structural("singular Jacobian at chart centre".into()))?;
    let base_inverse_norm = inf_norm(&j0_inv);
    let ident = DMatrix::<f64>::identity(map.dim(), map.dim());
    // Shrink by a hair so mesh corners stay inside the open ball.
    let param_mesh = cube_mesh(&center, gamma1 * (1.0 - 1e-9), mesh.per_axis);

    let per_point: Vec<(f64, f64)> = param_mesh
        .par_iter()
        .map(|a| match map.jacobian(a) {
            Ok(j) => {
                let theta = inf_norm(&(&j0_inv * &j - &ident));
                let inv = j.try_inverse().map(|m| inf_norm(&m)).unwrap_or(f64::INFINITY);
                (theta, inv)
            }
            Err(_) => (f64::INFINITY, f64::INFINITY),
        })
        .collect();
    let mut counterexample = None;
    let mut theta = 0.0f64;
    let mut sup_inverse_norm = 0.0f64;
    for (a, &(t, s)) in param_mesh.iter().zip(&per_point) {
        if t > theta {
            theta = t;
        }
        if s > sup_inverse_norm {
            sup_inverse_norm = s;
            if s > LIPSCHITZ_BUDGET && counterexample.is_none() {
                counterexample = Some(a.iter().copied().collect());
            }
        }
    }
    let covered_radius = if theta < 1.0 { (1.0 - theta) * gamma1 / base_inverse_norm } else { 0.0 };

    let image_mesh = cube_mesh(chart.image_center(), gamma2, mesh.per_axis);
    let reaches: Vec<(f64, Option<Vec<f64>>)> = image_mesh
        .par_iter()
        .map(|y| match chart.newton(y) {
            Ok(a) => (chart.param_distance(&a) / gamma1, None),
            Err(_) => (f64::INFINITY, Some(y.iter().copied().collect())),
        })
        .collect();
    let mut newton_reach = 0.0f64;
    for (r, bad) in reaches {
        newton_reach = newton_reach.max(r);
        if r >= 1.0 && counterexample.is_none() {
            counterexample = bad;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(mesh.seed);
    let mut pair_lipschitz = 0.0f64;
    for _ in 0..mesh.pairs {
        let y1 = random_in_ball(&mut rng, chart.image_center(), gamma2);
        let y2 = random_in_ball(&mut rng, chart.image_center(), gamma2);
        if let (Ok(a1), Ok(a2)) = (chart.newton(&y1), chart.newton(&y2)) {
            pair_lipschitz = pair_lipschitz.max(max_dist(&a1, &a2) / max_dist(&y1, &y2));
        }
    }

    let env = map.envelope();
    let mut corners = cube_mesh(&center, gamma1 * (1.0 - 1e-9), 2);
    corners.push(center.clone());
    let radii: Vec<f64> = (0..25).map(|i| 2.0 * 500f64.powf(i as f64 / 24.0)).collect();
    let mut decay_ratio = 0.0f64;
    for a in &corners {
        for &r in &radii {
            for k in 0..12 {
                let z = Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / 12.0 + 0.1);
                let f = map.eval_kernel(a, z)?;
                decay_ratio = decay_ratio.max(f.norm() / env.value_bound(r));
            }
        }
    }
    let mut difference_ratio = 0.0f64;
    for _ in 0..mesh.difference_samples {
        let a = random_in_ball(&mut rng, &center, gamma1);
        let b = random_in_ball(&mut rng, &center, gamma1);
        let mag = 2.0 * 500f64.powf(rng.random_range(0.0..=1.0));
        let x = if rng.random_bool(0.5) { mag } else { -mag };
        let diff = (map.eval_kernel_real(&a, x) - map.eval_kernel_real(&b, x)).norm();
        difference_ratio = difference_ratio.max(diff / (env.lipschitz_bound(x) * max_dist(&a, &b)));
    }

    let passed = theta < 1.0
        && sup_inverse_norm <= LIPSCHITZ_BUDGET
        && newton_reach < 1.0
        && pair_lipschitz <= LIPSCHITZ_BUDGET
        && decay_ratio <= 1.0
        && difference_ratio <= 1.0;
    Ok(ChartCertificate {
        map: map.name().to_string(),
        gamma1,
        gamma2,
        base_inverse_norm,
        theta,
        covered_radius,
        sup_inverse_norm,
        newton_reach,
        pair_lipschitz,
        decay_ratio,
        difference_ratio,
        passed,
        counterexample: if passed { None } else { counterexample },
    })
}

/// Results of a geometric sweep over `γ₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub trials: Vec<ChartCertificate>,
    /// Certified pair with the largest `min(γ₁, γ₂)`.
    pub best: Option<(f64, f64)>,
}

/// Sweeps `γ₁ = 0.24·ratio^k` down to `floor`, pairing each with the covered
/// radius `γ₂` (rounded down to three significant digits), and certifies each pair.
pub fn sweep_radii(map: Arc<dyn LocalMap>, ratio: f64, floor: f64, mesh: MeshSpec) -> Result<SweepResult> {
    let mut trials = Vec::new();
    let mut best: Option<(f64, f64)> = None;
    let mut g1 = 0.24;
    while g1 >= floor {
        let probe = certify_chart(map.clone(), g1, (g1 / 2.0).min(0.2), mesh)?;
        let g2 = round_down_sig(probe.covered_radius, 3);
        let cert = if g2 > 0.0 { certify_chart(map.clone(), g1, g2, mesh)? } else { probe };
        if cert.passed && best.is_none_or(|(b1, b2)| g1.min(g2) > b1.min(b2)) {
            best = Some((g1, g2));
        }
        trials.push(cert);
        g1 *= ratio;
    }
    Ok(SweepResult { trials, best })
}

fn round_down_sig(x: f64, digits: i32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let scale = 10f64.powi(digits - 1 - x.log10().floor() as i32);
    (x * scale).floor() / scale
}
