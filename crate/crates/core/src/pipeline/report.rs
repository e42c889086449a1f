//! The structured experiment report and the saved interpolant.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::analysis::{BmProxy, DeviationReport, GrowthReport};
use crate::cartwright::{ProductValue, QuotientReport, TypeEstimate};
use crate::error::Result;
use crate::reconstruction::ReconstructionReport;
use crate::solver::{BlockPartition, CauchyKernelSum, KernelTerm, LipschitzMajorant, ParameterTrial};
use crate::stochastic::{GaussianDraw, Weight, WeightReport};

/// Version of the report and saved-run layouts.
pub const SCHEMA_VERSION: u32 = 1;

/// One pass/fail check with the measured value and its threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub passed: bool,
    /// Hard gates make a run exit with an invariant failure.
    pub hard: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Gate {
    pub fn at_most(name: &str, hard: bool, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value <= threshold, hard, value, threshold }
    }

    pub fn at_least(name: &str, hard: bool, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value >= threshold, hard, value, threshold }
    }

    pub fn flag(name: &str, hard: bool, passed: bool) -> Self {
        Self { name: name.into(), passed, hard, value: if passed { 1.0 } else { 0.0 }, threshold: 1.0 }
    }
}

/// Accepted constants and the search that led to them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametersSection {
    pub map: String,
    pub gamma1: f64,
    pub gamma2: f64,
    pub tau: f64,
    pub k: f64,
    pub t: i64,
    pub c_zeta: f64,
    pub weight: WeightReport,
    pub planted: Vec<i64>,
    pub trials: Vec<ParameterTrial>,
}

/// Operator bounds on the realized draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSection {
    pub w_inverse_pairs: usize,
    /// Pairs rejected because a perturbed block left the chart image ball.
    pub w_inverse_skipped: usize,
    pub w_inverse_max_ratio: f64,
    /// `‖VW⁻¹η‖_∞`.
    pub v_of_initial: f64,
    pub lipschitz_majorant: LipschitzMajorant,
    pub lipschitz_observed: f64,
}

/// Fixed-point iteration trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationSection {
    pub iterations: usize,
    pub steps: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `γ₁·2^{−j}` for step `j = 1, 2, …`.
    pub step_bounds: Vec<f64>,
    pub steps_dominated: bool,
    /// `‖Wα + Vα − η‖_∞`.
    pub direct_residual: f64,
    pub in_coefficient_set: bool,
}

/// `|F(m) − ζ_m ω(|m|)|` on the interior `|m| ≤ N − buffer` and the remaining edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationSection {
    pub buffer: i64,
    pub interior_max: f64,
    /// Divided by `Kω(m)(m²+1)`.
    pub interior_max_normalized: f64,
    pub edge_max: f64,
    pub edge_max_normalized: f64,
}

/// Pole-set geometry and density statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSection {
    pub count: usize,
    /// Poles with vanishing residue, kept in the structural set.
    pub dropped: usize,
    pub window_size: usize,
    pub selected_blocks: usize,
    pub deficit: i64,
    pub deficit_matches: bool,
    pub separation: f64,
    pub p_hat: f64,
    pub eps_hat: f64,
    pub deviation: DeviationReport,
    pub linear_density: Vec<(f64, f64)>,
    pub bm_proxy: Vec<BmProxy>,
    /// `1 − ε̂/2`.
    pub bm_proxy_bound: f64,
}

/// Growth constants of `F` at `N` and `2N` on the same grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSection {
    pub grid_half_width: i64,
    pub at_n: GrowthReport,
    pub at_2n: Option<GrowthReport>,
    /// `constant(2N)/constant(N)`.
    pub ratio: Option<f64>,
}

/// Canonical-product identities for `ℤ∖{0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineSanity {
    pub value_at_half: f64,
    pub type_estimate: f64,
}

/// Canonical product, `U = V·F`, type estimates and the quotient identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartwrightSection {
    pub regular_radius: f64,
    pub near_origin_normalized: bool,
    pub product_at_i: ProductValue,
    pub type_v: TypeEstimate,
    pub type_u: Option<TypeEstimate>,
    /// `(1 − ε̂)π`.
    pub expected_type_v: f64,
    pub type_v_relative_error: f64,
    /// `(Type U − Type V)/π`.
    pub type_u_excess: Option<f64>,
    pub quotient: QuotientReport,
    /// Whether the integer samples of `U` look square-summable.
    pub l2_gate: bool,
    pub branch_mismatch: f64,
    pub sine: SineSanity,
}

/// Everything measured in one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub parameters: ParametersSection,
    pub operators: OperatorSection,
    pub iteration: IterationSection,
    pub interpolation: InterpolationSection,
    pub poles: PoleSection,
    pub growth: GrowthSection,
    pub cartwright: CartwrightSection,
    pub reconstruction: Option<ReconstructionReport>,
    pub gates: Vec<Gate>,
    pub timings_ms: BTreeMap<String, u64>,
}

impl ExperimentReport {
    /// Names of failing hard gates.
    pub fn hard_failures(&self) -> Vec<&str> {
        self.gates.iter().filter(|g| g.hard && !g.passed).map(|g| g.name.as_str()).collect()
    }

    pub fn gate(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }

    /// The report with timings cleared, for determinism comparisons.
    pub fn without_timings(&self) -> Self {
        Self { timings_ms: BTreeMap::new(), ..self.clone() }
    }
}

/// The solved interpolant with enough context to rerun later stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedRun {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub k: f64,
    pub t: i64,
    pub tau: f64,
    pub selected: Vec<i64>,
    pub planted: Vec<i64>,
    /// `ζ_m` for `m = −M, …, M`.
    pub zeta: Vec<Complex64>,
    /// Every structural kernel, including those with zero residue.
    pub terms: Vec<KernelTerm>,
}

/// Objects rebuilt from a [`SavedRun`].
#[derive(Debug, Clone)]
pub struct RestoredRun {
    pub draw: GaussianDraw,
    pub weight: Weight,
    pub partition: BlockPartition,
    pub sum: CauchyKernelSum,
}

impl SavedRun {
    pub fn restore(&self) -> Result<RestoredRun> {
        let c = &self.config;
        let draw = GaussianDraw::from_values(c.seed, c.mode, c.n, c.margin, self.zeta.clone());
        let weight = c.weight()?;
        let partition = BlockPartition::from_selected(c.half_width(), self.t, self.selected.clone())?;
        let sum = CauchyKernelSum::new(self.terms.clone())?;
        Ok(RestoredRun { draw, weight, partition, sum })
    }
}
