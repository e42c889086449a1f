//! Three-point rational maps used on selected blocks.
//!
//! A block `Δ_n = {Tn−1, Tn, Tn+1}` carries a pair of Cauchy kernels whose
//! values at `−1, 0, 1` must match a prescribed triple. Each concrete map
//! implements [`LocalMap`] on flattened real coordinates, so Newton inversion,
//! chart certification and the solver are written once for every variant.
//! Variants are registered by name in a [`LocalMapRegistry`].

mod chart;
mod complex;
mod real;

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use chart::{certify_chart, sweep_radii, ChartCertificate, LocalChart, MeshSpec, SweepResult, LIPSCHITZ_BUDGET};
pub use complex::ComplexPair;
pub use real::RealDipole;

use crate::error::{Error, Result};
use crate::stochastic::Mode;

/// Evaluation points of a local map relative to the block centre.
pub const NODES: [f64; 3] = [-1.0, 0.0, 1.0];

/// Decay envelope `|f(z)| ≤ decay/(|z|^order + 1)` and difference envelope
/// `|f_A(x) − f_B(x)| ≤ lipschitz·‖A−B‖/(|x|^order + 1)`, both for `|z| ≥ 2`
/// and parameters in the chart ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub order: i32,
    pub decay: f64,
    pub lipschitz: f64,
}

impl Envelope {
    fn denom(&self, d: f64) -> f64 {
        d.abs().powi(self.order) + 1.0
    }

    /// Decay bound at distance `d` from the block centre.
    pub fn value_bound(&self, d: f64) -> f64 {
        self.decay / self.denom(d)
    }

    /// Lipschitz bound at distance `d` from the block centre.
    pub fn lipschitz_bound(&self, d: f64) -> f64 {
        self.lipschitz / self.denom(d)
    }
}

/// A map `params ↦ (f(−1), f(0), f(1))` where `f` is a sum of two Cauchy kernels.
///
/// Parameters and images are handled as flattened real vectors; the `slots`
/// conversions pack them into three complex numbers so they can live in the
/// coefficient sequence at positions `Tn−1, Tn, Tn+1`.
pub trait LocalMap: Send + Sync + Debug {
    /// Registry name.
    fn name(&self) -> &'static str;
    /// Draw mode this map serves.
    fn mode(&self) -> Mode;
    /// Real dimension of both the parameter and the image space.
    fn dim(&self) -> usize;
    /// Chart centre in parameter space.
    fn base_point(&self) -> DVector<f64>;
    /// Whether a kernel pole falls on one of the evaluation nodes.
    fn excluded(&self, params: &DVector<f64>) -> bool;
    /// The two kernels as `(pole position relative to the block centre, residue)`.
    fn kernels(&self, params: &DVector<f64>) -> [(f64, Complex64); 2];
    /// Analytic Jacobian of the flattened image with respect to the flattened parameters.
    fn jacobian_unchecked(&self, params: &DVector<f64>) -> DMatrix<f64>;
    /// Packs parameters into the three coefficient slots.
    fn params_to_slots(&self, params: &DVector<f64>) -> [Complex64; 3];
    /// Inverse of [`LocalMap::params_to_slots`].
    fn slots_to_params(&self, slots: &[Complex64]) -> DVector<f64>;
    /// Packs an image vector into three slots (the values at `−1, 0, 1`).
    fn image_to_slots(&self, image: &DVector<f64>) -> [Complex64; 3];
    /// Inverse of [`LocalMap::image_to_slots`].
    fn slots_to_image(&self, slots: &[Complex64]) -> DVector<f64>;
    /// Certified envelope constants on the default chart.
    fn envelope(&self) -> Envelope;
    /// Default certified radii `(γ₁, γ₂)`.
    fn default_radii(&self) -> (f64, f64);

    /// `f(z)` for the kernel pair with the given parameters.
    fn eval_kernel(&self, params: &DVector<f64>, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (pole, residue) in self.kernels(params) {
            let d = z - pole;
            if d.norm() == 0.0 {
                return Err(Error::EvaluationAtPole { pole });
            }
            acc += residue / d;
        }
        Ok(acc)
    }

    /// `f(x)` at a real distance `x` from every pole.
    fn eval_kernel_real(&self, params: &DVector<f64>, x: f64) -> Complex64 {
        self.kernels(params).iter().map(|&(p, c)| c / (x - p)).sum()
    }

    /// The image `L(params)` as a flattened real vector.
    fn eval(&self, params: &DVector<f64>) -> Result<DVector<f64>> {
        if self.excluded(params) {
            return Err(Error::ExcludedParams(params.iter().copied().collect()));
        }
        let slots = NODES.map(|x| self.eval_kernel_real(params, x));
        Ok(self.slots_to_image(&slots))
    }

    /// Jacobian of `L` with the excluded-set check.
    fn jacobian(&self, params: &DVector<f64>) -> Result<DMatrix<f64>> {
        if self.excluded(params) {
            return Err(Error::ExcludedParams(params.iter().copied().collect()));
        }
        Ok(self.jacobian_unchecked(params))
    }

    /// `L` at the chart centre.
    fn base_image(&self) -> DVector<f64> {
        self.eval(&self.base_point()).expect("base point is admissible")
    }
}

/// Whether a pole offset coincides with an evaluation node.
pub(crate) fn hits_node(pole: f64) -> bool {
    NODES.iter().any(|&x| x + pole == 0.0)
}

/// `‖a − b‖_∞` of flattened vectors.
pub fn max_dist(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax()
}

/// Induced `∞`-norm (maximum absolute row sum).
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

type MapFactory = fn() -> Arc<dyn LocalMap>;

/// Local maps selectable by name.
#[derive(Debug, Clone)]
pub struct LocalMapRegistry {
    factories: BTreeMap<&'static str, MapFactory>,
}

impl Default for LocalMapRegistry {
    fn default() -> Self {
        let mut r = Self { factories: BTreeMap::new() };
        r.register(RealDipole::NAME, || Arc::new(RealDipole));
        r.register(ComplexPair::NAME, || Arc::new(ComplexPair));
        r
    }
}

impl LocalMapRegistry {
    /// Adds or replaces a map.
    pub fn register(&mut self, name: &'static str, factory: MapFactory) {
        self.factories.insert(name, factory);
    }

    /// Registered names in sorted order.
    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    /// Instantiates the map `name`.
    pub fn get(&self, name: &str) -> Result<Arc<dyn LocalMap>> {
        self.factories.get(name).map(|f| f()).ok_or_else(|| Error::UnknownStrategy {
            kind: "local map",
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    /// The default map for a draw mode.
    pub fn default_name(mode: Mode) -> &'static str {
        match mode {
            Mode::Real => RealDipole::NAME,
            Mode::Complex => ComplexPair::NAME,
        }
    }
}
