//! Decreasing weights `ω` with a floor constant `δ`.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A decreasing profile `x ↦ ω(x)` on `x ≥ 0`, extended evenly.
pub trait WeightFamily: Send + Sync + Debug {
    /// Registry name of the family.
    fn name(&self) -> &'static str;
    /// Exponent-like shape parameter.
    fn beta(&self) -> f64;
    /// `ω(x)` for `x ≥ 0`.
    fn eval_nonneg(&self, x: f64) -> f64;
    /// Rejects parameters for which `ω ∉ ℓ²` or the floor condition fails.
    fn check(&self) -> Result<()>;
}

/// `ω(x) = (1 + x)^(−β)`.
#[derive(Debug, Clone, Copy)]
pub struct PowerLaw {
    pub beta: f64,
}

impl WeightFamily for PowerLaw {
    fn name(&self) -> &'static str {
        "power-law"
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn eval_nonneg(&self, x: f64) -> f64 {
        (1.0 + x).powf(-self.beta)
    }

    fn check(&self) -> Result<()> {
        if !self.beta.is_finite() || self.beta <= 0.5 {
            return Err(Error::InvalidWeight(format!(
                "beta = {} must exceed 1/2 for square summability",
                self.beta
            )));
        }
        if self.beta > 1.0 {
            return Err(Error::InvalidWeight(format!(
                "beta = {} exceeds 1, so x·ω(x) → 0 and no floor constant exists",
                self.beta
            )));
        }
        Ok(())
    }
}

type WeightFactory = fn(f64) -> Arc<dyn WeightFamily>;

/// Weight families selectable by name.
#[derive(Debug, Clone)]
pub struct WeightRegistry {
    factories: BTreeMap<&'static str, WeightFactory>,
}

impl Default for WeightRegistry {
    fn default() -> Self {
        let mut r = Self { factories: BTreeMap::new() };
        r.register("power-law", |beta| Arc::new(PowerLaw { beta }));
        r
    }
}

impl WeightRegistry {
    /// Adds or replaces a family.
    pub fn register(&mut self, name: &'static str, factory: WeightFactory) {
        self.factories.insert(name, factory);
    }

    /// Registered names in sorted order.
    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    /// Builds and validates the weight `name` with shape parameter `beta`.
    pub fn build(&self, name: &str, beta: f64) -> Result<Weight> {
        let factory = self.factories.get(name).ok_or_else(|| Error::UnknownStrategy {
            kind: "weight family",
            name: name.to_string(),
            available: self.names().join(", "),
        })?;
        Weight::new(factory(beta))
    }
}

/// Outcome of the grid validation of a weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightReport {
    /// Grid minimum of `x·ω(x)` over `x ≥ 1`.
    pub floor_min: f64,
    /// Grid minimum of `ω(2x)/ω(x)` over `x ≥ 0`.
    pub doubling_min: f64,
    /// Largest `δ ∈ (0, 1]` satisfying both conditions on the grid.
    pub delta: f64,
    /// Whether `ω` is nonincreasing on the grid with `0 < ω ≤ 1`.
    pub monotone: bool,
}

const GRID_MAX: f64 = 1e6;
const GRID_POINTS: usize = 4000;

/// Finds the floor constant `δ` of a weight family on a dense grid of `[0, 10⁶]`.
pub fn validate_weight(family: &dyn WeightFamily) -> Result<WeightReport> {
    family.check()?;
    // Linear near the origin, logarithmic further out.
    let mut grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
    let (lo, hi) = (10f64.ln(), GRID_MAX.ln());
    grid.extend((1..=GRID_POINTS).map(|i| (lo + (hi - lo) * i as f64 / GRID_POINTS as f64).exp()));

    let mut floor_min = f64::INFINITY;
    let mut doubling_min = f64::INFINITY;
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    for &x in &grid {
        let w = family.eval_nonneg(x);
        monotone &= w > 0.0 && w <= 1.0 && w <= prev;
        prev = w;
        if x >= 1.0 {
            floor_min = floor_min.min(x * w);
        }
        doubling_min = doubling_min.min(family.eval_nonneg(2.0 * x) / w);
    }
    let delta = floor_min.min(doubling_min).min(1.0);
    if !(delta > 0.0) || !monotone {
        return Err(Error::InvalidWeight(format!(
            "grid validation failed (delta {delta}, monotone {monotone})"
        )));
    }
    Ok(WeightReport { floor_min, doubling_min, delta, monotone })
}

/// A validated weight together with its floor constant.
#[derive(Debug, Clone)]
pub struct Weight {
    family: Arc<dyn WeightFamily>,
    report: WeightReport,
}

impl Weight {
    /// Validates `family` and records its floor constant.
    pub fn new(family: Arc<dyn WeightFamily>) -> Result<Self> {
        let report = validate_weight(family.as_ref())?;
        Ok(Self { family, report })
    }

    /// The default power law with exponent `beta`.
    pub fn power_law(beta: f64) -> Result<Self> {
        Self::new(Arc::new(PowerLaw { beta }))
    }

    /// `ω(|x|)`.
    pub fn eval(&self, x: f64) -> f64 {
        self.family.eval_nonneg(x.abs())
    }

    /// `ω(|m|)` for an integer index.
    pub fn at(&self, m: i64) -> f64 {
        self.eval(m as f64)
    }

    pub fn delta(&self) -> f64 {
        self.report.delta
    }

    pub fn beta(&self) -> f64 {
        self.family.beta()
    }

    pub fn family_name(&self) -> &'static str {
        self.family.name()
    }

    pub fn report(&self) -> &WeightReport {
        &self.report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_exponent_accepted() {
        let w = Weight::power_law(0.75).unwrap();
        // x·ω(x) is increasing for β < 1, so its minimum is at x = 1; the
        // doubling ratio decreases to 2^(−β).
        assert_relative_eq!(w.report().floor_min, 2f64.powf(-0.75), epsilon = 1e-12);
        assert!((w.report().doubling_min - 2f64.powf(-0.75)).abs() < 1e-5);
        assert!(w.delta() > 0.59 && w.delta() < 0.6);
    }

    #[test]
    fn unit_exponent_floor_is_one_half() {
        let w = Weight::power_law(1.0).unwrap();
        assert_relative_eq!(w.report().floor_min, 0.5, epsilon = 1e-12);
        assert!(w.delta() <= 0.5);
    }

    #[test]
    fn rejects_out_of_range_exponents() {
        assert!(matches!(Weight::power_law(0.4), Err(Error::InvalidWeight(_))));
        assert!(matches!(Weight::power_law(0.5), Err(Error::InvalidWeight(_))));
        assert!(matches!(Weight::power_law(1.2), Err(Error::InvalidWeight(_))));
    }

    #[test]
    fn closed_form_and_evenness() {
        let w = Weight::power_law(0.75).unwrap();
        for x in [0.0, 0.5, 3.0, 1e3] {
            assert_relative_eq!(w.eval(x), (1.0 + x).powf(-0.75), max_relative = 1e-15);
            assert_eq!(w.eval(-x), w.eval(x));
        }
    }

    #[test]
    fn registry_lookup() {
        let r = WeightRegistry::default();
        assert_eq!(r.names(), vec!["power-law"]);
        assert!(r.build("power-law", 0.75).is_ok());
        assert!(matches!(r.build("gaussian", 0.75), Err(Error::UnknownStrategy { .. })));
    }
}
