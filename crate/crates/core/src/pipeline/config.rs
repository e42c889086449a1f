//! Experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_map::{LocalChart, LocalMapRegistry};
use crate::stochastic::{Mode, Weight, WeightRegistry};

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub mode: Mode,
    /// Exponent of the power-law weight.
    pub beta: f64,
    /// Weight family name.
    pub weight: String,
    /// Local map name; the mode's default when absent.
    pub local_map: Option<String>,
    /// Index half-width `N` of the random series.
    pub n: usize,
    /// Extra indices beyond `N`; the interpolation window is `M = N + margin`.
    pub margin: usize,
    /// Initial block spacing `T`.
    pub t_spacing: i64,
    /// Override of the contraction budget `τ`.
    pub tau: Option<f64>,
    /// Step tolerance of the fixed-point iteration.
    pub tol: f64,
    pub max_iter: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Chart radii overrides.
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    /// Budget of `K`/`T` doublings in the parameter search.
    pub max_doublings: usize,
    /// Plant the chart centre on every block with `n ≡ 0 (mod plant_every)`.
    pub plant_every: Option<i64>,
    /// Replace the draw by `ζ ≡ 0`.
    pub zero_draw: bool,
    /// Random pairs for the `W⁻¹` Lipschitz gate.
    pub w_inverse_pairs: usize,
    /// Random pairs for the observed Lipschitz constant of `V`.
    pub v_lipschitz_pairs: usize,
    /// Repeat the solve at `2N` to compare growth constants.
    pub growth_compare: bool,
    /// Run the reconstruction stage.
    pub reconstruct: bool,
    /// Output directory.
    pub out: Option<PathBuf>,
    /// Emit CSV tables next to the report.
    pub tables: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            mode: Mode::Real,
            beta: 0.75,
            weight: "power-law".into(),
            local_map: None,
            n: 2000,
            margin: 3,
            t_spacing: 100,
            tau: None,
            tol: 1e-12,
            max_iter: 50,
            newton_tol: 1e-13,
            newton_max_iter: 50,
            gamma1: None,
            gamma2: None,
            max_doublings: 40,
            plant_every: None,
            zero_draw: false,
            w_inverse_pairs: 1000,
            v_lipschitz_pairs: 16,
            growth_compare: true,
            reconstruct: true,
            out: None,
            tables: false,
        }
    }
}

impl ExperimentConfig {
    /// Reads a TOML or JSON file, chosen by extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)?,
            Some("toml") => toml::from_str(&text)?,
            _ => return Err(Error::Config(format!("unknown config format: {}", path.display()))),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks ranges that the modules would otherwise reject mid-run.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n < 16 {
            return bad(format!("n = {} must be at least 16", self.n));
        }
        if self.t_spacing < 3 {
            return bad(format!("t_spacing = {} must be at least 3", self.t_spacing));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return bad("tol must be positive and max_iter at least 1".into());
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iter == 0 {
            return bad("newton_tol must be positive and newton_max_iter at least 1".into());
        }
        if let Some(e) = self.plant_every {
            if e < 1 {
                return bad(format!("plant_every = {e} must be positive"));
            }
        }
        if self.gamma1.is_some() != self.gamma2.is_some() {
            return bad("gamma1 and gamma2 must be overridden together".into());
        }
        self.weight()?;
        self.chart()?;
        Ok(())
    }

    /// Interpolation window half-width `M = N + margin`.
    pub fn half_width(&self) -> i64 {
        (self.n + self.margin) as i64
    }

    /// Interior buffer `max(T, N/10)` used for residual reporting.
    pub fn buffer(&self) -> i64 {
        self.t_spacing.max(self.n as i64 / 10)
    }

    pub fn weight(&self) -> Result<Weight> {
        WeightRegistry::default().build(&self.weight, self.beta)
    }

    /// The chart for the configured map and radii.
    pub fn chart(&self) -> Result<LocalChart> {
        let name = self.local_map.as_deref().unwrap_or(LocalMapRegistry::default_name(self.mode));
        let map = LocalMapRegistry::default().get(name)?;
        if map.mode() != self.mode {
            return Err(Error::Config(format!("local map {name} does not match mode {}", self.mode)));
        }
        let mut chart = match (self.gamma1, self.gamma2) {
            (Some(g1), Some(g2)) => LocalChart::new(map, g1, g2)?,
            _ => LocalChart::with_default_radii(map),
        };
        chart.newton_tol = self.newton_tol;
        chart.newton_max_iter = self.newton_max_iter;
        Ok(chart)
    }

    /// The same experiment at a different `N`.
    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn invalid_beta_rejected() {
        let cfg = ExperimentConfig { beta: 0.4, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::InvalidWeight(_))));
    }

    #[test]
    fn mismatched_map_rejected() {
        let cfg = ExperimentConfig { mode: Mode::Complex, local_map: Some("real-dipole".into()), ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn round_trips_through_toml_and_json() {
        let cfg = ExperimentConfig {
            seed: 7,
            mode: Mode::Complex,
            tau: Some(1e-3),
            plant_every: Some(4),
            out: Some("runs/a".into()),
            ..Default::default()
        };
        let t: ExperimentConfig = toml::from_str(&toml::to_string(&cfg).unwrap()).unwrap();
        let j: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(t, cfg);
        assert_eq!(j, cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<ExperimentConfig>("seed = 1\nbogus = 2").is_err());
    }
}
