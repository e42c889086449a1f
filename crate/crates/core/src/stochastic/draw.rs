//! Seeded Gaussian coefficient sequences on a finite integer window.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Real or complex Gaussian coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Standard real normals (variance 1).
    Real,
    /// Standard complex normals (real and imaginary parts of variance 1/2).
    Complex,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "real" => Ok(Mode::Real),
            "complex" => Ok(Mode::Complex),
            other => Err(format!("unknown mode '{other}' (expected real or complex)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Real => "real",
            Mode::Complex => "complex",
        })
    }
}

/// Sample `{ζ_m : |m| ≤ N + margin}` with its envelope constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianDraw {
    pub seed: u64,
    pub mode: Mode,
    pub n: usize,
    pub margin: usize,
    values: Vec<Complex64>,
    c_zeta: f64,
}

/// Indices in sampling order `0, 1, −1, 2, −2, …`, so that a window of
/// half-width `M` is a prefix of any larger window.
pub fn sample_index_order(half_width: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=half_width).flat_map(|k| [k, -k]))
}

/// Draws `ζ` on `|m| ≤ n + margin` from a ChaCha8 stream seeded with `seed`.
pub fn sample(seed: u64, mode: Mode, n: usize, margin: usize) -> GaussianDraw {
    let half = (n + margin) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![Complex64::new(0.0, 0.0); (2 * half + 1) as usize];
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    for m in sample_index_order(half) {
        let z = match mode {
            Mode::Real => Complex64::new(StandardNormal.sample(&mut rng), 0.0),
            Mode::Complex => {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re * scale, im * scale)
            }
        };
        values[(m + half) as usize] = z;
    }
    GaussianDraw::from_values(seed, mode, n, margin, values)
}

impl GaussianDraw {
    /// Wraps explicit values indexed from `−(n+margin)` upward.
    ///
    /// # Panics
    /// Panics if `values.len() != 2(n + margin) + 1`.
    pub fn from_values(seed: u64, mode: Mode, n: usize, margin: usize, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), 2 * (n + margin) + 1, "window length mismatch");
        let mut d = Self { seed, mode, n, margin, values, c_zeta: 0.0 };
        d.recompute_envelope();
        d
    }

    /// The identically zero draw.
    pub fn zero(mode: Mode, n: usize, margin: usize) -> Self {
        Self::from_values(0, mode, n, margin, vec![Complex64::new(0.0, 0.0); 2 * (n + margin) + 1])
    }

    /// Half-width `N + margin` of the sampled window.
    pub fn half_width(&self) -> i64 {
        (self.n + self.margin) as i64
    }

    /// `ζ_m`; zero outside the window.
    pub fn get(&self, m: i64) -> Complex64 {
        let h = self.half_width();
        if m.abs() > h {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[(m + h) as usize]
        }
    }

    /// Overwrites selected entries and refreshes `C_ζ`.
    pub fn set_values(&mut self, updates: &[(i64, Complex64)]) {
        let h = self.half_width();
        for &(m, z) in updates {
            assert!(m.abs() <= h, "index {m} outside window");
            self.values[(m + h) as usize] = z;
        }
        self.recompute_envelope();
    }

    /// Values ordered by index from `−(N+margin)` to `N+margin`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Smallest `C ≥ 0` with `|ζ_m| ≤ C + m²` on the window.
    pub fn c_zeta(&self) -> f64 {
        self.c_zeta
    }

    fn recompute_envelope(&mut self) {
        let h = self.half_width();
        self.c_zeta = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let m = i as f64 - h as f64;
                z.norm() - m * m
            })
            .fold(0.0, f64::max);
    }
}
