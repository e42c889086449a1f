//! Exponential systems over the pole set: the frequency set `Λ`, the Avdonin
//! block criterion, Gram matrices, and least-squares reconstruction of the
//! random Fourier series in `L²[−π, π]`.
//!
//! Functions on `[−π, π]` are identified with their Paley–Wiener images, so
//! `e^{iλt}` corresponds to the kernel `sinc(z − λ)` and inner products reduce
//! to closed-form sinc values.

mod avdonin;
mod gram;
mod lambda;
mod solve;

pub use avdonin::{avdonin_check, avdonin_search, AvdoninCheck, AvdoninResult, DEFAULT_DELTA_AV};
pub use gram::{conjugate_gradient, lanczos_extremes, CgOutcome, EigenMethod, GramMatrix, RieszBounds};
pub use lambda::{build_lambda, Frequency, FrequencyKind, FrequencySet, MAX_OFFSET};
pub use solve::{error_sq, expand, relative, Expansion, Regularization, Signal};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numeric::{parity, Point};
use crate::solver::{BlockPartition, CauchyKernelSum};
use crate::stochastic::{GaussianDraw, Weight};

/// The series `f̂(n) = (−1)^n ζ_n ω(|n|)`, `|n| ≤ N`, whose Paley–Wiener image
/// takes the values `F(n)` of the interpolant at the integers.
pub fn twisted_signal(draw: &GaussianDraw, weight: &Weight, n: i64) -> Signal {
    let coefs = (-n..=n).map(|m| draw.get(m) * (parity(m) * weight.at(m))).collect();
    Signal::Fourier { lo: -n, coefs }
}

/// `a_λ = −π c_λ / sin(πλ)`, the coefficients read off the residues of `F`.
pub fn explicit_coefficients(sum: &CauchyKernelSum) -> Vec<(Point, Complex64)> {
    sum.all_terms().iter().map(|t| (t.pole, -t.residue * PI / t.pole.sin_pi())).collect()
}

/// Frequency truncation radii and eigenvalue sizes used by [`reconstruct_run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionSettings {
    /// Nested radii `R` of the subfamilies `{λ ∈ Z(V) : |λ| ≤ R}`.
    pub radii: Vec<f64>,
    /// Sizes of the central Gram truncations used for the Riesz bounds.
    pub riesz_sizes: Vec<usize>,
    pub delta_av: f64,
    /// Allowed spread of the Riesz bounds across sizes.
    pub riesz_tolerance: f64,
}

impl ReconstructionSettings {
    /// Radii `{N/4, N/2, N − buffer, M}` and sizes `{200, 400, 800}`.
    pub fn standard(n: i64, buffer: i64, half_width: i64) -> Self {
        Self {
            radii: vec![(n / 4) as f64, (n / 2) as f64, (n - buffer) as f64, half_width as f64 + 0.5],
            riesz_sizes: vec![200, 400, 800],
            delta_av: DEFAULT_DELTA_AV,
            riesz_tolerance: 0.2,
        }
    }
}

/// One point of the nested error curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorPoint {
    pub radius: f64,
    pub size: usize,
    pub relative_error: f64,
    pub regularized: bool,
}

/// Riesz bounds of one central truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszPoint {
    pub size: usize,
    pub lower: f64,
    pub upper: f64,
}

/// Everything measured by [`reconstruct_run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub lambda_size: usize,
    pub auxiliary_count: usize,
    pub max_offset: f64,
    pub lambda_separation: f64,
    pub avdonin: AvdoninResult,
    pub riesz: Vec<RieszPoint>,
    /// `max(B_max/B_min, A_max/A_min) − 1` over the truncations.
    pub riesz_spread: f64,
    pub riesz_stable: bool,
    pub signal_norm: f64,
    pub error_curve: Vec<ErrorPoint>,
    pub monotone: bool,
    pub final_error: f64,
    /// Bounds of the full `Z(V)` Gram matrix.
    pub bounds: RieszBounds,
    pub coefficient_norm: f64,
    /// `‖f‖/√A`.
    pub coefficient_bound: f64,
    pub coefficient_bound_holds: bool,
    /// `max|a_ls − a_explicit| / max|a_explicit|`, with `a_ls` fitted to the
    /// window signal `|n| ≤ M` that `F` interpolates.
    pub explicit_mismatch: f64,
    /// Relative error of the explicit residue coefficients for the window signal.
    pub explicit_error: f64,
    /// Relative error of the expansion over all of `Λ`.
    pub dual_error: f64,
    /// `Σ_aux |a_λ|² / Σ_Λ |a_λ|²` in the expansion over all of `Λ`.
    pub auxiliary_mass: f64,
}

/// Monotonicity slack on the nested error curve.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Builds `Λ`, checks it, and reconstructs `signal` in the pole family.
/// `window_signal` carries every value interpolated by `F` and is used to
/// compare least squares with the explicit residue coefficients.
pub fn reconstruct_run(
    sum: &CauchyKernelSum,
    partition: &BlockPartition,
    signal: &Signal,
    window_signal: &Signal,
    settings: &ReconstructionSettings,
) -> Result<ReconstructionReport> {
    let lambda = build_lambda(sum, partition)?;
    let avdonin = avdonin_search(&lambda, partition.t(), settings.delta_av)?;
    let all_points = lambda.points();
    let full_gram = GramMatrix::new(all_points.clone());
    let cross = signal.cross_vector(&all_points);
    let norm_sq = signal.norm_sq();

    let pole_idx: Vec<usize> =
        (0..lambda.len()).filter(|&i| lambda.items()[i].kind == FrequencyKind::Pole).collect();
    let pick = |idx: &[usize]| -> (GramMatrix, Vec<Complex64>) {
        (full_gram.restrict(idx), idx.iter().map(|&i| cross[i]).collect())
    };

    let mut riesz = Vec::new();
    for &size in &settings.riesz_sizes {
        let mut by_distance = pole_idx.clone();
        by_distance.sort_by(|&a, &b| all_points[a].value().abs().total_cmp(&all_points[b].value().abs()));
        by_distance.truncate(size);
        by_distance.sort_unstable();
        let b = full_gram.restrict(&by_distance).riesz_bounds();
        riesz.push(RieszPoint { size: by_distance.len(), lower: b.lower, upper: b.upper });
    }
    let spread = |f: fn(&RieszPoint) -> f64| {
        let (lo, hi) = riesz.iter().map(f).fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(x), b.max(x)));
        if riesz.is_empty() { 0.0 } else { hi / lo - 1.0 }
    };
    let riesz_spread = spread(|r| r.lower).max(spread(|r| r.upper));

    let mut error_curve = Vec::new();
    let mut full = None;
    for &r in &settings.radii {
        let idx: Vec<usize> = pole_idx.iter().copied().filter(|&i| all_points[i].value().abs() <= r).collect();
        let (g, c) = pick(&idx);
        let e = expand(&g, &c, norm_sq)?;
        error_curve.push(ErrorPoint {
            radius: r,
            size: idx.len(),
            relative_error: e.relative_error,
            regularized: e.regularization.is_some(),
        });
        if idx.len() == pole_idx.len() {
            full = Some((g, c, e));
        }
    }
    let (zg, _, ze) = match full {
        Some(f) => f,
        None => {
            let (g, c) = pick(&pole_idx);
            let e = expand(&g, &c, norm_sq)?;
            (g, c, e)
        }
    };
    let monotone = error_curve.windows(2).all(|w| w[1].relative_error <= w[0].relative_error + MONOTONE_SLACK);
    let final_error = error_curve.last().map_or(ze.relative_error, |p| p.relative_error);

    let coefficient_norm = ze.coefs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let coefficient_bound = norm_sq.sqrt() / ze.bounds.lower.max(f64::MIN_POSITIVE).sqrt();

    let explicit: Vec<Complex64> = explicit_coefficients(sum).into_iter().map(|(_, a)| a).collect();
    let window_cross = window_signal.cross_vector(zg.points());
    let window_norm_sq = window_signal.norm_sq();
    let window_fit = expand(&zg, &window_cross, window_norm_sq)?;
    let scale = explicit.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let diff = explicit.iter().zip(&window_fit.coefs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let explicit_mismatch = if scale > 0.0 { diff / scale } else { diff };
    let explicit_error = relative(error_sq(window_norm_sq, &zg, &window_cross, &explicit), window_norm_sq);

    let (dual_error, auxiliary_mass) = if lambda.auxiliary_count() == 0 {
        (ze.relative_error, 0.0)
    } else {
        let dual = expand(&full_gram, &cross, norm_sq)?;
        let total: f64 = dual.coefs.iter().map(|c| c.norm_sqr()).sum();
        let aux: f64 = (0..lambda.len())
            .filter(|&i| lambda.items()[i].kind != FrequencyKind::Pole)
            .map(|i| dual.coefs[i].norm_sqr())
            .sum();
        (dual.relative_error, if total > 0.0 { aux / total } else { 0.0 })
    };

    Ok(ReconstructionReport {
        lambda_size: lambda.len(),
        auxiliary_count: lambda.auxiliary_count(),
        max_offset: lambda.max_offset(),
        lambda_separation: lambda.separation(),
        avdonin,
        riesz_stable: riesz_spread <= settings.riesz_tolerance,
        riesz,
        riesz_spread,
        signal_norm: norm_sq.sqrt(),
        error_curve,
        monotone,
        final_error,
        bounds: ze.bounds,
        coefficient_norm,
        coefficient_bound,
        coefficient_bound_holds: coefficient_norm <= coefficient_bound * (1.0 + 1e-9),
        explicit_mismatch,
        explicit_error,
        dual_error,
        auxiliary_mass,
    })
}
