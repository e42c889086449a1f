//! Least-squares coefficients `a_λ` of a Paley–Wiener function in a family of
//! reproducing kernels, and the resulting `L²[−π, π]` error.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gram::{conjugate_gradient, GramMatrix, RieszBounds};
use crate::cartwright::{combination_inner, kernel_inner};
use crate::error::{Error, Result};
use crate::numeric::{sinc_split, Point};

/// Lower Riesz bounds below this switch to the regularized solve.
pub const SINGULAR_FLOOR: f64 = 1e-8;
/// Regularization `ρ = REGULARIZATION·B`.
pub const REGULARIZATION: f64 = 1e-10;
/// Relative residual requested from conjugate gradients.
pub const CG_TOLERANCE: f64 = 1e-14;

/// The function to be expanded.
#[derive(Debug, Clone, PartialEq)]
pub enum Signal {
    /// `f(t) = Σ_n f̂(n) e^{int}` with `f̂(lo + i) = coefs[i]`.
    Fourier { lo: i64, coefs: Vec<Complex64> },
    /// `f = Σ_j b_j e^{iλ_j t}`.
    Kernels { points: Vec<Point>, coefs: Vec<Complex64> },
}

impl Signal {
    /// `‖f‖²` under the normalization that makes `e^{int}` orthonormal.
    pub fn norm_sq(&self) -> f64 {
        match self {
            Signal::Fourier { coefs, .. } => coefs.iter().map(|c| c.norm_sqr()).sum(),
            Signal::Kernels { points, coefs } => {
                points.par_iter().zip(coefs).map(|(p, b)| (b.conj() * combination_inner(points, coefs, p)).re).sum()
            }
        }
    }

    /// `⟨f, e^{iλt}⟩`, equal to the Paley–Wiener image of `f` at `λ`.
    pub fn cross(&self, lambda: &Point) -> Complex64 {
        match self {
            Signal::Fourier { lo, coefs } => coefs
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm_sqr() != 0.0)
                .map(|(i, c)| c * sinc_split(lambda.anchor - (lo + i as i64), lambda.offset))
                .sum(),
            Signal::Kernels { points, coefs } => {
                points.iter().zip(coefs).map(|(p, b)| b * kernel_inner(lambda, p)).sum()
            }
        }
    }

    /// `⟨f, e^{iλt}⟩` for every point, in parallel.
    pub fn cross_vector(&self, points: &[Point]) -> Vec<Complex64> {
        points.par_iter().map(|p| self.cross(p)).collect()
    }
}

/// Regularization applied when the Gram matrix is numerically singular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularization {
    pub rho: f64,
    /// `ρ‖a‖`, the residual of the unregularized normal equations.
    pub bias_bound: f64,
}

/// Coefficients and error of one least-squares expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub coefs: Vec<Complex64>,
    /// `‖f − Σ a_λ e^{iλt}‖/‖f‖`, or the absolute error when `f = 0`.
    pub relative_error: f64,
    pub bounds: RieszBounds,
    pub regularization: Option<Regularization>,
    pub cg_iterations: usize,
    pub cg_residual: f64,
}

/// `‖f − Σ a_λ e^{iλt}‖²` from `‖f‖² − 2Re(a*b) + a*Ga`.
pub fn error_sq(norm_sq: f64, gram: &GramMatrix, cross: &[Complex64], a: &[Complex64]) -> f64 {
    let re = DVector::from_iterator(a.len(), a.iter().map(|c| c.re));
    let im = DVector::from_iterator(a.len(), a.iter().map(|c| c.im));
    let quad = re.dot(&gram.apply(&re)) + im.dot(&gram.apply(&im));
    let ab: f64 = a.iter().zip(cross).map(|(x, y)| (x.conj() * y).re).sum();
    (norm_sq - 2.0 * ab + quad).max(0.0)
}

/// Relative error from an absolute squared error.
pub fn relative(err_sq: f64, norm_sq: f64) -> f64 {
    if norm_sq > 0.0 {
        (err_sq / norm_sq).sqrt()
    } else {
        err_sq.sqrt()
    }
}

/// Solves `G a = b` on the family `gram` for the signal with squared norm
/// `norm_sq` and cross vector `cross`.
pub fn expand(gram: &GramMatrix, cross: &[Complex64], norm_sq: f64) -> Result<Expansion> {
    let n = gram.len();
    if cross.len() != n {
        return Err(Error::Structural(format!("cross vector has {} entries for {n} frequencies", cross.len())));
    }
    let bounds = gram.riesz_bounds();
    let rho = if bounds.lower < SINGULAR_FLOOR { REGULARIZATION * bounds.upper } else { 0.0 };
    let max_iter = 4 * n + 100;
    let re = DVector::from_iterator(n, cross.iter().map(|c| c.re));
    let im = DVector::from_iterator(n, cross.iter().map(|c| c.im));
    let (xr, xi) = rayon::join(
        || conjugate_gradient(gram, rho, &re, CG_TOLERANCE, max_iter),
        || conjugate_gradient(gram, rho, &im, CG_TOLERANCE, max_iter),
    );
    let cg_residual = xr.relative_residual.max(xi.relative_residual);
    if rho == 0.0 && cg_residual > 1e-8 {
        return Err(Error::SolverFailure {
            step: xr.iterations.max(xi.iterations),
            reason: format!("Gram conjugate gradients stalled at relative residual {cg_residual:e}"),
            trace: vec![xr.relative_residual, xi.relative_residual],
        });
    }
    let coefs: Vec<Complex64> = xr.x.iter().zip(xi.x.iter()).map(|(&r, &i)| Complex64::new(r, i)).collect();
    let err = error_sq(norm_sq, gram, cross, &coefs);
    let regularization = (rho > 0.0).then(|| Regularization {
        rho,
        bias_bound: rho * coefs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
    });
    Ok(Expansion {
        coefs,
        relative_error: relative(err, norm_sq),
        bounds,
        regularization,
        cg_iterations: xr.iterations.max(xi.iterations),
        cg_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family() -> Vec<Point> {
        (-30..=30).map(|k| Point::new(k, 0.25 * ((k as f64) * 0.7).sin())).collect()
    }

    #[test]
    fn planted_combination_is_recovered() {
        let pts = family();
        let b: Vec<Complex64> = (0..pts.len()).map(|i| Complex64::new((i as f64).cos(), (i as f64 * 0.3).sin())).collect();
        let signal = Signal::Kernels { points: pts.clone(), coefs: b.clone() };
        let gram = GramMatrix::new(pts.clone());
        let cross = signal.cross_vector(&pts);
        // The cross vector of a planted combination equals G·b.
        for (i, c) in cross.iter().enumerate() {
            let gb: Complex64 = (0..pts.len()).map(|j| b[j] * gram.matrix()[(i, j)]).sum();
            assert!((c - gb).norm() < 1e-12);
        }
        let e = expand(&gram, &cross, signal.norm_sq()).unwrap();
        for (a, b) in e.coefs.iter().zip(&b) {
            assert!((a - b).norm() < 1e-10);
        }
        assert!(e.relative_error < 1e-6, "{}", e.relative_error);
    }

    #[test]
    fn zero_signal_has_zero_coefficients() {
        let pts = family();
        let signal = Signal::Fourier { lo: -5, coefs: vec![Complex64::new(0.0, 0.0); 11] };
        let gram = GramMatrix::new(pts.clone());
        let e = expand(&gram, &signal.cross_vector(&pts), signal.norm_sq()).unwrap();
        assert!(e.coefs.iter().all(|c| c.norm() == 0.0));
        assert_eq!(e.relative_error, 0.0);
    }

    #[test]
    fn integer_family_reproduces_fourier_coefficients() {
        let coefs: Vec<Complex64> = (0..11).map(|i| Complex64::new(i as f64, -1.0)).collect();
        let signal = Signal::Fourier { lo: -5, coefs: coefs.clone() };
        let pts: Vec<Point> = (-5..=5).map(Point::integer).collect();
        let gram = GramMatrix::new(pts.clone());
        let e = expand(&gram, &signal.cross_vector(&pts), signal.norm_sq()).unwrap();
        assert!(e.relative_error < 1e-7);
        assert!((e.coefs[3] - coefs[3]).norm() < 1e-12);
    }

    #[test]
    fn nested_families_have_non_increasing_error() {
        let coefs: Vec<Complex64> = (-40..=40).map(|n: i64| Complex64::new(1.0 / (1.0 + (n * n) as f64), 0.0)).collect();
        let signal = Signal::Fourier { lo: -40, coefs };
        let all: Vec<Point> = (-40..=40).map(|k| Point::new(k, 0.2)).collect();
        let gram = GramMatrix::new(all.clone());
        let cross = signal.cross_vector(&all);
        let nsq = signal.norm_sq();
        let mut last = f64::INFINITY;
        for r in [5, 10, 20, 40] {
            let idx: Vec<usize> = (0..all.len()).filter(|&i| all[i].value().abs() <= r as f64).collect();
            let sub = gram.restrict(&idx);
            let c: Vec<Complex64> = idx.iter().map(|&i| cross[i]).collect();
            let e = expand(&sub, &c, nsq).unwrap();
            assert!(e.relative_error <= last + 1e-12);
            last = e.relative_error;
        }
    }

    #[test]
    fn singular_family_is_regularized() {
        let pts = vec![Point::integer(0), Point::new(0, 1e-9), Point::integer(1)];
        let signal = Signal::Fourier { lo: 0, coefs: vec![Complex64::new(1.0, 0.0)] };
        let gram = GramMatrix::new(pts.clone());
        let e = expand(&gram, &signal.cross_vector(&pts), signal.norm_sq()).unwrap();
        assert!(e.regularization.is_some());
        assert!(e.relative_error < 1e-3);
    }
}
