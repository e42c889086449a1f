//! Canonical products, the entire function `U = V·F`, exponential type
//! estimates, Paley–Wiener kernels and the cardinal series.

mod cardinal;
mod product;
mod pw;
mod quotient;

pub use cardinal::{cardinal_series, tail_report, TailReport};
pub use product::{log_sin_pi, CanonicalProduct, ProductValue, NEAR_ORIGIN};
pub use pw::{combination_inner, combination_value, kernel_inner, reproducing_kernel};
pub use quotient::{verify_quotient_identity, Quotient, QuotientReport};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Least-squares fit `log|g(iy)| ≈ a + b·y + c·ln y` on `[y_max/4, y_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeEstimate {
    /// Fitted slope `b`, the exponential type along the imaginary axis.
    pub slope: f64,
    pub intercept: f64,
    pub log_coefficient: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub y_max: f64,
    /// `(y, log|g(iy)|/y)` at the fit points.
    pub profile: Vec<(f64, f64)>,
}

/// Estimates the type of an entire function from `log|g(iy)|`.
pub fn type_estimate(log_abs: impl Fn(f64) -> f64 + Sync, y_max: f64, points: usize) -> TypeEstimate {
    use rayon::prelude::*;
    let ys = crate::numeric::linspace(y_max / 4.0, y_max, points.max(3));
    let vals: Vec<f64> = ys.par_iter().map(|&y| log_abs(y)).collect();
    let a = DMatrix::from_fn(ys.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => ys[i],
        _ => ys[i].ln(),
    });
    let b = DVector::from_vec(vals.clone());
    let coef = a.clone().svd(true, true).solve(&b, 1e-14).expect("SVD with both factors");
    let resid = &a * &coef - &b;
    TypeEstimate {
        slope: coef[1],
        intercept: coef[0],
        log_coefficient: coef[2],
        residual: (resid.norm_squared() / ys.len() as f64).sqrt(),
        y_max,
        profile: ys.iter().zip(&vals).map(|(&y, &v)| (y, v / y)).collect(),
    }
}
