//! Canonical products `V(z) = lim Π_{|q|<R} (1 − z/q)` over real zero sets.
//!
//! Products are evaluated in log-sum form. A finite zero set can be
//! *completed* by the integers outside an integer window, which is the natural
//! extension of a pole set that coincides with perturbed integers; the limit
//! then has the closed form
//! `sinc(z) · Π_{q∈Q}(1 − z/q) / Π_{k∈window∖0}(1 − z/k)`.
//! Without completion the limit is approximated by the largest cutoff with
//! the tail correction `exp(−C_R z²/R)`, `C_R = #{|q| < R}/(2R)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{parity, Point};

/// Zeros closer than this to the origin use the factor `(q − z)` instead of `(1 − z/q)`.
pub const NEAR_ORIGIN: f64 = 0.5;

/// `log(sin(πz))` without overflow for large `|Im z|`.
pub fn log_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() <= 20.0 {
        return crate::numeric::sin_pi_complex(z).ln();
    }
    if z.im < 0.0 {
        return log_sin_pi(z.conj()).conj();
    }
    // sin(πz) = (i/2)·e^{−iπz}·(1 − e^{2πiz}), and e^{2πiz} is negligible here.
    let x = z.re - 2.0 * (z.re / 2.0).round();
    let tail = (Complex64::new(0.0, 2.0 * PI) * Complex64::new(x, z.im)).exp();
    Complex64::new(PI * z.im - std::f64::consts::LN_2, PI / 2.0 - PI * x) + (Complex64::new(1.0, 0.0) - tail).ln()
}

/// `sin(πw)/(πw)` for complex `w`, accurate near zero.
fn sinc_c(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        let pw2 = (w * PI) * (w * PI);
        Complex64::new(1.0, 0.0) - pw2 / 6.0 + pw2 * pw2 / 120.0
    } else {
        crate::numeric::sin_pi_complex(w) / (w * PI)
    }
}

/// `log(sin(πw)/(πw))`.
fn log_sinc(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        sinc_c(w).ln()
    } else {
        log_sin_pi(w) - (w * PI).ln()
    }
}

/// Value of a canonical product with its convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductValue {
    pub value: Complex64,
    /// `|V_{R_last}(z) − V_{R_prev}(z)|` for the two largest cutoffs.
    pub cauchy_diff: f64,
    /// `|V_{R_last}(z) − V(z)|`.
    pub limit_diff: f64,
    /// Whether `|V_R(z) − V(z)|` decreases along the cutoff schedule.
    pub converging: bool,
}

/// Canonical product over a sorted real zero set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalProduct {
    zeros: Vec<Point>,
    completion: Option<(i64, i64)>,
    schedule: Vec<f64>,
    /// Whether some zero uses the near-origin factor `(q − z)`.
    pub near_origin_normalized: bool,
}

impl CanonicalProduct {
    /// Product over `zeros`, completed by `ℤ ∖ [lo, hi]` when `completion` is set.
    /// The cutoff `schedule` is used for diagnostics and, without completion,
    /// its last entry defines the limit.
    pub fn new(mut zeros: Vec<Point>, completion: Option<(i64, i64)>, schedule: Vec<f64>) -> Result<Self> {
        zeros.sort_by(|a, b| a.cmp_pos(b));
        if let Some((lo, hi)) = completion {
            if zeros.iter().any(|q| q.value() < lo as f64 - 0.5 || q.value() > hi as f64 + 0.5) {
                return Err(Error::Structural("zeros outside the completion window".into()));
            }
        }
        if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("cutoff schedule must be nonempty and increasing".into()));
        }
        let near_origin_normalized = zeros.iter().any(|q| q.value().abs() < NEAR_ORIGIN);
        Ok(Self { zeros, completion, schedule, near_origin_normalized })
    }

    /// The symmetric schedule `{W/4, W/2, W} + 1/2` for a window half-width `W`.
    pub fn default_schedule(half_width: i64) -> Vec<f64> {
        [half_width / 4, half_width / 2, half_width].iter().map(|&r| r as f64 + 0.5).collect()
    }

    pub fn zeros(&self) -> &[Point] {
        &self.zeros
    }

    pub fn schedule(&self) -> &[f64] {
        &self.schedule
    }

    pub fn completion(&self) -> Option<(i64, i64)> {
        self.completion
    }

    /// `log` of the factor belonging to zero `q`.
    fn log_factor(q: &Point, z: Complex64) -> Complex64 {
        let d = -q.rel(z);
        if q.value().abs() < NEAR_ORIGIN {
            d.ln()
        } else {
            (d / q.value()).ln()
        }
    }

    /// `log V(z)` with the zero at position `skip` removed.
    fn log_eval_inner(&self, z: Complex64, skip: Option<usize>) -> Complex64 {
        let mut acc: Complex64 = self
            .zeros
            .iter()
            .enumerate()
            .filter(|&(i, _)| Some(i) != skip)
            .map(|(_, q)| Self::log_factor(q, z))
            .sum();
        match self.completion {
            Some((lo, hi)) => {
                let k0 = z.re.round() as i64;
                let inside = (lo..=hi).contains(&k0) && k0 != 0;
                for k in lo..=hi {
                    if k != 0 && !(inside && k == k0) {
                        acc -= (Complex64::new(k as f64 - z.re, -z.im) / k as f64).ln();
                    }
                }
                if inside {
                    // sinc(z)/(1 − z/k0) = (−1)^{k0+1}·k0·sinc(z − k0)/z.
                    let w = Complex64::new(z.re - k0 as f64, z.im);
                    acc += log_sinc(w) + (Complex64::new(-parity(k0) * k0 as f64, 0.0) / z).ln();
                } else {
                    acc += log_sinc(z);
                }
                acc
            }
            None => {
                let r = *self.schedule.last().expect("nonempty schedule");
                acc + self.tail(z, r)
            }
        }
    }

    fn tail(&self, z: Complex64, r: f64) -> Complex64 {
        let c = self.zeros.iter().filter(|q| q.value().abs() < r).count() as f64 / (2.0 * r);
        -(z * z) * (c / r)
    }

    /// `log V(z)`; the real part is `−∞` at a zero.
    pub fn log_eval(&self, z: Complex64) -> Complex64 {
        self.log_eval_inner(z, None)
    }

    /// `V(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let l = self.log_eval(z);
        if l.re == f64::NEG_INFINITY || (l.re.is_nan() && self.is_zero(z)) {
            Complex64::new(0.0, 0.0)
        } else {
            l.exp()
        }
    }

    fn is_zero(&self, z: Complex64) -> bool {
        z.im == 0.0 && self.zeros.iter().any(|q| q.rel(z).re == 0.0)
    }

    /// Tail-corrected partial product over the zeros with `|q| < r`
    /// (including completion integers inside the cutoff).
    pub fn log_partial(&self, z: Complex64, r: f64) -> Complex64 {
        let mut acc: Complex64 =
            self.zeros.iter().filter(|q| q.value().abs() < r).map(|q| Self::log_factor(q, z)).sum();
        let mut count = self.zeros.iter().filter(|q| q.value().abs() < r).count();
        if let Some((lo, hi)) = self.completion {
            let kmax = (r - 1e-9).floor() as i64;
            for k in (-kmax..=kmax).filter(|k| *k != 0 && !(lo..=hi).contains(k)) {
                acc += (Complex64::new(k as f64 - z.re, -z.im) / k as f64).ln();
                count += 1;
            }
        }
        acc - (z * z) * (count as f64 / (2.0 * r * r))
    }

    /// `V(z)` with cutoff diagnostics along the schedule.
    pub fn eval_with_diagnostics(&self, z: Complex64) -> ProductValue {
        let value = self.eval(z);
        let partials: Vec<Complex64> = self.schedule.iter().map(|&r| self.log_partial(z, r).exp()).collect();
        let n = partials.len();
        let cauchy_diff = if n >= 2 { (partials[n - 1] - partials[n - 2]).norm() } else { 0.0 };
        let errs: Vec<f64> = partials.iter().map(|p| (p - value).norm()).collect();
        let converging = errs.windows(2).all(|w| w[1] <= w[0]);
        ProductValue { value, cauchy_diff, limit_diff: errs[n - 1], converging }
    }

    /// `V(z)/(z − q_idx)`, regular at `q_idx`.
    pub fn eval_divided(&self, z: Complex64, idx: usize) -> Complex64 {
        let q = &self.zeros[idx];
        // (q − z)/q = −(z − q)/q, or (q − z) = −(z − q) near the origin.
        let scale = if q.value().abs() < NEAR_ORIGIN { -1.0 } else { -1.0 / q.value() };
        self.log_eval_inner(z, Some(idx)).exp() * scale
    }

    /// `V′(q_idx)`.
    pub fn derivative_at_zero(&self, idx: usize) -> Complex64 {
        let q = self.zeros[idx];
        self.eval_divided(Complex64::new(q.value(), 0.0), idx)
    }

    /// Index of the zero nearest to `x`.
    pub fn nearest_zero(&self, x: f64) -> Option<usize> {
        if self.zeros.is_empty() {
            return None;
        }
        let i = self.zeros.partition_point(|q| q.rel_real(x) > 0.0);
        [i.checked_sub(1), (i < self.zeros.len()).then_some(i)]
            .into_iter()
            .flatten()
            .min_by(|&a, &b| self.zeros[a].rel_real(x).abs().total_cmp(&self.zeros[b].rel_real(x).abs()))
    }
}
