//! The entire function `U = V·F`, where `V` is the canonical product over the
//! pole set of the Cauchy kernel sum `F`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cardinal::{cardinal_series, tail_report, TailReport};
use super::product::CanonicalProduct;
use crate::error::{Error, Result};
use crate::numeric::{parity, sin_pi_complex};
use crate::solver::CauchyKernelSum;

/// `U = V·F` with a regular evaluation near every pole.
#[derive(Debug, Clone)]
pub struct Quotient {
    sum: CauchyKernelSum,
    product: CanonicalProduct,
    /// For each product zero, the index of its term in `sum.terms()` (none when dropped).
    term_of_zero: Vec<Option<usize>>,
    /// Poles closer than this to `z` use the regular branch.
    r0: f64,
    half_width: i64,
}

impl Quotient {
    /// Builds `U` for `F = sum`, completing `V` by the integers outside `[−M, M]`.
    pub fn new(sum: CauchyKernelSum, half_width: i64) -> Result<Self> {
        let zeros = sum.all_poles();
        let product = CanonicalProduct::new(zeros, Some((-half_width, half_width)), CanonicalProduct::default_schedule(half_width))?;
        let terms = sum.terms();
        let mut term_of_zero = Vec::with_capacity(product.zeros().len());
        let mut j = 0;
        for q in product.zeros() {
            if j < terms.len() && terms[j].pole == *q {
                term_of_zero.push(Some(j));
                j += 1;
            } else {
                term_of_zero.push(None);
            }
        }
        if j != terms.len() || product.zeros().len() != sum.pole_count() {
            return Err(Error::Structural("zero set of V differs from the pole set of F".into()));
        }
        let s0 = product.zeros().windows(2).map(|w| w[1].diff(&w[0])).fold(f64::INFINITY, f64::min);
        let r0 = if s0.is_finite() { s0 / 4.0 } else { 0.25 };
        Ok(Self { sum, product, term_of_zero, r0, half_width })
    }

    pub fn product(&self) -> &CanonicalProduct {
        &self.product
    }

    pub fn sum(&self) -> &CauchyKernelSum {
        &self.sum
    }

    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    /// Radius of the regular branch around each pole.
    pub fn regular_radius(&self) -> f64 {
        self.r0
    }

    /// `U(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        if let Some(idx) = self.product.nearest_zero(z.re) {
            let q = self.product.zeros()[idx];
            if q.rel(z).norm() < self.r0 {
                let divided = self.product.eval_divided(z, idx);
                return match self.term_of_zero[idx] {
                    Some(t) => {
                        let c = self.sum.terms()[t].residue;
                        let rest = self.sum.eval_without(z, t);
                        // c·V(z)/(z−q) + F_without_q(z)·V(z), with V(z) = (z−q)·V(z)/(z−q).
                        divided * (c + rest * q.rel(z))
                    }
                    None => self.sum.eval(z).unwrap_or_default() * self.product.eval(z),
                };
            }
        }
        let f = self.sum.eval(z).unwrap_or_default();
        if f.norm() == 0.0 {
            return f;
        }
        let l = self.product.log_eval(z);
        if l.re == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        (l + f.ln()).exp()
    }

    /// Relative disagreement of the regular and direct branches at `q + r₀` for zero `idx`.
    pub fn branch_mismatch(&self, idx: usize) -> f64 {
        let q = self.product.zeros()[idx];
        let z = Complex64::new(q.value() + self.r0, 0.0);
        let divided = self.product.eval_divided(z, idx);
        let regular = match self.term_of_zero[idx] {
            Some(t) => divided * (self.sum.terms()[t].residue + self.sum.eval_without(z, t) * q.rel(z)),
            None => divided * q.rel(z) * self.sum.eval(z).unwrap_or_default(),
        };
        let direct = self.sum.eval(z).unwrap_or_default() * self.product.eval(z);
        let scale = direct.norm().max(regular.norm());
        if scale == 0.0 {
            0.0
        } else {
            (regular - direct).norm() / scale
        }
    }

    /// `U(k)` for `k ∈ [−M, M]`; the samples vanish outside this window.
    pub fn integer_samples(&self) -> Vec<Complex64> {
        (-self.half_width..=self.half_width)
            .into_par_iter()
            .map(|k| self.eval(Complex64::new(k as f64, 0.0)))
            .collect()
    }
}

/// Agreement of `U` with the cardinal series of its integer samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    /// Evaluation points on the real line.
    pub points: Vec<f64>,
    pub max_abs: f64,
    /// `max_abs / max |U|` over the evaluation points.
    pub max_rel: f64,
    pub max_u: f64,
    /// Best scalar `s` in `Σ(−1)^k h(k)/(k−z) = s·πU(z)/sin(πz)`.
    pub sign: f64,
    /// Relative residual of that scalar fit.
    pub sign_residual: f64,
    pub tail: TailReport,
}

/// Compares `U(x)` with `Σ h(k)·sinc(x−k)` at `count` shifted midpoints of `[−L, L]`.
pub fn verify_quotient_identity(u: &Quotient, half_length: f64, count: usize) -> QuotientReport {
    let lo = -u.half_width();
    let h = u.integer_samples();
    let step = 2.0 * half_length / count as f64;
    let points: Vec<f64> = (0..count).map(|j| -half_length + (j as f64 + 0.5) * step + 0.137).collect();
    let rows: Vec<(Complex64, Complex64, Complex64)> = points
        .par_iter()
        .map(|&x| {
            let z = Complex64::new(x, 0.0);
            let direct = u.eval(z);
            let series = cardinal_series(lo, &h, z);
            let lhs: Complex64 =
                h.iter().enumerate().map(|(i, hk)| hk * parity(lo + i as i64) / (lo as f64 + i as f64 - x)).sum();
            (direct, series, lhs)
        })
        .collect();
    let max_abs = rows.iter().map(|(d, s, _)| (d - s).norm()).fold(0.0, f64::max);
    let max_u = rows.iter().map(|(d, _, _)| d.norm()).fold(0.0, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    let rhs: Vec<Complex64> = points.iter().zip(&rows).map(|(&x, (d, _, _))| d * PI / sin_pi_complex(Complex64::new(x, 0.0))).collect();
    for ((_, _, l), r) in rows.iter().zip(&rhs) {
        num += (l * r.conj()).re;
        den += r.norm_sqr();
    }
    let sign = if den > 0.0 { num / den } else { 0.0 };
    let res: f64 = rows.iter().zip(&rhs).map(|((_, _, l), r)| (l - r * sign).norm_sqr()).sum();
    let lnorm: f64 = rows.iter().map(|(_, _, l)| l.norm_sqr()).sum();
    QuotientReport {
        points,
        max_abs,
        max_rel: if max_u > 0.0 { max_abs / max_u } else { max_abs },
        max_u,
        sign,
        sign_residual: if lnorm > 0.0 { (res / lnorm).sqrt() } else { 0.0 },
        tail: tail_report(lo, &h),
    }
}
