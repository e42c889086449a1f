//! Finite sums of Cauchy kernels `F(z) = Σ c_q/(z − q)`.

use std::cmp::Ordering;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Point;

/// Origin of a pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleSource {
    /// Pole `s − K⁻²(s²+1)⁻²` of the singleton `s ∈ U`.
    Singleton { s: i64 },
    /// Kernel `kernel ∈ {0, 1}` of block `n`.
    Block { n: i64, kernel: usize },
}

/// One Cauchy kernel `residue/(z − pole)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelTerm {
    pub pole: Point,
    pub residue: Complex64,
    pub source: PoleSource,
}

/// A sum of Cauchy kernels with real, pairwise distinct poles.
///
/// Terms with zero residue are kept aside in `dropped`: they do not contribute
/// to `F` but their poles still belong to the structural pole set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyKernelSum {
    terms: Vec<KernelTerm>,
    dropped: Vec<KernelTerm>,
}

impl CauchyKernelSum {
    /// Builds the sum, sorting by pole and setting aside zero residues.
    pub fn new(all: Vec<KernelTerm>) -> Result<Self> {
        let mut sorted = all;
        sorted.sort_by(|a, b| a.pole.cmp_pos(&b.pole));
        for w in sorted.windows(2) {
            if w[0].pole.cmp_pos(&w[1].pole) != Ordering::Less {
                return Err(Error::Structural(format!("coincident poles at {}", w[0].pole.value())));
            }
        }
        if let Some(t) = sorted.iter().find(|t| !(t.residue.re.is_finite() && t.residue.im.is_finite())) {
            return Err(Error::Structural(format!("non-finite residue at pole {}", t.pole.value())));
        }
        let (terms, dropped) = sorted.into_iter().partition(|t| t.residue.norm() != 0.0);
        Ok(Self { terms, dropped })
    }

    /// Terms with nonzero residue, sorted by pole.
    pub fn terms(&self) -> &[KernelTerm] {
        &self.terms
    }

    /// Structural poles whose residue vanished.
    pub fn dropped(&self) -> &[KernelTerm] {
        &self.dropped
    }

    /// Every structural pole, sorted.
    pub fn all_poles(&self) -> Vec<Point> {
        let mut p: Vec<Point> = self.terms.iter().chain(&self.dropped).map(|t| t.pole).collect();
        p.sort_by(|a, b| a.cmp_pos(b));
        p
    }

    /// Every structural term (including dropped ones), sorted by pole.
    pub fn all_terms(&self) -> Vec<KernelTerm> {
        let mut t: Vec<KernelTerm> = self.terms.iter().chain(&self.dropped).copied().collect();
        t.sort_by(|a, b| a.pole.cmp_pos(&b.pole));
        t
    }

    /// `F(z)`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let d = t.pole.rel(z);
            if d.re == 0.0 && d.im == 0.0 {
                return Err(Error::EvaluationAtPole { pole: t.pole.value() });
            }
            acc += t.residue / d;
        }
        Ok(acc)
    }

    /// `F(z)` without the term at position `skip` of [`CauchyKernelSum::terms`].
    pub fn eval_without(&self, z: Complex64, skip: usize) -> Complex64 {
        self.terms
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, t)| t.residue / t.pole.rel(z))
            .sum()
    }

    /// `F(m)` at an integer, with the pole differences formed exactly.
    pub fn eval_integer(&self, m: i64) -> Complex64 {
        self.terms.iter().map(|t| t.residue / t.pole.rel_int(m)).sum()
    }

    /// `F(m)` for every integer in `[lo, hi]`, evaluated in parallel.
    pub fn eval_integers(&self, lo: i64, hi: i64) -> Vec<Complex64> {
        (lo..=hi).into_par_iter().map(|m| self.eval_integer(m)).collect()
    }

    /// Whether every residue is real.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.residue.im == 0.0)
    }

    /// Number of structural poles.
    pub fn pole_count(&self) -> usize {
        self.terms.len() + self.dropped.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(anchor: i64, offset: f64, c: f64, s: i64) -> KernelTerm {
        KernelTerm {
            pole: Point::new(anchor, offset),
            residue: Complex64::new(c, 0.0),
            source: PoleSource::Singleton { s },
        }
    }

    #[test]
    fn single_kernel_value() {
        let f = CauchyKernelSum::new(vec![term(0, -0.01, 0.1, 0)]).unwrap();
        let v = f.eval(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.re - 0.1 / 1.01).abs() < 1e-15);
        assert!(matches!(f.eval(Complex64::new(-0.01, 0.0)), Err(Error::EvaluationAtPole { .. })));
    }

    #[test]
    fn zero_residues_are_set_aside() {
        let f = CauchyKernelSum::new(vec![term(1, 0.1, 0.0, 1), term(0, 0.1, 1.0, 0)]).unwrap();
        assert_eq!(f.terms().len(), 1);
        assert_eq!(f.dropped().len(), 1);
        assert_eq!(f.all_poles().len(), 2);
        assert!(f.all_poles()[0].value() < f.all_poles()[1].value());
    }

    #[test]
    fn coincident_poles_rejected() {
        assert!(CauchyKernelSum::new(vec![term(1, 0.0, 1.0, 1), term(1, 0.0, 2.0, 2)]).is_err());
    }

    #[test]
    fn real_residues_give_conjugate_symmetry() {
        let f = CauchyKernelSum::new(vec![term(0, 0.3, 1.0, 0), term(5, -0.2, -2.0, 5)]).unwrap();
        assert!(f.is_real());
        for z in [Complex64::new(0.7, 1.3), Complex64::new(-3.0, 0.2)] {
            assert!((f.eval(z.conj()).unwrap() - f.eval(z).unwrap().conj()).norm() < 1e-15);
        }
    }
}
