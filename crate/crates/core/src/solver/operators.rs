//! The operators `W` (identity on singletons, `L` on blocks) and `V`
//! (off-diagonal Cauchy interactions), and assembly of `F`.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel_sum::{CauchyKernelSum, KernelTerm, PoleSource};
use super::partition::{BlockPartition, Membership};
use crate::error::{Error, Result};
use crate::local_map::LocalChart;
use crate::numeric::Point;
use crate::stochastic::{Mode, Weight};

#[derive(Debug, Clone, Copy)]
struct Single {
    m: i64,
    pos: usize,
    /// `ω(s)/(K(s²+1))`.
    w: f64,
    /// `K⁻²(s²+1)⁻²`; the pole sits at `s − o`.
    o: f64,
}

#[derive(Debug, Clone, Copy)]
struct BlockInfo {
    n: i64,
    center: i64,
    pos: usize,
    omega: f64,
}

/// Truncated interpolation system on a partition for fixed `K`.
#[derive(Debug, Clone)]
pub struct System {
    partition: BlockPartition,
    weight: Weight,
    chart: LocalChart,
    k: f64,
    singles: Vec<Single>,
    blocks: Vec<BlockInfo>,
    row_scale: Vec<f64>,
}

/// Explicit majorant of the Lipschitz constant of `V` in the sup norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzMajorant {
    /// Largest row sum.
    pub total: f64,
    /// Largest contribution that shrinks as `K` grows.
    pub k_part: f64,
    /// Largest block-to-block contribution (independent of `K`, shrinks with `T`).
    pub block_part: f64,
}

impl System {
    pub fn new(partition: BlockPartition, weight: Weight, chart: LocalChart, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Config(format!("K = {k} must be positive")));
        }
        let singles = partition
            .singletons()
            .map(|s| {
                let q = (s * s) as f64 + 1.0;
                Single { m: s, pos: partition.pos(s), w: weight.at(s) / (k * q), o: 1.0 / (k * k * q * q) }
            })
            .collect();
        let t = partition.t();
        let blocks = partition
            .selected()
            .iter()
            .map(|&n| BlockInfo { n, center: t * n, pos: partition.pos(t * n), omega: weight.at(t * n) })
            .collect();
        let row_scale = (0..partition.len())
            .map(|i| {
                let m = partition.index(i);
                match partition.membership(m) {
                    Membership::Singleton => 1.0 / (k * weight.at(m) * ((m * m) as f64 + 1.0)),
                    Membership::Block { n, .. } => 1.0 / weight.at(t * n),
                }
            })
            .collect();
        Ok(Self { partition, weight, chart, k, singles, blocks, row_scale })
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn chart(&self) -> &LocalChart {
        &self.chart
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Sequence length (window size).
    pub fn len(&self) -> usize {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partition.is_empty()
    }

    fn block_params(&self, a: &[Complex64], b: &BlockInfo) -> DVector<f64> {
        self.chart.map().slots_to_params(&a[b.pos - 1..=b.pos + 1])
    }

    /// `(Wa)_m`: identity on singletons, `L` on each selected block triple.
    pub fn apply_w(&self, a: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = a.to_vec();
        for b in &self.blocks {
            let image = self.chart.eval(&self.block_params(a, b))?;
            out[b.pos - 1..=b.pos + 1].copy_from_slice(&self.chart.map().image_to_slots(&image));
        }
        Ok(out)
    }

    /// `W⁻¹x`, requiring every block triple of `x` to lie in `D(LA*, γ₂)`.
    pub fn invert_w(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = x.to_vec();
        for b in &self.blocks {
            let y = self.chart.map().slots_to_image(&x[b.pos - 1..=b.pos + 1]);
            let a = self.chart.invert(&y).map_err(|e| match e {
                Error::MembershipViolation { distance, radius, .. } => {
                    Error::MembershipViolation { block: b.n, distance, radius }
                }
                other => other,
            })?;
            out[b.pos - 1..=b.pos + 1].copy_from_slice(&self.chart.map().params_to_slots(&a));
        }
        Ok(out)
    }

    /// Block kernels `ω(Tn)·(pole offset, residue)` for the coefficients `a`.
    fn block_kernels(&self, a: &[Complex64]) -> Vec<[(f64, Complex64); 2]> {
        self.blocks
            .iter()
            .map(|b| self.chart.map().kernels(&self.block_params(a, b)).map(|(p, c)| (p, c * b.omega)))
            .collect()
    }

    /// `(Va)_m` for every window index.
    pub fn apply_v(&self, a: &[Complex64]) -> Vec<Complex64> {
        let kernels = self.block_kernels(a);
        let single_res: Vec<Complex64> = self.singles.iter().map(|s| a[s.pos] * s.w).collect();
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                let m = self.partition.index(i);
                let own = match self.partition.membership(m) {
                    Membership::Singleton => None,
                    Membership::Block { n, .. } => Some(n),
                };
                let mut acc = Complex64::new(0.0, 0.0);
                for (s, c) in self.singles.iter().zip(&single_res) {
                    if s.m != m {
                        acc += c / ((m - s.m) as f64 + s.o);
                    }
                }
                for (b, ks) in self.blocks.iter().zip(&kernels) {
                    if Some(b.n) == own {
                        continue;
                    }
                    let d = (m - b.center) as f64;
                    for &(p, c) in ks {
                        acc += c / (d - p);
                    }
                }
                acc * self.row_scale[i]
            })
            .collect()
    }

    /// `‖Wa + Va − η‖_∞`.
    pub fn residual(&self, a: &[Complex64], eta: &[Complex64]) -> Result<f64> {
        let w = self.apply_w(a)?;
        let v = self.apply_v(a);
        Ok(w.iter().zip(&v).zip(eta).fold(0.0, |acc, ((x, y), e)| {
            let r = x + y - e;
            acc.max(r.re.abs()).max(r.im.abs())
        }))
    }

    /// Row-sum majorant of the Lipschitz constant of `V` on the coefficient set,
    /// using `|Σ c_s δ_s| ≤ Σ |c_s|·‖δ‖` for singletons and the certified
    /// difference envelope for block kernels.
    pub fn lipschitz_majorant(&self) -> LipschitzMajorant {
        let env = self.chart.map().envelope();
        // Real and imaginary parts of a complex difference are bounded by √2 times the sup norm.
        let single_factor = if self.chart.map().mode() == Mode::Complex { std::f64::consts::SQRT_2 } else { 1.0 };
        let rows: Vec<(f64, f64)> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let m = self.partition.index(i);
                let own = match self.partition.membership(m) {
                    Membership::Singleton => None,
                    Membership::Block { n, .. } => Some(n),
                };
                let mut singles = 0.0;
                for s in &self.singles {
                    if s.m != m {
                        singles += s.w / ((m - s.m) as f64 + s.o).abs();
                    }
                }
                let mut blocks = 0.0;
                for b in &self.blocks {
                    if Some(b.n) != own {
                        blocks += b.omega * env.lipschitz_bound((m - b.center) as f64);
                    }
                }
                let scale = self.row_scale[i];
                match own {
                    None => (scale * (single_factor * singles + blocks), 0.0),
                    Some(_) => (scale * single_factor * singles, scale * blocks),
                }
            })
            .collect();
        let k_part = rows.iter().map(|r| r.0).fold(0.0, f64::max);
        let block_part = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        let total = rows.iter().map(|r| r.0 + r.1).fold(0.0, f64::max);
        LipschitzMajorant { total, k_part, block_part }
    }

    /// Assembles `F = Σ_s α_s ω(s)/(K(s²+1)(z − s + K⁻²(s²+1)⁻²)) + Σ_y ω(Ty) f_{α_y}(z − Ty)`.
    pub fn assemble(&self, a: &[Complex64]) -> Result<CauchyKernelSum> {
        let mut terms: Vec<KernelTerm> = self
            .singles
            .iter()
            .map(|s| KernelTerm {
                pole: Point::new(s.m, -s.o),
                residue: a[s.pos] * s.w,
                source: PoleSource::Singleton { s: s.m },
            })
            .collect();
        for (b, ks) in self.blocks.iter().zip(self.block_kernels(a)) {
            for (kernel, (p, c)) in ks.into_iter().enumerate() {
                terms.push(KernelTerm { pole: Point::new(b.center, p), residue: c, source: PoleSource::Block { n: b.n, kernel } });
            }
        }
        CauchyKernelSum::new(terms)
    }

    /// Whether `a` lies in `E_{1,γ₁}`: sup norm at most one and every block
    /// triple within `γ₁` of the chart centre.
    pub fn in_coefficient_set(&self, a: &[Complex64]) -> bool {
        crate::numeric::sup_norm(a) <= 1.0
            && self.blocks.iter().all(|b| self.chart.param_distance(&self.block_params(a, b)) <= self.chart.gamma1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_map::RealDipole;
    use std::sync::Arc;

    fn system(selected: Vec<i64>, k: f64) -> System {
        let p = BlockPartition::from_selected(303, 100, selected).unwrap();
        System::new(
            p,
            Weight::power_law(0.75).unwrap(),
            LocalChart::with_default_radii(Arc::new(RealDipole)),
            k,
        )
        .unwrap()
    }

    fn zeros(n: usize) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); n]
    }

    #[test]
    fn v_of_zero_is_zero_without_blocks() {
        let s = system(vec![], 10.0);
        assert!(s.apply_v(&zeros(s.len())).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn one_term_formula() {
        let k = 10.0;
        let s = system(vec![], k);
        let mut a = zeros(s.len());
        a[s.partition().pos(0)] = Complex64::new(1.0, 0.0);
        let v = s.apply_v(&a);
        let w = s.weight();
        for m in [-5i64, 1, 2, 17, 300] {
            let expected = w.at(0) / (k * k * w.at(m) * ((m * m) as f64 + 1.0) * (m as f64 + 1.0 / (k * k)));
            let got = v[s.partition().pos(m)].re;
            assert!((got - expected).abs() <= 1e-14 * expected.abs(), "{m}: {got} vs {expected}");
        }
        assert_eq!(v[s.partition().pos(0)].norm(), 0.0);
    }

    #[test]
    fn w_is_identity_on_singletons_and_l_on_blocks() {
        let s = system(vec![1], 10.0);
        let mut a: Vec<Complex64> = (0..s.len()).map(|i| Complex64::new((i as f64 * 0.37).sin() * 0.5, 0.0)).collect();
        let pos = s.partition().pos(100);
        a[pos - 1..=pos + 1].copy_from_slice(&s.chart().map().params_to_slots(s.chart().center()));
        let w = s.apply_w(&a).unwrap();
        for i in 0..s.len() {
            if (i as i64 - (pos as i64)).abs() > 1 {
                assert_eq!(w[i], a[i]);
            }
        }
        let expected = [1.0 / 6.0, -0.5, 1.0 / 6.0];
        for d in 0..3 {
            assert!((w[pos - 1 + d].re - expected[d]).abs() < 1e-15);
        }
        let back = s.invert_w(&w).unwrap();
        assert!(crate::numeric::sup_dist(&back, &a) < 1e-11);
    }

    #[test]
    fn block_kernel_poles() {
        let s = system(vec![1], 10.0);
        let mut a = zeros(s.len());
        let pos = s.partition().pos(100);
        a[pos - 1..=pos + 1].copy_from_slice(&s.chart().map().params_to_slots(s.chart().center()));
        let f = s.assemble(&a).unwrap();
        let w100 = s.weight().at(100);
        let blocks: Vec<_> = f.terms().iter().filter(|t| matches!(t.source, PoleSource::Block { .. })).collect();
        assert_eq!(blocks.len(), 2);
        assert!((blocks[0].pole.value() - 99.5).abs() < 1e-15);
        assert!((blocks[0].residue.re + w100 / 8.0).abs() < 1e-15);
        assert!((blocks[1].pole.value() - 100.5).abs() < 1e-15);
        assert!((blocks[1].residue.re - w100 / 8.0).abs() < 1e-15);
        // Zero singleton coefficients keep their poles as structural zeros.
        assert_eq!(f.pole_count(), s.len() - 1);
    }

    #[test]
    fn single_pole_assembly() {
        let k = 10.0;
        let s = system(vec![], k);
        let mut a = zeros(s.len());
        a[s.partition().pos(0)] = Complex64::new(1.0, 0.0);
        let f = s.assemble(&a).unwrap();
        assert_eq!(f.terms().len(), 1);
        assert!((f.terms()[0].pole.value() + 0.01).abs() < 1e-15);
        assert!((f.terms()[0].residue.re - 0.1).abs() < 1e-15);
    }

    #[test]
    fn majorant_dominates_observed_differences() {
        let s = system(vec![-2, 1], 5.0);
        let centre = s.chart().map().params_to_slots(s.chart().center());
        let mk = |phase: f64| {
            let mut a: Vec<Complex64> =
                (0..s.len()).map(|i| Complex64::new(0.3 * (i as f64 * phase).cos(), 0.0)).collect();
            for n in [-2i64, 1] {
                let pos = s.partition().pos(100 * n);
                for d in 0..3 {
                    a[pos - 1 + d] = centre[d] + 0.005 * (phase * (d + 1) as f64).sin();
                }
            }
            a
        };
        let (a, b) = (mk(0.3), mk(0.7));
        let lip = s.lipschitz_majorant();
        let dv = crate::numeric::sup_dist(&s.apply_v(&a), &s.apply_v(&b));
        assert!(dv <= lip.total * crate::numeric::sup_dist(&a, &b));
        assert!(lip.block_part > 0.0 && lip.k_part > 0.0);
    }
}
