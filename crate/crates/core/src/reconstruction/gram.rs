//! Gram matrices `G(λ, μ) = sinc(λ − μ)` of reproducing kernels, their
//! extreme eigenvalues and conjugate-gradient solves.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numeric::{sinc_points, Point};

/// Sizes up to this use a dense symmetric eigensolve; larger ones use Lanczos.
pub const DENSE_EIGEN_LIMIT: usize = 1000;
/// Number of Lanczos steps for large Gram matrices.
pub const LANCZOS_STEPS: usize = 160;

/// How the extreme eigenvalues were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenMethod {
    Dense,
    Lanczos,
}

/// Riesz bounds `A ≤ B`, the extreme eigenvalues of a Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszBounds {
    pub lower: f64,
    pub upper: f64,
    pub method: EigenMethod,
}

/// A dense real symmetric Gram matrix over anchored points.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    points: Vec<Point>,
    matrix: DMatrix<f64>,
}

impl GramMatrix {
    /// Assembles `G` column by column in parallel.
    pub fn new(points: Vec<Point>) -> Self {
        let n = points.len();
        let data: Vec<f64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|j| {
                let pj = points[j];
                let pts = &points;
                (0..n).map(move |i| sinc_points(&pts[i], &pj))
            })
            .collect();
        Self { matrix: DMatrix::from_vec(n, n, data), points }
    }

    /// The Gram matrix of the points at `indices`.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let matrix = self.matrix.select_rows(indices).select_columns(indices);
        Self { points: indices.iter().map(|&i| self.points[i]).collect(), matrix }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `G·x`.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    /// Extreme eigenvalues, dense up to [`DENSE_EIGEN_LIMIT`] and Lanczos beyond.
    pub fn riesz_bounds(&self) -> RieszBounds {
        let n = self.len();
        if n == 0 {
            return RieszBounds { lower: 1.0, upper: 1.0, method: EigenMethod::Dense };
        }
        if n <= DENSE_EIGEN_LIMIT {
            let ev = SymmetricEigen::new(self.matrix.clone()).eigenvalues;
            return RieszBounds { lower: ev.min(), upper: ev.max(), method: EigenMethod::Dense };
        }
        let (lower, upper) = lanczos_extremes(|x| self.apply(x), n, LANCZOS_STEPS.min(n));
        RieszBounds { lower, upper, method: EigenMethod::Lanczos }
    }
}

/// Extreme Ritz values of a symmetric operator after `steps` Lanczos steps with
/// full reorthogonalization, from a fixed start vector.
pub fn lanczos_extremes(apply: impl Fn(&DVector<f64>) -> DVector<f64>, n: usize, steps: usize) -> (f64, f64) {
    let mut q = DVector::from_fn(n, |i, _| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_7).fract());
    q /= q.norm();
    let mut basis: Vec<DVector<f64>> = vec![q];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    for j in 0..steps {
        let mut w = apply(&basis[j]);
        let a = basis[j].dot(&w);
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = v.dot(&w);
                w.axpy(-c, v, 1.0);
            }
        }
        let b = w.norm();
        if b < 1e-12 || j + 1 == steps {
            break;
        }
        beta.push(b);
        basis.push(w / b);
    }
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let ev = SymmetricEigen::new(t).eigenvalues;
    (ev.min(), ev.max())
}

/// Outcome of a conjugate-gradient solve.
#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub x: DVector<f64>,
    pub iterations: usize,
    /// `‖b − Gx‖/‖b‖` at exit.
    pub relative_residual: f64,
}

/// Solves `(G + shift·I)x = b` by conjugate gradients.
pub fn conjugate_gradient(g: &GramMatrix, shift: f64, b: &DVector<f64>, tol: f64, max_iter: usize) -> CgOutcome {
    let n = b.len();
    let bn = b.norm();
    if bn == 0.0 {
        return CgOutcome { x: DVector::zeros(n), iterations: 0, relative_residual: 0.0 };
    }
    let apply = |v: &DVector<f64>| g.apply(v) + v * shift;
    let mut x = DVector::zeros(n);
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    let mut it = 0;
    while it < max_iter && rr.sqrt() > tol * bn {
        let ap = apply(&p);
        let step = rr / p.dot(&ap);
        x.axpy(step, &p, 1.0);
        r.axpy(-step, &ap, 1.0);
        let rr_new = r.dot(&r);
        p = &r + &p * (rr_new / rr);
        rr = rr_new;
        it += 1;
    }
    let relative_residual = (b - apply(&x)).norm() / bn;
    CgOutcome { x, iterations: it, relative_residual }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_frequencies_give_identity() {
        let g = GramMatrix::new((0..10).map(Point::integer).collect());
        assert!((g.matrix() - DMatrix::identity(10, 10)).amax() < 1e-15);
        let rb = g.riesz_bounds();
        assert!((rb.lower - 1.0).abs() < 1e-12 && (rb.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn near_collision_is_degenerate() {
        let g = GramMatrix::new(vec![Point::integer(0), Point::new(0, 1e-6)]);
        assert!(g.riesz_bounds().lower < 1e-10);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let pts: Vec<Point> = (0..400).map(|k| Point::new(k, 0.2 * ((k as f64) * 1.3).sin())).collect();
        let g = GramMatrix::new(pts);
        let dense = g.riesz_bounds();
        let (lo, hi) = lanczos_extremes(|x| g.apply(x), g.len(), 160);
        assert!((lo - dense.lower).abs() < 1e-6 * dense.upper, "{lo} vs {}", dense.lower);
        assert!((hi - dense.upper).abs() < 1e-6 * dense.upper);
    }

    #[test]
    fn gram_is_symmetric_and_restricts() {
        let pts: Vec<Point> = (0..20).map(|k| Point::new(k, 0.1 * k as f64 / 20.0)).collect();
        let g = GramMatrix::new(pts);
        assert!((g.matrix() - g.matrix().transpose()).amax() == 0.0);
        let sub = g.restrict(&[3, 7]);
        assert_eq!(sub.matrix()[(0, 1)], g.matrix()[(3, 7)]);
    }

    #[test]
    fn cg_solves_well_conditioned_system() {
        let pts: Vec<Point> = (0..50).map(|k| Point::new(k, 0.2)).collect();
        let g = GramMatrix::new(pts);
        let x0 = DVector::from_fn(50, |i, _| (i as f64).cos());
        let b = g.apply(&x0);
        let out = conjugate_gradient(&g, 0.0, &b, 1e-14, 200);
        assert!((out.x - x0).amax() < 1e-10);
    }
}
