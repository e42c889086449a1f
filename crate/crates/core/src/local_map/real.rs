//! Real dipole `f_A(x) = A₁/(x+A₂) − A₁/(x+A₃)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{hits_node, Envelope, LocalMap, NODES};
use crate::stochastic::Mode;

/// Two real Cauchy kernels with opposite residues `±A₁`, centred at `A* = (1/8, −1/2, 1/2)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RealDipole;

impl RealDipole {
    pub const NAME: &'static str = "real-dipole";
}

impl LocalMap for RealDipole {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn mode(&self) -> Mode {
        Mode::Real
    }

    fn dim(&self) -> usize {
        3
    }

    fn base_point(&self) -> DVector<f64> {
        DVector::from_vec(vec![1.0 / 8.0, -0.5, 0.5])
    }

    fn excluded(&self, p: &DVector<f64>) -> bool {
        hits_node(-p[1]) || hits_node(-p[2])
    }

    fn kernels(&self, p: &DVector<f64>) -> [(f64, Complex64); 2] {
        [(-p[1], Complex64::new(p[0], 0.0)), (-p[2], Complex64::new(-p[0], 0.0))]
    }

    fn jacobian_unchecked(&self, p: &DVector<f64>) -> DMatrix<f64> {
        let (a1, a2, a3) = (p[0], p[1], p[2]);
        DMatrix::from_fn(3, 3, |i, j| {
            let x = NODES[i];
            match j {
                0 => 1.0 / (x + a2) - 1.0 / (x + a3),
                1 => -a1 / (x + a2).powi(2),
                _ => a1 / (x + a3).powi(2),
            }
        })
    }

    fn params_to_slots(&self, p: &DVector<f64>) -> [Complex64; 3] {
        [0, 1, 2].map(|i| Complex64::new(p[i], 0.0))
    }

    fn slots_to_params(&self, s: &[Complex64]) -> DVector<f64> {
        DVector::from_iterator(3, s.iter().take(3).map(|z| z.re))
    }

    fn image_to_slots(&self, y: &DVector<f64>) -> [Complex64; 3] {
        [0, 1, 2].map(|i| Complex64::new(y[i], 0.0))
    }

    fn slots_to_image(&self, s: &[Complex64]) -> DVector<f64> {
        DVector::from_iterator(3, s.iter().take(3).map(|z| z.re))
    }

    fn envelope(&self) -> Envelope {
        Envelope { order: 2, decay: 2.0, lipschitz: 8.0 }
    }

    fn default_radii(&self) -> (f64, f64) {
        (0.0109, 0.0031)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn a_star() -> DVector<f64> {
        RealDipole.base_point()
    }

    #[test]
    fn image_of_base_point() {
        let y = RealDipole.eval(&a_star()).unwrap();
        assert_relative_eq!(y[0], 1.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(y[1], -0.5, epsilon = 1e-15);
        assert_relative_eq!(y[2], 1.0 / 6.0, epsilon = 1e-15);
        let f0 = RealDipole.eval_kernel(&a_star(), Complex64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(f0.re, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn jacobian_and_inverse_at_base_point() {
        let j = RealDipole.jacobian(&a_star()).unwrap();
        let expected = DMatrix::from_row_slice(
            3,
            3,
            &[4.0 / 3.0, -1.0 / 18.0, 0.5, -4.0, -0.5, 0.5, 4.0 / 3.0, -0.5, 1.0 / 18.0],
        );
        assert!((&j - &expected).amax() < 1e-12);
        assert_relative_eq!(j.determinant(), 128.0 / 81.0, epsilon = 1e-12);
        let inv = j.try_inverse().unwrap();
        let expected_inv = DMatrix::from_row_slice(
            3,
            3,
            &[
                9.0 / 64.0, -5.0 / 32.0, 9.0 / 64.0,
                9.0 / 16.0, -3.0 / 8.0, -27.0 / 16.0,
                27.0 / 16.0, 3.0 / 8.0, -9.0 / 16.0,
            ],
        );
        assert!((&inv - &expected_inv).amax() < 1e-10);
    }

    #[test]
    fn degenerate_parameters() {
        let zero_amp = DVector::from_vec(vec![0.0, -0.5, 0.5]);
        assert_eq!(RealDipole.eval(&zero_amp).unwrap(), DVector::zeros(3));
        let cancel = DVector::from_vec(vec![0.3, 1.0 / 3.0, 1.0 / 3.0]);
        for z in [Complex64::new(0.2, 1.0), Complex64::new(-4.0, 0.0)] {
            assert_eq!(RealDipole.eval_kernel(&cancel, z).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn excluded_set_and_pole_hits() {
        let bad = DVector::from_vec(vec![0.1, 0.0, 0.5]);
        assert!(RealDipole.excluded(&bad));
        assert!(RealDipole.eval(&bad).is_err());
        let at_pole = RealDipole.eval_kernel(&a_star(), Complex64::new(0.5, 0.0));
        assert!(matches!(at_pole, Err(crate::Error::EvaluationAtPole { .. })));
    }

    #[test]
    fn decay_at_two() {
        let f = RealDipole.eval_kernel(&a_star(), Complex64::new(2.0, 0.0)).unwrap();
        assert_relative_eq!(f.re, 1.0 / 30.0, epsilon = 1e-15);
        assert!(f.norm() <= RealDipole.envelope().value_bound(2.0));
    }
}
