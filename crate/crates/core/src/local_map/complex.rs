//! Complex pair `g(z) = c₁/(z+p₁) + c₂/(z+p₂)` with complex amplitudes and real poles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{hits_node, Envelope, LocalMap, NODES};
use crate::stochastic::Mode;

/// Two Cauchy kernels with free complex residues and real poles.
///
/// Flattened parameters are `[Re c₁, Im c₁, Re c₂, Im c₂, p₁, p₂]`; the
/// flattened image interleaves real and imaginary parts of `g(−1), g(0), g(1)`.
/// In the coefficient sequence the slots hold `(c₁, c₂, p₁ + i·p₂)`.
///
/// The centre `c₁ = (1+2i)/8`, `c₂ = (−1+2i)/8`, `p = (−1/2, 1/2)` keeps the
/// poles at `±1/2` like the real dipole while making the real 6×6 Jacobian
/// invertible (real residues would make it singular).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexPair;

impl ComplexPair {
    pub const NAME: &'static str = "complex-pair";
}

impl LocalMap for ComplexPair {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn mode(&self) -> Mode {
        Mode::Complex
    }

    fn dim(&self) -> usize {
        6
    }

    fn base_point(&self) -> DVector<f64> {
        DVector::from_vec(vec![1.0 / 8.0, 0.25, -1.0 / 8.0, 0.25, -0.5, 0.5])
    }

    fn excluded(&self, p: &DVector<f64>) -> bool {
        hits_node(-p[4]) || hits_node(-p[5])
    }

    fn kernels(&self, p: &DVector<f64>) -> [(f64, Complex64); 2] {
        [(-p[4], Complex64::new(p[0], p[1])), (-p[5], Complex64::new(p[2], p[3]))]
    }

    fn jacobian_unchecked(&self, p: &DVector<f64>) -> DMatrix<f64> {
        let c = [Complex64::new(p[0], p[1]), Complex64::new(p[2], p[3])];
        let poles = [p[4], p[5]];
        let mut j = DMatrix::zeros(6, 6);
        for (i, &x) in NODES.iter().enumerate() {
            for k in 0..2 {
                let inv = 1.0 / (x + poles[k]);
                // ∂/∂Re c_k = 1/(x+p_k), ∂/∂Im c_k = i/(x+p_k), ∂/∂p_k = −c_k/(x+p_k)².
                j[(2 * i, 2 * k)] = inv;
                j[(2 * i + 1, 2 * k + 1)] = inv;
                let dp = -c[k] * inv * inv;
                j[(2 * i, 4 + k)] = dp.re;
                j[(2 * i + 1, 4 + k)] = dp.im;
            }
        }
        j
    }

    fn params_to_slots(&self, p: &DVector<f64>) -> [Complex64; 3] {
        [Complex64::new(p[0], p[1]), Complex64::new(p[2], p[3]), Complex64::new(p[4], p[5])]
    }

    fn slots_to_params(&self, s: &[Complex64]) -> DVector<f64> {
        DVector::from_vec(vec![s[0].re, s[0].im, s[1].re, s[1].im, s[2].re, s[2].im])
    }

    fn image_to_slots(&self, y: &DVector<f64>) -> [Complex64; 3] {
        [0, 1, 2].map(|i| Complex64::new(y[2 * i], y[2 * i + 1]))
    }

    fn slots_to_image(&self, s: &[Complex64]) -> DVector<f64> {
        DVector::from_iterator(6, s.iter().take(3).flat_map(|z| [z.re, z.im]))
    }

    fn envelope(&self) -> Envelope {
        // c₁ + c₂ ≠ 0, so the pair decays only like 1/|z|.
        Envelope { order: 1, decay: 2.0, lipschitz: 8.0 }
    }

    fn default_radii(&self) -> (f64, f64) {
        (0.0209, 0.0043)
    }
}
