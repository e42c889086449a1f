//! Reproducing kernels of the Paley–Wiener space with inner product
//! `(1/2π)∫_{−π}^{π} f·ḡ`, under which `e^{int}` are orthonormal.

use num_complex::Complex64;

use crate::numeric::{sin_pi_complex, sinc_points, Point};

/// `k_λ(z) = sin(π(z−λ))/(π(z−λ))`, equal to one at `z = λ`.
pub fn reproducing_kernel(lambda: &Point, z: Complex64) -> Complex64 {
    let w = lambda.rel(z);
    if w.norm() < 1e-8 {
        let pw2 = (w * std::f64::consts::PI).powi(2);
        Complex64::new(1.0, 0.0) - pw2 / 6.0
    } else {
        // sin(π(z−λ)) = (−1)^anchor·sin(π(z − anchor) − π·offset).
        sin_pi_complex(w) / (w * std::f64::consts::PI)
    }
}

/// `⟨k_λ, k_μ⟩ = k_μ(λ) = sinc(λ − μ)`.
pub fn kernel_inner(lambda: &Point, mu: &Point) -> f64 {
    sinc_points(lambda, mu)
}

/// `g(z)` for `g = Σ b_j k_{λ_j}`.
pub fn combination_value(lambdas: &[Point], coefs: &[Complex64], z: Complex64) -> Complex64 {
    lambdas.iter().zip(coefs).map(|(l, b)| b * reproducing_kernel(l, z)).sum()
}

/// `⟨g, k_μ⟩` for `g = Σ b_j k_{λ_j}` from closed-form kernel inner products.
pub fn combination_inner(lambdas: &[Point], coefs: &[Complex64], mu: &Point) -> Complex64 {
    lambdas.iter().zip(coefs).map(|(l, b)| b * kernel_inner(l, mu)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernels_are_orthonormal_on_integers() {
        for n in -5..=5 {
            for m in -5..=5 {
                let v = reproducing_kernel(&Point::integer(n), Complex64::new(m as f64, 0.0));
                let expected = if n == m { 1.0 } else { 0.0 };
                assert!((v.re - expected).abs() < 1e-15 && v.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn reproducing_property_for_combinations() {
        let lambdas = [Point::new(0, 0.3), Point::new(2, -0.1), Point::new(-4, 0.45)];
        let coefs = [Complex64::new(1.0, 0.5), Complex64::new(-0.3, 0.0), Complex64::new(0.2, -1.0)];
        for mu in [Point::new(1, 0.2), Point::new(-3, 0.0), Point::new(0, 0.3)] {
            let via_inner = combination_inner(&lambdas, &coefs, &mu);
            let direct = combination_value(&lambdas, &coefs, Complex64::new(mu.value(), 0.0));
            assert!((via_inner - direct).norm() < 1e-12);
        }
    }
}
