//! The cardinal series `Σ h(k)·sin(π(z−k))/(π(z−k))` on a finite window.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numeric::{parity, sin_pi_complex};

/// Dyadic-shell energy of integer samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    /// `(lo, hi, Σ_{lo ≤ |k| < hi} |h(k)|²)`.
    pub shells: Vec<(i64, i64, f64)>,
    pub total: f64,
    /// Raised when the outermost nonzero shell carries at least as much energy
    /// as the one before it, which is how a non-square-summable tail looks.
    pub warning: bool,
}

/// Shell energies of samples `h(k)`, `k = lo, lo+1, …`.
pub fn tail_report(lo: i64, samples: &[Complex64]) -> TailReport {
    let max_abs = samples.len() as i64 + lo.abs();
    let mut shells = vec![(0i64, 1i64, 0.0)];
    let mut a = 1;
    while a <= max_abs {
        shells.push((a, 2 * a, 0.0));
        a *= 2;
    }
    for (i, h) in samples.iter().enumerate() {
        let k = (lo + i as i64).abs();
        let idx = if k == 0 { 0 } else { (64 - (k as u64).leading_zeros()) as usize };
        shells[idx].2 += h.norm_sqr();
    }
    while shells.len() > 1 && shells.last().is_some_and(|s| s.2 == 0.0) {
        shells.pop();
    }
    let total = shells.iter().map(|s| s.2).sum();
    let n = shells.len();
    let warning = n >= 3 && shells[n - 1].2 > 0.0 && shells[n - 1].2 >= shells[n - 2].2;
    TailReport { shells, total, warning }
}

/// `Σ_k h(k)(−1)^k sin(πz)/(π(z−k))` over the samples `h(lo), h(lo+1), …`.
/// Integer arguments inside the window return the sample itself.
pub fn cardinal_series(lo: i64, samples: &[Complex64], z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re.fract() == 0.0 {
        let k = z.re as i64;
        let i = k - lo;
        return if i >= 0 && (i as usize) < samples.len() { samples[i as usize] } else { Complex64::new(0.0, 0.0) };
    }
    let s: Complex64 = samples
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let k = lo + i as i64;
            h * parity(k) / Complex64::new(z.re - k as f64, z.im)
        })
        .sum();
    s * sin_pi_complex(z) / std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn delta_reproduces_sinc() {
        let mut h = vec![Complex64::new(0.0, 0.0); 21];
        h[10] = Complex64::new(1.0, 0.0);
        for x in [0.3, -2.7, 5.5] {
            let z = Complex64::new(x, 0.0);
            let expected = (PI * x).sin() / (PI * x);
            assert!((cardinal_series(-10, &h, z).re - expected).abs() < 1e-14);
        }
        assert!(!tail_report(-10, &h).warning);
    }

    #[test]
    fn band_limited_function_is_reproduced() {
        use rand::{Rng, SeedableRng};
        // g(z) = (sin(πz/2)/(πz/2))², of type π.
        let g = |x: f64| {
            if x == 0.0 {
                1.0
            } else {
                let s = (PI * x / 2.0).sin() / (PI * x / 2.0);
                s * s
            }
        };
        let w = 1000;
        let h: Vec<Complex64> = (-w..=w).map(|k| Complex64::new(g(k as f64), 0.0)).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x: f64 = rng.random_range(-20.0..20.0);
            let v = cardinal_series(-w, &h, Complex64::new(x, 0.0));
            // Truncation error of the window is O(1/w²) for this sample decay.
            assert!((v.re - g(x)).abs() < 1e-6, "{x}: {} vs {}", v.re, g(x));
        }
        assert!(!tail_report(-w, &h).warning);
    }

    #[test]
    fn growing_samples_raise_warning() {
        let h: Vec<Complex64> = (-500..=500).map(|k| Complex64::new(k as f64, 0.0)).collect();
        assert!(tail_report(-500, &h).warning);
    }
}
