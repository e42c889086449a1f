//! Anchored real points and integer-split trigonometry.
//!
//! Poles of the interpolant sit within `K⁻²(s²+1)⁻²` of the integers, which is
//! far below the spacing of `f64` values near `|s| ~ 10³`. Points are therefore
//! stored as an integer anchor plus a small floating offset, and every
//! difference is formed anchor-first.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A real point `anchor + offset` with `|offset| ≤ 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub anchor: i64,
    pub offset: f64,
}

impl Point {
    /// Builds a point, moving whole units of `offset` into the anchor.
    pub fn new(anchor: i64, offset: f64) -> Self {
        let shift = offset.round();
        Self { anchor: anchor + shift as i64, offset: offset - shift }
    }

    /// An integer point.
    pub fn integer(k: i64) -> Self {
        Self { anchor: k, offset: 0.0 }
    }

    /// Nearest `f64` to the point (loses the offset below one ulp of the anchor).
    pub fn value(&self) -> f64 {
        self.anchor as f64 + self.offset
    }

    /// `self − other`, accurate for nearby points.
    pub fn diff(&self, other: &Point) -> f64 {
        (self.anchor - other.anchor) as f64 + (self.offset - other.offset)
    }

    /// `z − self` for a complex argument.
    pub fn rel(&self, z: Complex64) -> Complex64 {
        Complex64::new((z.re - self.anchor as f64) - self.offset, z.im)
    }

    /// `x − self` for a real argument.
    pub fn rel_real(&self, x: f64) -> f64 {
        (x - self.anchor as f64) - self.offset
    }

    /// `k − self` for an integer argument, exact in the anchor part.
    pub fn rel_int(&self, k: i64) -> f64 {
        (k - self.anchor) as f64 - self.offset
    }

    /// `sin(π·self)` computed as `(−1)^anchor·sin(π·offset)`.
    pub fn sin_pi(&self) -> f64 {
        parity(self.anchor) * (PI * self.offset).sin()
    }

    /// Total order by position.
    pub fn cmp_pos(&self, other: &Point) -> Ordering {
        self.diff(other).partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }

    /// Whether the point is an integer.
    pub fn is_integer(&self) -> bool {
        self.offset == 0.0
    }
}

/// `(−1)^k` as a float.
pub fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `sinc(k + d) = sin(π(k+d))/(π(k+d))` with the integer part split off so
/// that tiny `d` keeps full relative accuracy.
pub fn sinc_split(k: i64, d: f64) -> f64 {
    let shift = d.round();
    let (k, d) = (k + shift as i64, d - shift);
    let x = k as f64 + d;
    if k == 0 {
        if d.abs() < 1e-8 {
            1.0 - (PI * d).powi(2) / 6.0
        } else {
            (PI * d).sin() / (PI * d)
        }
    } else {
        parity(k) * (PI * d).sin() / (PI * x)
    }
}

/// `sinc(a − b)` for two anchored points.
pub fn sinc_points(a: &Point, b: &Point) -> f64 {
    sinc_split(a.anchor - b.anchor, a.offset - b.offset)
}

/// `sin(πz)` for complex `z`, with the nearest integer of `Re z` split off.
pub fn sin_pi_complex(z: Complex64) -> Complex64 {
    let k = z.re.round();
    let w = Complex64::new(z.re - k, z.im) * PI;
    w.sin() * parity(k as i64)
}

/// Sup norm over the real and imaginary parts of a complex slice.
pub fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.re.abs()).max(z.im.abs()))
}

/// Sup norm of the difference of two complex slices.
pub fn sup_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m, (x, y)| m.max((x.re - y.re).abs()).max((x.im - y.im).abs()))
}

/// Evenly spaced samples on `[a, b]` (inclusive).
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}
