//! Block-averaged offset bounds `|Σ_{kH ≤ λ_n ≤ (k+1)H} δ_n| ≤ δ_av·H`.

use serde::{Deserialize, Serialize};

use super::lambda::FrequencySet;
use crate::error::{Error, Result};

/// Default threshold `δ_av`.
pub const DEFAULT_DELTA_AV: f64 = 0.2;

/// Block sums for one block length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvdoninCheck {
    pub h: i64,
    pub delta_av: f64,
    /// `(k, Σ δ_n)` for every block meeting the window.
    pub sums: Vec<(i64, f64)>,
    /// Block with the largest `|Σ δ_n|`.
    pub worst: (i64, f64),
    pub pass: bool,
}

/// Checks for the lengths `{T, 2T, 4T}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvdoninResult {
    pub checks: Vec<AvdoninCheck>,
    /// Smallest block length that passes.
    pub passing_h: Option<i64>,
}

/// Evaluates every block sum of `Λ` for block length `h`.
pub fn avdonin_check(lambda: &FrequencySet, h: i64, delta_av: f64) -> Result<AvdoninCheck> {
    if !(delta_av > 0.0 && delta_av < 0.25) || h <= 0 {
        return Err(Error::Config(format!("Avdonin threshold {delta_av} must lie in (0, 1/4) and H > 0")));
    }
    let mut sums: Vec<(i64, f64)> = Vec::new();
    for f in lambda.items() {
        let x = f.point.value();
        let k = (x / h as f64).floor() as i64;
        // Frequencies are never integers, so no point sits on a block boundary.
        match sums.last_mut() {
            Some((last, s)) if *last == k => *s += f.delta,
            _ => sums.push((k, f.delta)),
        }
    }
    let worst = sums.iter().copied().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap_or((0, 0.0));
    let pass = sums.iter().all(|(_, s)| s.abs() <= delta_av * h as f64);
    Ok(AvdoninCheck { h, delta_av, sums, worst, pass })
}

/// Searches `H ∈ {T, 2T, 4T}` for a passing block length.
pub fn avdonin_search(lambda: &FrequencySet, t: i64, delta_av: f64) -> Result<AvdoninResult> {
    let checks = [t, 2 * t, 4 * t].iter().map(|&h| avdonin_check(lambda, h, delta_av)).collect::<Result<Vec<_>>>()?;
    let passing_h = checks.iter().find(|c| c.pass).map(|c| c.h);
    Ok(AvdoninResult { checks, passing_h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Point;
    use crate::reconstruction::FrequencyKind;

    fn shifted(w: i64, d: f64) -> FrequencySet {
        FrequencySet::from_points(w, (-w..=w).map(|k| (Point::new(k, d), FrequencyKind::Pole)).collect()).unwrap()
    }

    #[test]
    fn tiny_offsets_pass() {
        let r = avdonin_search(&shifted(500, -1e-9), 100, 0.2).unwrap();
        assert_eq!(r.passing_h, Some(100));
    }

    #[test]
    fn uniform_shift_fails_everywhere() {
        let r = avdonin_search(&shifted(500, 0.3), 50, 0.24).unwrap();
        assert!(r.passing_h.is_none());
        assert!(r.checks.iter().all(|c| c.worst.1 > 0.24 * c.h as f64));
    }

    #[test]
    fn threshold_must_be_below_quarter() {
        assert!(avdonin_check(&shifted(10, 0.1), 5, 0.25).is_err());
    }
}
